#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "ocdmd/decomposition.hpp"
#include "ocdmd/trajectory.hpp"

namespace ocdmd {

inline constexpr int kModelFormatVersion = 1;

struct TrajectorySource {
  std::string path;    // absolute
  std::string sha256;  // hex digest at fit time
};

// How the training trajectories were obtained, so that a saved model can be
// re-attached to its data.
struct ModelProvenance {
  std::string input;  // path given to load_trajectories
  InputLayout layout = InputLayout::OneFilePerTrajectory;
  std::vector<TrajectorySource> files;
  Eigen::Index segment_len = 0;  // 0: not segmented
  Eigen::Index segment_stride = 0;
  QuadratureRule rule = QuadratureRule::Auto;
  ModeOrder order = ModeOrder::Eigenvalue;
};

struct ModelDocument {
  ModelProvenance provenance;
  KernelSpec kernel;
  double a = 1.0;
  double eps = kDefaultEps;
  double eps_hat = 0.0;
  ModesTranspose transpose = ModesTranspose::Plain;
  std::vector<std::string> rules_used;
  Eigen::VectorXcd eigenvalues;
  Eigen::MatrixXcd V;
  Eigen::MatrixXcd modes;
};

/// Serializes the model as one JSON document: eigenvalues, V and modes as
/// re/im arrays (matrices row-major), scalar settings, kernel, per-trajectory
/// quadrature rules and trajectory file digests. Doubles round-trip exactly.
std::string model_to_json(const DecompositionModel& model, const ModelProvenance& provenance);

ModelDocument parse_model_json(std::string_view text, const std::string& source = "model.json");
ModelDocument read_model_document(const std::filesystem::path& path);

// Digests each source file; throws StaleModelError on any mismatch.
void verify_sources(const ModelProvenance& provenance);

// Reloads (and re-segments) the trajectories named by the provenance.
std::vector<Trajectory> load_training_data(const ModelProvenance& provenance);

DecompositionModel rebuild_model(const ModelDocument& doc, std::vector<Trajectory> trajs);

// read_model_document + verify_sources + load_training_data + rebuild_model.
DecompositionModel load_model(const std::filesystem::path& path);

}  // namespace ocdmd
