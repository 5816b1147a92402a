#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cli/run_config.hpp"
#include "ocdmd/decomposition.hpp"
#include "ocdmd/trajectory.hpp"

namespace ocdmd::cli {

struct DecomposeSummary {
  Eigen::Index trajectories = 0;
  Eigen::Index dim = 0;
  double eps_hat = 0.0;
};

/// Fits a model to the trajectories under `input` and writes model.json,
/// eigenvalues.csv, modes.csv and run_meta.json into config.out_dir
/// (coefficients.csv too when config.x0 is set). Artifacts are staged and
/// renamed into place together; nothing is left behind on failure.
DecomposeSummary cmd_decompose(const RunConfig& config, const std::filesystem::path& input);

// Writes reconstruction.csv (t,x1..xn,imag_residual) into out_dir. Returns
// true when some time lies beyond the longest training trajectory.
bool cmd_reconstruct(const std::filesystem::path& model_path, const Eigen::VectorXd& x0,
                     const Eigen::VectorXd& times, const std::filesystem::path& out_dir);

// `frequency_hz,magnitude` rows; log10 floors magnitudes at 1e-12 first.
std::string spectrum_csv(const std::vector<SpectrumEntry>& entries, bool log10);

/// Writes spectrum.csv (frequency_hz,magnitude) into out_dir. Without x0 the
/// first sample of the first training trajectory is used. With log10 the
/// magnitudes are floored at 1e-12 before the transform.
void cmd_spectrum(const std::filesystem::path& model_path, const std::optional<Eigen::VectorXd>& x0,
                  bool log10, const std::filesystem::path& out_dir);

// Trajectories cmd_synth would write, in file order.
std::vector<Trajectory> synth_trajectories(const std::string& system, int count, double T,
                                           double dt, std::uint64_t seed);

/// Writes `count` trajectories of a named system (oscillator, decay,
/// vanderpol) from initial conditions drawn uniformly in [-1, 1]^n.
void cmd_synth(const std::string& system, int count, double T, double dt, std::uint64_t seed,
               const std::filesystem::path& out_dir);

}  // namespace ocdmd::cli
