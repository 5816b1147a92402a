#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "ocdmd/decomposition.hpp"
#include "ocdmd/kernels.hpp"
#include "ocdmd/quadrature.hpp"
#include "ocdmd/trajectory.hpp"

namespace ocdmd::cli {

// Bad command-line usage; maps to exit status 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum ExitCode : int { kSuccess = 0, kUsage = 2, kDataError = 3, kNumericError = 4 };

/// Inputs of one decomposition run, mirrored by flags and config-file keys.
struct RunConfig {
  KernelSpec kernel{KernelKind::GaussianRBF, 1.0};
  QuadratureRule rule = QuadratureRule::Auto;
  double a = 1.0;
  double eps = kDefaultEps;
  Eigen::Index segment_len = 0;  // 0: use trajectories whole
  Eigen::Index segment_stride = 0;
  InputLayout layout = InputLayout::OneFilePerTrajectory;
  std::filesystem::path out_dir = ".";
  ModeOrder order = ModeOrder::Eigenvalue;
  ModesTranspose transpose = ModesTranspose::Plain;
  std::optional<Eigen::VectorXd> x0;
  int threads = 0;  // 0: runtime default

  // Throws UsageError naming the first out-of-range field.
  void validate() const;
};

// "1,0.5,-2" -> vector
Eigen::VectorXd parse_point(std::string_view text);

// "start:stop:count" (inclusive, evenly spaced) or an explicit "t0,t1,...".
Eigen::VectorXd parse_time_grid(std::string_view text);

// printf-style %.17g.
std::string format_double(double value);

}  // namespace ocdmd::cli
