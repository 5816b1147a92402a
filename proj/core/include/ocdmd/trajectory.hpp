#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace ocdmd {

/// Time-stamped samples of one path of a dynamical system.
///
/// States are stored one sample per row (samples x n). Construction checks
/// that there are at least two samples, times are strictly increasing and
/// every value is finite.
class Trajectory {
 public:
  Trajectory(Eigen::VectorXd times, Eigen::MatrixXd states);

  const Eigen::VectorXd& times() const noexcept { return times_; }
  const Eigen::MatrixXd& states() const noexcept { return states_; }

  Eigen::Index samples() const noexcept { return times_.size(); }
  Eigen::Index dim() const noexcept { return states_.cols(); }
  double duration() const { return times_[times_.size() - 1] - times_[0]; }

  Eigen::VectorXd start() const { return states_.row(0).transpose(); }
  Eigen::VectorXd end() const { return states_.row(states_.rows() - 1).transpose(); }

  // Same samples with times shifted so that the first is 0.
  Trajectory rebased() const;

 private:
  Eigen::VectorXd times_;
  Eigen::MatrixXd states_;
};

enum class InputLayout { OneFilePerTrajectory, SingleFileWithId };

std::string_view to_string(InputLayout layout);
InputLayout input_layout_from_string(std::string_view name);

/// Reads trajectories from CSV.
///
/// OneFilePerTrajectory: `path` is either one CSV file or a directory whose
/// `*.csv` files are read in lexicographic filename order. Header is
/// `t,x1,...,xn`.
/// SingleFileWithId: one CSV file with header `traj_id,t,x1,...,xn`; rows of
/// a trajectory are contiguous and trajectories keep first-appearance order.
///
/// Returned trajectories are rebased to start at t = 0.
std::vector<Trajectory> load_trajectories(const std::filesystem::path& path,
                                          InputLayout layout);

// Files load_trajectories() would read for this path/layout, in read order.
std::vector<std::filesystem::path> trajectory_files(const std::filesystem::path& path,
                                                    InputLayout layout);

// Writes `t,x1,...,xn` with 17 significant digits.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);
void save_trajectory(const std::filesystem::path& path, const Trajectory& traj);

/// Consecutive windows of `samples_per_segment` samples, starting every
/// `stride` samples (stride defaults to the window length, i.e. no overlap).
/// A trailing window with at least 2 samples is kept shorter; a single
/// leftover sample is dropped. Each window is rebased to t = 0.
std::vector<Trajectory> segment(const Trajectory& traj, Eigen::Index samples_per_segment,
                                Eigen::Index stride = 0);

std::vector<Trajectory> segment_all(const std::vector<Trajectory>& trajs,
                                    Eigen::Index samples_per_segment,
                                    Eigen::Index stride = 0);

struct LinearSystem {
  Eigen::MatrixXd A;
};

// x1' = x2, x2' = mu (1 - x1^2) x2 - x1
struct VanDerPol {
  double mu = 1.0;
};

struct CustomField {
  Eigen::Index dim = 1;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> rhs;
};

using VectorFieldSpec = std::variant<LinearSystem, VanDerPol, CustomField>;

Eigen::Index dimension(const VectorFieldSpec& field);
Eigen::VectorXd evaluate(const VectorFieldSpec& field, const Eigen::VectorXd& x);

/// Classical fixed-step RK4 from x0 over [0, T]. Samples sit at k*dt; when T
/// is not a whole number of steps a final shorter step lands exactly on T.
/// Throws DivergenceError at the first non-finite state.
Trajectory simulate(const VectorFieldSpec& field, const Eigen::VectorXd& x0, double T,
                    double dt);

}  // namespace ocdmd
