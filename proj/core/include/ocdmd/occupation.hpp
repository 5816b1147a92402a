#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "ocdmd/kernels.hpp"
#include "ocdmd/quadrature.hpp"
#include "ocdmd/trajectory.hpp"

namespace ocdmd {

// Quadrature weights for every trajectory, in order.
std::vector<QuadratureWeights> trajectory_weights(std::span<const Trajectory> trajs,
                                                  QuadratureRule rule = QuadratureRule::Auto);

/// Occupation kernel of `traj` evaluated at x: the quadrature approximation of
/// the integral over [0, T] of K(x, traj(t)) dt.
double occupation_eval(const Trajectory& traj, const QuadratureWeights& w,
                       const KernelSpec& kernel, const Eigen::Ref<const Eigen::VectorXd>& x);
double occupation_eval(const Trajectory& traj, const KernelSpec& kernel,
                       const Eigen::Ref<const Eigen::VectorXd>& x,
                       QuadratureRule rule = QuadratureRule::Auto);

// Entry j is the occupation kernel of trajectory j evaluated at x.
Eigen::VectorXd occupation_column(std::span<const Trajectory> trajs,
                                  std::span<const QuadratureWeights> w, const KernelSpec& kernel,
                                  const Eigen::Ref<const Eigen::VectorXd>& x);

/// Gram matrix of occupation kernels. Entry (i, j) is the tensor-product
/// double integral w_i^T K(states_i, states_j) w_j; the result is
/// symmetrized as (G + G^T) / 2.
Eigen::MatrixXd gram_matrix(std::span<const Trajectory> trajs,
                            std::span<const QuadratureWeights> w, const KernelSpec& kernel);
Eigen::MatrixXd gram_matrix(std::span<const Trajectory> trajs, const KernelSpec& kernel,
                            QuadratureRule rule = QuadratureRule::Auto);

/// Interaction matrix with endpoint scaling a in (0, 1]:
///   I_a(i, j) = Gamma_i(a * end_j) - Gamma_i(a * start_j).
/// Only the endpoint arguments are scaled; a = 1 gives the unscaled matrix.
Eigen::MatrixXd interaction_matrix(std::span<const Trajectory> trajs,
                                   std::span<const QuadratureWeights> w,
                                   const KernelSpec& kernel, double a);
Eigen::MatrixXd interaction_matrix(std::span<const Trajectory> trajs, const KernelSpec& kernel,
                                   double a = 1.0, QuadratureRule rule = QuadratureRule::Auto);

// Row i is the integral of trajectory i's state over its time span (M x n).
Eigen::MatrixXd state_integrals(std::span<const Trajectory> trajs,
                                std::span<const QuadratureWeights> w);
Eigen::MatrixXd state_integrals(std::span<const Trajectory> trajs,
                                QuadratureRule rule = QuadratureRule::Auto);

struct GramData {
  Eigen::MatrixXd G;
  Eigen::MatrixXd I_a;
  Eigen::MatrixXd state_integrals;
  double a = 1.0;
  KernelSpec kernel;
  std::vector<QuadratureWeights> weights;

  Eigen::Index M() const { return G.rows(); }
};

GramData assemble(std::span<const Trajectory> trajs, const KernelSpec& kernel, double a = 1.0,
                  QuadratureRule rule = QuadratureRule::Auto);

/// Squared RKHS distance from K(., y) to the span of the occupation kernels:
///   K(y, y) - k^T (G + eps_hat I)^{-1} k,   k_i = Gamma_i(y),
/// with eps_hat = eps * trace(G) / M.
double projection_error(std::span<const Trajectory> trajs, std::span<const QuadratureWeights> w,
                        const KernelSpec& kernel, const Eigen::Ref<const Eigen::VectorXd>& y,
                        double eps);

}  // namespace ocdmd
