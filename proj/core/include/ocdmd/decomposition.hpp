#pragma once

#include <memory>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "ocdmd/kernels.hpp"
#include "ocdmd/occupation.hpp"
#include "ocdmd/quadrature.hpp"
#include "ocdmd/trajectory.hpp"

namespace ocdmd {

inline constexpr double kDefaultEps = 1e-10;

// Eigenvectors whose G-norm falls below this multiple of sqrt(trace G) are
// treated as orthogonal to the data span.
inline constexpr double kDegenerateNormFactor = 1e-12;

// Which transpose forms the modal Gram in the Liouville-mode solve.
enum class ModesTranspose { Plain, Conjugate };

enum class ModeOrder { Eigenvalue, Energy };

std::string_view to_string(ModesTranspose t);
ModesTranspose modes_transpose_from_string(std::string_view name);
std::string_view to_string(ModeOrder o);
ModeOrder mode_order_from_string(std::string_view name);

// eps * trace(G) / M: the diagonal shift applied to every Gram solve.
double regularization_shift(const Eigen::Ref<const Eigen::MatrixXd>& G, double eps);

/// Solves (G + eps_hat I) X = I^T with a Cholesky factorization, where
/// eps_hat = regularization_shift(G, eps). Throws SingularGramError when the
/// shifted Gram matrix is not positive definite.
Eigen::MatrixXd finite_rank_representation(const Eigen::Ref<const Eigen::MatrixXd>& G,
                                           const Eigen::Ref<const Eigen::MatrixXd>& I,
                                           double eps);

struct EigenPairs {
  Eigen::VectorXcd eigenvalues;
  // Column i is v_i / N_i with N_i^2 = v_i^H (G + eps_hat I) v_i.
  Eigen::MatrixXcd V;
  double eps_hat = 0.0;
};

/// Eigenpairs of the finite-rank representation, normalized in the
/// (regularized) Gram inner product. Ordered by descending |lambda|, ties by
/// descending Im(lambda), so conjugate partners are adjacent with the
/// positive imaginary part first.
EigenPairs eigendecompose(const Eigen::Ref<const Eigen::MatrixXd>& G,
                          const Eigen::Ref<const Eigen::MatrixXd>& I_a, double eps);

/// Liouville modes, n x M:  xi = ((V^T Gr V)^{-1} V^T S)^T  with Gr the
/// regularized Gram and S the M x n state integrals. ModesTranspose::Conjugate
/// uses V^H in place of V^T.
Eigen::MatrixXcd liouville_modes(const Eigen::Ref<const Eigen::MatrixXcd>& V,
                                 const Eigen::Ref<const Eigen::MatrixXd>& G,
                                 const Eigen::Ref<const Eigen::MatrixXd>& state_ints, double eps,
                                 ModesTranspose transpose = ModesTranspose::Plain);

struct DecomposeOptions {
  KernelSpec kernel;
  double a = 1.0;
  double eps = kDefaultEps;
  QuadratureRule rule = QuadratureRule::Auto;
  ModesTranspose transpose = ModesTranspose::Plain;
};

/// Fitted continuous-time decomposition. Immutable; keeps the trajectories
/// because eigenfunctions are evaluated through their occupation kernels.
class DecompositionModel {
 public:
  DecompositionModel(std::shared_ptr<const std::vector<Trajectory>> trajs,
                     std::vector<QuadratureWeights> weights, KernelSpec kernel, double a,
                     double eps, double eps_hat, Eigen::VectorXcd eigenvalues,
                     Eigen::MatrixXcd V, Eigen::MatrixXcd modes,
                     ModesTranspose transpose = ModesTranspose::Plain);

  const std::vector<Trajectory>& trajectories() const { return *trajs_; }
  const std::vector<QuadratureWeights>& weights() const { return weights_; }
  const KernelSpec& kernel() const { return kernel_; }
  double a() const { return a_; }
  double eps() const { return eps_; }
  double eps_hat() const { return eps_hat_; }
  ModesTranspose transpose() const { return transpose_; }

  const Eigen::VectorXcd& eigenvalues() const { return eigenvalues_; }
  const Eigen::MatrixXcd& V() const { return V_; }
  const Eigen::MatrixXcd& modes() const { return modes_; }

  Eigen::Index M() const { return eigenvalues_.size(); }
  Eigen::Index dim() const { return modes_.rows(); }
  double max_duration() const;

  // Same model with columns permuted; order[k] is the old index of new column k.
  DecompositionModel permuted(const std::vector<Eigen::Index>& order) const;

 private:
  std::shared_ptr<const std::vector<Trajectory>> trajs_;
  std::vector<QuadratureWeights> weights_;
  KernelSpec kernel_;
  double a_;
  double eps_;
  double eps_hat_;
  ModesTranspose transpose_;
  Eigen::VectorXcd eigenvalues_;
  Eigen::MatrixXcd V_;
  Eigen::MatrixXcd modes_;
};

DecompositionModel build_model(std::shared_ptr<const std::vector<Trajectory>> trajs,
                               const GramData& data, double eps,
                               ModesTranspose transpose = ModesTranspose::Plain);

// Gram assembly, eigendecomposition and Liouville modes in one call.
DecompositionModel decompose(std::vector<Trajectory> trajs, const DecomposeOptions& options);

// phi_i(x0) = sum_j V(j, i) Gamma_j(x0).
Eigen::VectorXcd eigenfunctions_at(const DecompositionModel& model,
                                   const Eigen::Ref<const Eigen::VectorXd>& x0);

// |xi_i| * |phi_i(x0)| per mode.
Eigen::VectorXd modal_energy(const DecompositionModel& model,
                             const Eigen::Ref<const Eigen::VectorXd>& x0);

// Reorders by descending modal energy at x0, keeping conjugate pairs together.
DecompositionModel order_by_energy(const DecompositionModel& model,
                                   const Eigen::Ref<const Eigen::VectorXd>& x0);

struct Prediction {
  Eigen::VectorXd state;
  double imag_residual = 0.0;  // |Im(sum)|_2
  bool extrapolated = false;   // t beyond the longest training trajectory
};

/// x(t) ~ Re sum_i xi_i phi_i(x0) exp(lambda_i t). Throws NumericRangeError
/// when Re(lambda_i) t exceeds kMaxExponent for any mode.
Prediction predict(const DecompositionModel& model, const Eigen::Ref<const Eigen::VectorXd>& x0,
                   double t);

struct Reconstruction {
  Trajectory trajectory;
  Eigen::VectorXd imag_residual;
  bool extrapolated = false;
};

Reconstruction reconstruct(const DecompositionModel& model,
                           const Eigen::Ref<const Eigen::VectorXd>& x0,
                           const Eigen::Ref<const Eigen::VectorXd>& times);

struct SpectrumEntry {
  double frequency_hz = 0.0;
  double magnitude = 0.0;
};

/// One entry per eigenvalue with Im(lambda) >= 0, sorted by frequency.
/// Magnitude is |xi_i| |phi_i(x0)|, doubled for complex pairs.
std::vector<SpectrumEntry> spectrum(const DecompositionModel& model,
                                    const Eigen::Ref<const Eigen::VectorXd>& x0);

}  // namespace ocdmd
