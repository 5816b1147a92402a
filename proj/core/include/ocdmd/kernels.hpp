#pragma once

#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace ocdmd {

enum class KernelKind { GaussianRBF, ExponentialDotProduct };

/// Positive-definite kernel with width parameter mu.
///
///   GaussianRBF:            K(x, y) = exp(-|x - y|^2 / mu)
///   ExponentialDotProduct:  K(x, y) = exp(x^T y / mu)
///
/// mu = 1 with the exponential dot product kernel gives the Bargmann-Fock
/// kernel. Construct through gaussian()/exp_dot() to get validation.
struct KernelSpec {
  KernelKind kind = KernelKind::GaussianRBF;
  double mu = 1.0;

  static KernelSpec gaussian(double mu);
  static KernelSpec exp_dot(double mu);

  // Throws InvalidInput unless mu is finite and positive.
  void validate() const;

  bool operator==(const KernelSpec&) const = default;
};

// Exponent bound for the exponential dot product kernel; beyond it
// evaluation raises NumericRangeError instead of returning huge values.
inline constexpr double kMaxExponent = 700.0;

std::string_view to_string(KernelKind kind);
KernelKind kernel_kind_from_string(std::string_view name);

double eval(const KernelSpec& kernel, const Eigen::Ref<const Eigen::VectorXd>& x,
            const Eigen::Ref<const Eigen::VectorXd>& y);

/// Batched evaluation. Points are stored one per row: X is P x n, Y is Q x n,
/// and entry (p, q) of the result is eval(kernel, X.row(p), Y.row(q)).
Eigen::MatrixXd eval_matrix(const KernelSpec& kernel,
                            const Eigen::Ref<const Eigen::MatrixXd>& X,
                            const Eigen::Ref<const Eigen::MatrixXd>& Y);

// Column form of eval_matrix against a single point y.
Eigen::VectorXd eval_column(const KernelSpec& kernel,
                            const Eigen::Ref<const Eigen::MatrixXd>& X,
                            const Eigen::Ref<const Eigen::VectorXd>& y);

}  // namespace ocdmd
