#include "ocdmd/kernels.hpp"

#include <cmath>
#include <sstream>

#include "ocdmd/error.hpp"

namespace ocdmd {

namespace {

// Inner loops index raw rows so that eval() and eval_matrix() perform the
// identical sequence of floating-point operations.
template <typename RowA, typename RowB>
double evaluate(const KernelSpec& kernel, const RowA& x, const RowB& y) {
  const Eigen::Index n = x.size();
  if (kernel.kind == KernelKind::GaussianRBF) {
    double dist2 = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
      const double d = x[k] - y[k];
      dist2 += d * d;
    }
    return std::exp(-dist2 / kernel.mu);
  }
  double dot = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) dot += x[k] * y[k];
  const double exponent = dot / kernel.mu;
  if (!(exponent <= kMaxExponent)) {
    std::ostringstream msg;
    msg << "exponential dot product kernel exponent " << exponent
        << " exceeds " << kMaxExponent << " (increase mu or rescale data)";
    throw NumericRangeError(msg.str());
  }
  return std::exp(exponent);
}

void check_dims(Eigen::Index a, Eigen::Index b) {
  if (a != b) {
    throw InvalidInput("kernel arguments have mismatched dimensions " +
                       std::to_string(a) + " and " + std::to_string(b));
  }
}

}  // namespace

KernelSpec KernelSpec::gaussian(double mu) {
  KernelSpec k{KernelKind::GaussianRBF, mu};
  k.validate();
  return k;
}

KernelSpec KernelSpec::exp_dot(double mu) {
  KernelSpec k{KernelKind::ExponentialDotProduct, mu};
  k.validate();
  return k;
}

void KernelSpec::validate() const {
  if (!(mu > 0.0) || !std::isfinite(mu)) {
    std::ostringstream msg;
    msg << "kernel width mu must be positive and finite, got " << mu;
    throw InvalidInput(msg.str());
  }
}

std::string_view to_string(KernelKind kind) {
  switch (kind) {
    case KernelKind::GaussianRBF:
      return "gaussian";
    case KernelKind::ExponentialDotProduct:
      return "expdot";
  }
  return "unknown";
}

KernelKind kernel_kind_from_string(std::string_view name) {
  if (name == "gaussian") return KernelKind::GaussianRBF;
  if (name == "expdot") return KernelKind::ExponentialDotProduct;
  throw InvalidInput("unknown kernel '" + std::string(name) +
                     "' (expected gaussian or expdot)");
}

double eval(const KernelSpec& kernel, const Eigen::Ref<const Eigen::VectorXd>& x,
            const Eigen::Ref<const Eigen::VectorXd>& y) {
  check_dims(x.size(), y.size());
  if (x.size() == 0) throw InvalidInput("kernel arguments must be non-empty");
  return evaluate(kernel, x, y);
}

Eigen::MatrixXd eval_matrix(const KernelSpec& kernel,
                            const Eigen::Ref<const Eigen::MatrixXd>& X,
                            const Eigen::Ref<const Eigen::MatrixXd>& Y) {
  const Eigen::Index P = X.rows();
  const Eigen::Index Q = Y.rows();
  if (P > 0 && Q > 0) check_dims(X.cols(), Y.cols());
  Eigen::MatrixXd out(P, Q);
  for (Eigen::Index q = 0; q < Q; ++q) {
    const auto y = Y.row(q);
    for (Eigen::Index p = 0; p < P; ++p) out(p, q) = evaluate(kernel, X.row(p), y);
  }
  return out;
}

Eigen::VectorXd eval_column(const KernelSpec& kernel,
                            const Eigen::Ref<const Eigen::MatrixXd>& X,
                            const Eigen::Ref<const Eigen::VectorXd>& y) {
  if (X.rows() > 0) check_dims(X.cols(), y.size());
  Eigen::VectorXd out(X.rows());
  for (Eigen::Index p = 0; p < X.rows(); ++p) out[p] = evaluate(kernel, X.row(p), y);
  return out;
}

}  // namespace ocdmd
