#include "ocdmd/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>
#include <string>

#include "ocdmd/error.hpp"

namespace ocdmd {

std::string_view to_string(ModesTranspose t) {
  return t == ModesTranspose::Plain ? "plain" : "conjugate";
}

ModesTranspose modes_transpose_from_string(std::string_view name) {
  if (name == "plain") return ModesTranspose::Plain;
  if (name == "conjugate") return ModesTranspose::Conjugate;
  throw InvalidInput("unknown modes transpose '" + std::string(name) +
                     "' (expected plain or conjugate)");
}

std::string_view to_string(ModeOrder o) {
  return o == ModeOrder::Eigenvalue ? "eigenvalue" : "energy";
}

ModeOrder mode_order_from_string(std::string_view name) {
  if (name == "eigenvalue") return ModeOrder::Eigenvalue;
  if (name == "energy") return ModeOrder::Energy;
  throw InvalidInput("unknown mode order '" + std::string(name) +
                     "' (expected eigenvalue or energy)");
}

namespace {

void check_square(const Eigen::Ref<const Eigen::MatrixXd>& G, const char* what) {
  if (G.rows() != G.cols() || G.rows() == 0) {
    throw InvalidInput(std::string(what) + " must be a non-empty square matrix");
  }
}

Eigen::MatrixXd shifted(const Eigen::Ref<const Eigen::MatrixXd>& G, double eps_hat) {
  Eigen::MatrixXd Gr = G;
  Gr.diagonal().array() += eps_hat;
  return Gr;
}

// Re(v^H G v) accumulated in extended precision. For eigenvectors close to
// the numerical null space of G the double-precision sum loses most digits.
// v^H (G + shift I) v; the shift is added here rather than to G's diagonal,
// where rounding would eat most of a shift that small.
long double gram_norm2(const Eigen::VectorXcd& v, const Eigen::MatrixXd& G, double shift) {
  const Eigen::Index M = v.size();
  long double total = 0.0L;
  for (Eigen::Index a = 0; a < M; ++a) {
    const long double re = v[a].real();
    const long double im = v[a].imag();
    total += static_cast<long double>(shift) * (re * re + im * im);
  }
  for (Eigen::Index b = 0; b < M; ++b) {
    const long double re_b = v[b].real();
    const long double im_b = v[b].imag();
    long double col = 0.0L;
    for (Eigen::Index a = 0; a < M; ++a) {
      const long double re_a = v[a].real();
      const long double im_a = v[a].imag();
      col += static_cast<long double>(G(a, b)) * (re_a * re_b + im_a * im_b);
    }
    total += col;
  }
  return total;
}

// Descending |lambda|, then descending Im(lambda), then original index.
std::vector<Eigen::Index> eigenvalue_order(const Eigen::VectorXcd& lambda) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(lambda.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) {
    const double ax = std::abs(lambda[x]);
    const double ay = std::abs(lambda[y]);
    if (ax != ay) return ax > ay;
    return lambda[x].imag() > lambda[y].imag();
  });
  return order;
}

}  // namespace

double regularization_shift(const Eigen::Ref<const Eigen::MatrixXd>& G, double eps) {
  if (!(eps >= 0.0) || !std::isfinite(eps)) {
    throw InvalidInput("regularization eps must be finite and >= 0");
  }
  check_square(G, "Gram matrix");
  return eps * G.trace() / static_cast<double>(G.rows());
}

Eigen::MatrixXd finite_rank_representation(const Eigen::Ref<const Eigen::MatrixXd>& G,
                                           const Eigen::Ref<const Eigen::MatrixXd>& I,
                                           double eps) {
  const double eps_hat = regularization_shift(G, eps);
  if (I.rows() != G.rows() || I.cols() != G.cols()) {
    throw InvalidInput("interaction matrix shape does not match the Gram matrix");
  }
  const Eigen::LLT<Eigen::MatrixXd> llt(shifted(G, eps_hat));
  if (llt.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "Gram matrix is singular or indefinite after regularization (eps = " << eps
        << "); increase eps or use fewer, longer trajectories";
    throw SingularGramError(msg.str());
  }
  return llt.solve(I.transpose());
}

EigenPairs eigendecompose(const Eigen::Ref<const Eigen::MatrixXd>& G,
                          const Eigen::Ref<const Eigen::MatrixXd>& I_a, double eps) {
  const Eigen::MatrixXd X = finite_rank_representation(G, I_a, eps);
  const double eps_hat = regularization_shift(G, eps);
  const Eigen::Index M = X.rows();

  const Eigen::EigenSolver<Eigen::MatrixXd> solver(X, true);
  if (solver.info() != Eigen::Success) {
    throw DegenerateError("eigenvalue iteration did not converge");
  }
  const Eigen::VectorXcd lambda = solver.eigenvalues();
  const Eigen::MatrixXcd vectors = solver.eigenvectors();

  const double threshold = kDegenerateNormFactor * std::sqrt(std::max(G.trace(), 0.0));
  EigenPairs out;
  out.eps_hat = eps_hat;
  out.eigenvalues.resize(M);
  out.V.resize(M, M);
  const auto order = eigenvalue_order(lambda);
  for (Eigen::Index k = 0; k < M; ++k) {
    const Eigen::Index src = order[static_cast<std::size_t>(k)];
    const Eigen::VectorXcd v = vectors.col(src);
    const long double norm2 = gram_norm2(v, G, eps_hat);
    const long double norm = norm2 > 0.0L ? std::sqrt(norm2) : 0.0L;
    if (!(norm >= threshold) || norm == 0.0L) {
      std::ostringstream msg;
      msg << "eigenvector for lambda = " << lambda[src] << " has Gram norm "
          << static_cast<double>(norm) << " below " << threshold
          << " (orthogonal to the data span); increase eps";
      throw DegenerateError(msg.str());
    }
    out.eigenvalues[k] = lambda[src];
    for (Eigen::Index r = 0; r < M; ++r) {
      out.V(r, k) = std::complex<double>(static_cast<double>(v[r].real() / norm),
                                         static_cast<double>(v[r].imag() / norm));
    }
  }
  return out;
}

Eigen::MatrixXcd liouville_modes(const Eigen::Ref<const Eigen::MatrixXcd>& V,
                                 const Eigen::Ref<const Eigen::MatrixXd>& G,
                                 const Eigen::Ref<const Eigen::MatrixXd>& state_ints, double eps,
                                 ModesTranspose transpose) {
  const double eps_hat = regularization_shift(G, eps);
  if (V.rows() != G.rows() || V.cols() != G.rows() || state_ints.rows() != G.rows()) {
    throw InvalidInput("liouville_modes: V, G and state integrals disagree on M");
  }
  const Eigen::MatrixXcd Gr = shifted(G, eps_hat).cast<std::complex<double>>();
  const Eigen::MatrixXcd S = state_ints.cast<std::complex<double>>();
  const Eigen::MatrixXcd Vt =
      transpose == ModesTranspose::Plain ? Eigen::MatrixXcd(V.transpose()) : Eigen::MatrixXcd(V.adjoint());

  const Eigen::MatrixXcd modal_gram = Vt * Gr * V;
  const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(modal_gram);
  const double rcond = lu.rcond();
  if (!(rcond > std::numeric_limits<double>::epsilon())) {
    std::ostringstream msg;
    msg << "modal Gram matrix is singular (rcond = " << rcond
        << "); the eigenbasis is degenerate";
    throw DegenerateError(msg.str());
  }
  return lu.solve(Vt * S).transpose();
}

DecompositionModel::DecompositionModel(std::shared_ptr<const std::vector<Trajectory>> trajs,
                                       std::vector<QuadratureWeights> weights, KernelSpec kernel,
                                       double a, double eps, double eps_hat,
                                       Eigen::VectorXcd eigenvalues, Eigen::MatrixXcd V,
                                       Eigen::MatrixXcd modes, ModesTranspose transpose)
    : trajs_(std::move(trajs)),
      weights_(std::move(weights)),
      kernel_(kernel),
      a_(a),
      eps_(eps),
      eps_hat_(eps_hat),
      transpose_(transpose),
      eigenvalues_(std::move(eigenvalues)),
      V_(std::move(V)),
      modes_(std::move(modes)) {
  if (!trajs_ || trajs_->empty()) throw InvalidInput("model needs at least one trajectory");
  const auto M = static_cast<Eigen::Index>(trajs_->size());
  if (weights_.size() != trajs_->size()) throw InvalidInput("model weights do not match trajectories");
  if (eigenvalues_.size() != M || V_.rows() != M || V_.cols() != M || modes_.cols() != M) {
    throw InvalidInput("model arrays do not match the trajectory count " + std::to_string(M));
  }
  if (modes_.rows() != trajs_->front().dim()) {
    throw InvalidInput("model modes do not match the state dimension");
  }
  kernel_.validate();
}

double DecompositionModel::max_duration() const {
  double T = 0.0;
  for (const auto& t : *trajs_) T = std::max(T, t.duration());
  return T;
}

DecompositionModel DecompositionModel::permuted(const std::vector<Eigen::Index>& order) const {
  const Eigen::Index M = this->M();
  if (static_cast<Eigen::Index>(order.size()) != M) throw InvalidInput("permutation has wrong size");
  Eigen::VectorXcd lambda(M);
  Eigen::MatrixXcd V(M, M);
  Eigen::MatrixXcd modes(modes_.rows(), M);
  for (Eigen::Index k = 0; k < M; ++k) {
    const Eigen::Index src = order[static_cast<std::size_t>(k)];
    lambda[k] = eigenvalues_[src];
    V.col(k) = V_.col(src);
    modes.col(k) = modes_.col(src);
  }
  return DecompositionModel(trajs_, weights_, kernel_, a_, eps_, eps_hat_, std::move(lambda),
                            std::move(V), std::move(modes), transpose_);
}

DecompositionModel build_model(std::shared_ptr<const std::vector<Trajectory>> trajs,
                               const GramData& data, double eps, ModesTranspose transpose) {
  EigenPairs pairs = eigendecompose(data.G, data.I_a, eps);
  Eigen::MatrixXcd modes = liouville_modes(pairs.V, data.G, data.state_integrals, eps, transpose);
  return DecompositionModel(std::move(trajs), data.weights, data.kernel, data.a, eps,
                            pairs.eps_hat, std::move(pairs.eigenvalues), std::move(pairs.V),
                            std::move(modes), transpose);
}

DecompositionModel decompose(std::vector<Trajectory> trajs, const DecomposeOptions& options) {
  options.kernel.validate();
  auto shared = std::make_shared<const std::vector<Trajectory>>(std::move(trajs));
  const GramData data = assemble(*shared, options.kernel, options.a, options.rule);
  return build_model(std::move(shared), data, options.eps, options.transpose);
}

Eigen::VectorXcd eigenfunctions_at(const DecompositionModel& model,
                                   const Eigen::Ref<const Eigen::VectorXd>& x0) {
  if (x0.size() != model.dim()) {
    throw InvalidInput("x0 has dimension " + std::to_string(x0.size()) + ", model expects " +
                       std::to_string(model.dim()));
  }
  const Eigen::VectorXd gamma =
      occupation_column(model.trajectories(), model.weights(), model.kernel(), x0);
  return model.V().transpose() * gamma.cast<std::complex<double>>();
}

Eigen::VectorXd modal_energy(const DecompositionModel& model,
                             const Eigen::Ref<const Eigen::VectorXd>& x0) {
  const Eigen::VectorXcd phi = eigenfunctions_at(model, x0);
  Eigen::VectorXd energy(model.M());
  for (Eigen::Index i = 0; i < model.M(); ++i) {
    energy[i] = model.modes().col(i).norm() * std::abs(phi[i]);
  }
  return energy;
}

DecompositionModel order_by_energy(const DecompositionModel& model,
                                   const Eigen::Ref<const Eigen::VectorXd>& x0) {
  const Eigen::VectorXd energy = modal_energy(model, x0);
  const auto& lambda = model.eigenvalues();
  const auto base = eigenvalue_order(lambda);

  struct Group {
    std::vector<Eigen::Index> members;
    double energy;
  };
  std::vector<Group> groups;
  for (std::size_t k = 0; k < base.size(); ++k) {
    const Eigen::Index i = base[k];
    if (lambda[i].imag() > 0.0 && k + 1 < base.size() &&
        lambda[base[k + 1]] == std::conj(lambda[i])) {
      const Eigen::Index j = base[k + 1];
      groups.push_back({{i, j}, std::max(energy[i], energy[j])});
      ++k;
    } else {
      groups.push_back({{i}, energy[i]});
    }
  }
  std::stable_sort(groups.begin(), groups.end(),
                   [](const Group& x, const Group& y) { return x.energy > y.energy; });
  std::vector<Eigen::Index> order;
  for (const auto& g : groups) order.insert(order.end(), g.members.begin(), g.members.end());
  return model.permuted(order);
}

namespace {

Prediction predict_with(const DecompositionModel& model, const Eigen::VectorXcd& coeffs,
                        double t) {
  const auto& lambda = model.eigenvalues();
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    if (lambda[i].real() * t > kMaxExponent) {
      std::ostringstream msg;
      msg << "mode " << i << " with lambda = " << lambda[i] << " overflows at t = " << t;
      throw NumericRangeError(msg.str());
    }
  }
  Eigen::VectorXcd factors(lambda.size());
  for (Eigen::Index i = 0; i < lambda.size(); ++i) factors[i] = coeffs[i] * std::exp(lambda[i] * t);
  const Eigen::VectorXcd x = model.modes() * factors;
  return {x.real(), x.imag().norm(), t > model.max_duration()};
}

}  // namespace

Prediction predict(const DecompositionModel& model, const Eigen::Ref<const Eigen::VectorXd>& x0,
                   double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw InvalidInput("prediction time must be finite and >= 0");
  return predict_with(model, eigenfunctions_at(model, x0), t);
}

Reconstruction reconstruct(const DecompositionModel& model,
                           const Eigen::Ref<const Eigen::VectorXd>& x0,
                           const Eigen::Ref<const Eigen::VectorXd>& times) {
  if (times.size() < 2) throw InvalidInput("reconstruction needs at least 2 time points");
  for (Eigen::Index k = 0; k < times.size(); ++k) {
    if (!(times[k] >= 0.0)) throw InvalidInput("reconstruction times must be >= 0");
  }
  const Eigen::VectorXcd coeffs = eigenfunctions_at(model, x0);
  Eigen::MatrixXd states(times.size(), model.dim());
  Eigen::VectorXd residual(times.size());
  bool extrapolated = false;
  for (Eigen::Index k = 0; k < times.size(); ++k) {
    const Prediction p = predict_with(model, coeffs, times[k]);
    states.row(k) = p.state.transpose();
    residual[k] = p.imag_residual;
    extrapolated = extrapolated || p.extrapolated;
  }
  return {Trajectory(times, std::move(states)), std::move(residual), extrapolated};
}

std::vector<SpectrumEntry> spectrum(const DecompositionModel& model,
                                    const Eigen::Ref<const Eigen::VectorXd>& x0) {
  const Eigen::VectorXd energy = modal_energy(model, x0);
  std::vector<SpectrumEntry> out;
  for (Eigen::Index i = 0; i < model.M(); ++i) {
    const auto lambda = model.eigenvalues()[i];
    if (lambda.imag() < 0.0) continue;
    const double factor = lambda.imag() > 0.0 ? 2.0 : 1.0;
    out.push_back({lambda.imag() / (2.0 * std::numbers::pi), factor * energy[i]});
  }
  std::stable_sort(out.begin(), out.end(), [](const SpectrumEntry& x, const SpectrumEntry& y) {
    return x.frequency_hz < y.frequency_hz;
  });
  return out;
}

}  // namespace ocdmd
