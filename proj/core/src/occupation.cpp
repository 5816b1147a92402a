#include "ocdmd/occupation.hpp"

#include <string>

#include "ocdmd/error.hpp"
#include "parallel.hpp"

namespace ocdmd {

namespace {

void check_common(std::span<const Trajectory> trajs, std::span<const QuadratureWeights> w) {
  if (trajs.empty()) throw InvalidInput("at least one trajectory is required");
  if (w.size() != trajs.size()) {
    throw InvalidInput("got " + std::to_string(w.size()) + " weight vectors for " +
                       std::to_string(trajs.size()) + " trajectories");
  }
  const Eigen::Index n = trajs.front().dim();
  for (std::size_t i = 0; i < trajs.size(); ++i) {
    if (trajs[i].dim() != n) {
      throw InvalidInput("trajectory " + std::to_string(i) + " has state dimension " +
                         std::to_string(trajs[i].dim()) + ", expected " + std::to_string(n));
    }
    if (w[i].size() != trajs[i].samples()) {
      throw InvalidInput("weights for trajectory " + std::to_string(i) +
                         " do not match its sample count");
    }
  }
}

void check_point(const Trajectory& traj, Eigen::Index size) {
  if (size != traj.dim()) {
    throw InvalidInput("evaluation point has dimension " + std::to_string(size) +
                       ", trajectory states have " + std::to_string(traj.dim()));
  }
}

}  // namespace

std::vector<QuadratureWeights> trajectory_weights(std::span<const Trajectory> trajs,
                                                  QuadratureRule rule) {
  std::vector<QuadratureWeights> out;
  out.reserve(trajs.size());
  for (const auto& t : trajs) out.push_back(weights(t.times(), rule));
  return out;
}

double occupation_eval(const Trajectory& traj, const QuadratureWeights& w,
                       const KernelSpec& kernel, const Eigen::Ref<const Eigen::VectorXd>& x) {
  check_point(traj, x.size());
  return integrate(w, eval_column(kernel, traj.states(), x));
}

double occupation_eval(const Trajectory& traj, const KernelSpec& kernel,
                       const Eigen::Ref<const Eigen::VectorXd>& x, QuadratureRule rule) {
  return occupation_eval(traj, weights(traj.times(), rule), kernel, x);
}

Eigen::VectorXd occupation_column(std::span<const Trajectory> trajs,
                                  std::span<const QuadratureWeights> w, const KernelSpec& kernel,
                                  const Eigen::Ref<const Eigen::VectorXd>& x) {
  check_common(trajs, w);
  const auto M = static_cast<Eigen::Index>(trajs.size());
  Eigen::VectorXd out(M);
  for (Eigen::Index j = 0; j < M; ++j) out[j] = occupation_eval(trajs[j], w[j], kernel, x);
  return out;
}

Eigen::MatrixXd gram_matrix(std::span<const Trajectory> trajs,
                            std::span<const QuadratureWeights> w, const KernelSpec& kernel) {
  check_common(trajs, w);
  kernel.validate();
  const auto M = static_cast<Eigen::Index>(trajs.size());
  Eigen::MatrixXd G(M, M);

  // One writer per entry, fixed contraction order: results do not depend on
  // the number of workers.
  detail::parallel_for(M, [&](Eigen::Index i) {
    for (Eigen::Index j = 0; j < M; ++j) {
      const Eigen::MatrixXd K = eval_matrix(kernel, trajs[i].states(), trajs[j].states());
      const Eigen::VectorXd Kw = K * w[j].weights;
      G(i, j) = w[i].weights.dot(Kw);
    }
  });
  return (0.5 * (G + G.transpose())).eval();
}

Eigen::MatrixXd gram_matrix(std::span<const Trajectory> trajs, const KernelSpec& kernel,
                            QuadratureRule rule) {
  const auto w = trajectory_weights(trajs, rule);
  return gram_matrix(trajs, w, kernel);
}

Eigen::MatrixXd interaction_matrix(std::span<const Trajectory> trajs,
                                   std::span<const QuadratureWeights> w,
                                   const KernelSpec& kernel, double a) {
  if (!(a > 0.0 && a <= 1.0)) {
    throw InvalidInput("scaling parameter a must lie in (0, 1], got " + std::to_string(a));
  }
  check_common(trajs, w);
  kernel.validate();
  const auto M = static_cast<Eigen::Index>(trajs.size());

  std::vector<Eigen::VectorXd> ends(trajs.size());
  std::vector<Eigen::VectorXd> starts(trajs.size());
  for (std::size_t j = 0; j < trajs.size(); ++j) {
    ends[j] = a * trajs[j].end();
    starts[j] = a * trajs[j].start();
  }

  Eigen::MatrixXd I(M, M);
  detail::parallel_for(M, [&](Eigen::Index i) {
    for (Eigen::Index j = 0; j < M; ++j) {
      I(i, j) = occupation_eval(trajs[i], w[i], kernel, ends[j]) -
                occupation_eval(trajs[i], w[i], kernel, starts[j]);
    }
  });
  return I;
}

Eigen::MatrixXd interaction_matrix(std::span<const Trajectory> trajs, const KernelSpec& kernel,
                                   double a, QuadratureRule rule) {
  const auto w = trajectory_weights(trajs, rule);
  return interaction_matrix(trajs, w, kernel, a);
}

Eigen::MatrixXd state_integrals(std::span<const Trajectory> trajs,
                                std::span<const QuadratureWeights> w) {
  check_common(trajs, w);
  const auto M = static_cast<Eigen::Index>(trajs.size());
  Eigen::MatrixXd S(M, trajs.front().dim());
  for (Eigen::Index i = 0; i < M; ++i) {
    for (Eigen::Index c = 0; c < S.cols(); ++c) {
      S(i, c) = integrate(w[i], trajs[i].states().col(c));
    }
  }
  return S;
}

Eigen::MatrixXd state_integrals(std::span<const Trajectory> trajs, QuadratureRule rule) {
  const auto w = trajectory_weights(trajs, rule);
  return state_integrals(trajs, w);
}

GramData assemble(std::span<const Trajectory> trajs, const KernelSpec& kernel, double a,
                  QuadratureRule rule) {
  GramData data;
  data.kernel = kernel;
  data.a = a;
  data.weights = trajectory_weights(trajs, rule);
  data.G = gram_matrix(trajs, data.weights, kernel);
  data.I_a = interaction_matrix(trajs, data.weights, kernel, a);
  data.state_integrals = state_integrals(trajs, data.weights);
  return data;
}

double projection_error(std::span<const Trajectory> trajs, std::span<const QuadratureWeights> w,
                        const KernelSpec& kernel, const Eigen::Ref<const Eigen::VectorXd>& y,
                        double eps) {
  if (!(eps >= 0.0)) throw InvalidInput("regularization eps must be >= 0");
  const Eigen::MatrixXd G = gram_matrix(trajs, w, kernel);
  const Eigen::VectorXd k = occupation_column(trajs, w, kernel, y);
  const auto M = static_cast<double>(G.rows());
  const double eps_hat = eps * G.trace() / M;
  Eigen::MatrixXd Gr = G;
  Gr.diagonal().array() += eps_hat;
  const Eigen::LLT<Eigen::MatrixXd> llt(Gr);
  if (llt.info() != Eigen::Success) {
    throw SingularGramError("Gram matrix is not positive definite; increase eps");
  }
  return eval(kernel, y, y) - k.dot(llt.solve(k));
}

}  // namespace ocdmd
