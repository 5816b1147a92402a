#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "ocdmd/error.hpp"
#include "ocdmd/occupation.hpp"
#include "support/testing.hpp"

using namespace ocdmd;
using ocdmd::testing::linspace;

namespace {

Trajectory constant(const Eigen::VectorXd& c, double T, Eigen::Index samples = 21) {
  Eigen::MatrixXd x = c.transpose().replicate(samples, 1);
  return Trajectory(linspace(0.0, T, samples), x);
}

Trajectory line(Eigen::Index samples, Eigen::Index dim = 1) {
  Eigen::VectorXd t = linspace(0.0, 1.0, samples);
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(samples, dim);
  x.col(0) = t;
  return Trajectory(t, x);
}

Trajectory circle(Eigen::Index samples, double phase = 0.0, double radius = 1.0) {
  Eigen::VectorXd t = linspace(0.0, 2.0 * std::numbers::pi, samples);
  Eigen::MatrixXd x(samples, 2);
  for (Eigen::Index k = 0; k < samples; ++k) {
    x(k, 0) = radius * std::cos(t[k] + phase);
    x(k, 1) = -radius * std::sin(t[k] + phase);
  }
  // close the loop exactly so start and end states coincide
  x.row(samples - 1) = x.row(0);
  return Trajectory(t, x);
}

// Smooth random curves: low-order trigonometric paths with random coefficients.
std::vector<Trajectory> random_curves(std::mt19937_64& rng, int count, Eigen::Index samples,
                                      bool uniform = true) {
  std::uniform_real_distribution<double> c(-1.0, 1.0), dur(0.5, 2.0), jitter(0.2, 1.8);
  std::vector<Trajectory> out;
  for (int i = 0; i < count; ++i) {
    const double T = dur(rng);
    Eigen::VectorXd t(samples);
    if (uniform) {
      t = linspace(0.0, T, samples);
    } else {
      t[0] = 0.0;
      for (Eigen::Index k = 1; k < samples; ++k) t[k] = t[k - 1] + jitter(rng) * T / samples;
    }
    double a[2][3];
    for (auto& row : a)
      for (double& v : row) v = c(rng);
    Eigen::MatrixXd x(samples, 2);
    for (Eigen::Index k = 0; k < samples; ++k) {
      for (int d = 0; d < 2; ++d) {
        x(k, d) = a[d][0] + a[d][1] * std::sin(2.0 * t[k]) + a[d][2] * std::cos(3.0 * t[k]);
      }
    }
    out.emplace_back(t, x);
  }
  return out;
}

}  // namespace

TEST_CASE("occupation kernel of a constant trajectory") {
  Eigen::Vector2d c(0.3, -0.4);
  std::mt19937_64 rng(3);
  for (auto rule : {QuadratureRule::Auto, QuadratureRule::Simpson, QuadratureRule::Trapezoid}) {
    for (const auto& k : {KernelSpec::gaussian(0.8), KernelSpec::exp_dot(1.5)}) {
      const Trajectory traj = constant(c, 1.7);
      for (int trial = 0; trial < 10; ++trial) {
        Eigen::VectorXd x = ocdmd::testing::random_matrix(rng, 2, 1);
        const double expected = 1.7 * eval(k, x, c);
        CHECK(occupation_eval(traj, k, x, rule) == doctest::Approx(expected).epsilon(1e-13));
      }
    }
  }
  const Trajectory origin = constant(Eigen::Vector2d::Zero(), 2.0);
  CHECK(occupation_eval(origin, KernelSpec::gaussian(1.0), Eigen::Vector2d::Zero()) ==
        doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("occupation kernel of a line matches the error function") {
  // (sqrt(pi)/2) erf(1) = 0.746824132812427025399467436132
  const double oracle = 0.746824132812427025399;
  const double value =
      occupation_eval(line(1001, 2), KernelSpec::gaussian(1.0), Eigen::Vector2d::Zero());
  CHECK(std::abs(value - oracle) < 1e-6);
  CHECK(std::abs(oracle - std::sqrt(std::numbers::pi) / 2.0 * std::erf(1.0)) < 1e-15);

  CHECK_THROWS_AS(occupation_eval(line(11, 2), KernelSpec::gaussian(1.0), Eigen::Vector3d::Zero()),
                  InvalidInput);
}

TEST_CASE("Gram matrix of constant trajectories") {
  std::vector<Trajectory> trajs{constant(Eigen::Vector2d(0.1, 0.2), 1.5),
                                constant(Eigen::Vector2d(-0.5, 0.7), 0.4, 9)};
  for (const auto& k : {KernelSpec::gaussian(1.0), KernelSpec::exp_dot(2.0)}) {
    Eigen::MatrixXd G = gram_matrix(trajs, k);
    const double T[2] = {1.5, 0.4};
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        const double expected = T[i] * T[j] * eval(k, trajs[i].start(), trajs[j].start());
        CHECK(G(i, j) == doctest::Approx(expected).epsilon(1e-13));
      }
    }
  }
  std::vector<Trajectory> single{line(5)};
  Eigen::MatrixXd g1 = gram_matrix(single, KernelSpec::gaussian(1.0));
  REQUIRE(g1.rows() == 1);
  CHECK(g1(0, 0) > 0.0);
}

TEST_CASE("Gram entry of a line matches a brute-force double integral") {
  std::vector<Trajectory> trajs{line(2001)};
  const double g = gram_matrix(trajs, KernelSpec::gaussian(1.0))(0, 0);

  // midpoint rule on a 4001 x 4001 grid of [0,1]^2
  const int n = 4001;
  const double h = 1.0 / n;
  long double sum = 0.0L;
  for (int p = 0; p < n; ++p) {
    const double s = (p + 0.5) * h;
    double row = 0.0;
    for (int q = 0; q < n; ++q) {
      const double d = s - (q + 0.5) * h;
      row += std::exp(-d * d);
    }
    sum += row;
  }
  const double brute = static_cast<double>(sum) * h * h;
  CHECK(std::abs(g - brute) < 1e-6);
  // 0.861527706796296372394458642425 from adaptive high-precision quadrature
  CHECK(std::abs(g - 0.8615277067962963724) < 1e-6);
}

TEST_CASE("interaction matrix null cases") {
  const auto k = KernelSpec::gaussian(1.0);
  std::vector<Trajectory> loops{circle(401), circle(301, 0.7), line(51, 2)};
  Eigen::MatrixXd I = interaction_matrix(loops, k);
  for (Eigen::Index i = 0; i < 3; ++i) {
    CHECK(I(i, 0) == 0.0);
    CHECK(I(i, 1) == 0.0);
  }
  CHECK(I.col(2).cwiseAbs().maxCoeff() > 0.0);

  std::vector<Trajectory> still{constant(Eigen::Vector2d(1, 2), 1.0),
                                constant(Eigen::Vector2d(0, 0), 3.0)};
  CHECK(interaction_matrix(still, k).isZero(0.0));

  std::vector<Trajectory> one{line(1001)};
  CHECK(std::abs(interaction_matrix(one, k)(0, 0)) < 1e-10);
}

TEST_CASE("interaction matrix scaling") {
  std::mt19937_64 rng(41);
  auto trajs = random_curves(rng, 4, 101);
  const auto k = KernelSpec::gaussian(1.0);
  const auto w = trajectory_weights(trajs);

  CHECK_THROWS_AS(interaction_matrix(trajs, w, k, 0.0), InvalidInput);
  CHECK_THROWS_AS(interaction_matrix(trajs, w, k, 1.5), InvalidInput);
  CHECK_THROWS_AS(interaction_matrix(trajs, w, k, -0.2), InvalidInput);

  // a = 1 is the unscaled difference of occupation kernels, bit for bit
  Eigen::MatrixXd I1 = interaction_matrix(trajs, w, k, 1.0);
  for (Eigen::Index i = 0; i < 4; ++i) {
    for (Eigen::Index j = 0; j < 4; ++j) {
      const double unscaled = occupation_eval(trajs[i], w[i], k, trajs[j].end()) -
                              occupation_eval(trajs[i], w[i], k, trajs[j].start());
      CHECK(I1(i, j) == unscaled);
    }
  }

  // Lipschitz in a: estimate L from a coarse sweep and check finer steps obey it
  auto diff = [&](double a, double b) {
    return (interaction_matrix(trajs, w, k, a) - interaction_matrix(trajs, w, k, b))
        .cwiseAbs()
        .maxCoeff();
  };
  double L = 0.0;
  for (int s = 0; s < 5; ++s) L = std::max(L, diff(0.5 + 0.1 * s, 0.6 + 0.1 * s) / 0.1);
  for (int s = 0; s < 7; ++s) {
    const double a = 0.55 + 0.06 * s;
    CHECK(diff(a, a + 0.01) <= 2.0 * L * 0.01);
  }

  CHECK(diff(0.999, 1.0) < diff(0.9, 1.0));
}

TEST_CASE("state integrals") {
  Eigen::Vector2d c(0.25, -3.0);
  Eigen::MatrixXd S = state_integrals(std::vector<Trajectory>{constant(c, 2.5)});
  CHECK(S(0, 0) == doctest::Approx(0.625).epsilon(1e-14));
  CHECK(S(0, 1) == doctest::Approx(-7.5).epsilon(1e-14));

  CHECK(state_integrals(std::vector<Trajectory>{line(11)}, QuadratureRule::Simpson)(0, 0) == 0.5);

  Eigen::MatrixXd loop = state_integrals(std::vector<Trajectory>{circle(2001)});
  CHECK(loop.cwiseAbs().maxCoeff() < 1e-8);

  std::vector<Trajectory> mixed{line(5, 1), line(5, 2)};
  CHECK_THROWS_AS(state_integrals(mixed), InvalidInput);
  CHECK_THROWS_AS(gram_matrix(mixed, KernelSpec::gaussian(1.0)), InvalidInput);
}

TEST_CASE("Gram entries equal occupation kernels integrated along the other path") {
  std::mt19937_64 rng(8);
  auto trajs = random_curves(rng, 5, 61, false);
  for (const auto& k : {KernelSpec::gaussian(0.6), KernelSpec::exp_dot(2.0)}) {
    const auto w = trajectory_weights(trajs);
    Eigen::MatrixXd G = gram_matrix(trajs, w, k);
    for (std::size_t i = 0; i < trajs.size(); ++i) {
      for (std::size_t j = 0; j < trajs.size(); ++j) {
        double along = 0.0;
        for (Eigen::Index q = 0; q < trajs[j].samples(); ++q) {
          along += w[j].weights[q] *
                   occupation_eval(trajs[i], w[i], k, trajs[j].states().row(q).transpose());
        }
        CHECK(std::abs(G(i, j) - along) < 1e-10);
      }
    }
  }
}

TEST_CASE("Gram matrix is symmetric and positive semidefinite") {
  std::mt19937_64 rng(123);
  for (int suite = 0; suite < 10; ++suite) {
    auto trajs = random_curves(rng, 2 + suite, 31 + 10 * suite, suite % 2 == 0);
    for (const auto& k : {KernelSpec::gaussian(0.5 + suite), KernelSpec::exp_dot(3.0)}) {
      Eigen::MatrixXd G = gram_matrix(trajs, k);
      CHECK(G == G.transpose());
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G, Eigen::EigenvaluesOnly);
      CHECK(es.eigenvalues().minCoeff() >= -1e-8 * G.trace() / static_cast<double>(G.rows()));
    }
  }
}

TEST_CASE("assembly does not depend on the worker count") {
#ifdef _OPENMP
  std::mt19937_64 rng(77);
  auto trajs = random_curves(rng, 12, 81);
  const auto k = KernelSpec::gaussian(1.0);
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  GramData serial = assemble(trajs, k, 0.9);
  omp_set_num_threads(4);
  GramData parallel = assemble(trajs, k, 0.9);
  omp_set_num_threads(saved);
  CHECK(serial.G == parallel.G);
  CHECK(serial.I_a == parallel.I_a);
  CHECK(serial.state_integrals == parallel.state_integrals);
#endif
}

TEST_CASE("projection error shrinks as trajectories are added") {
  std::mt19937_64 rng(5);
  auto trajs = random_curves(rng, 12, 41);
  const auto k = KernelSpec::gaussian(1.0);
  const auto w = trajectory_weights(trajs);
  const Eigen::VectorXd y = trajs[3].states().row(20).transpose();
  double previous = eval(k, y, y);
  for (std::size_t m = 1; m <= trajs.size(); ++m) {
    const double e = projection_error(std::span(trajs).first(m), std::span(w).first(m), k, y,
                                      1e-12);
    CHECK(e <= previous + 1e-10);
    previous = e;
  }
  CHECK(previous < 0.5 * projection_error(std::span(trajs).first(1), std::span(w).first(1), k,
                                          y, 1e-12));
}
