#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "ocdmd/error.hpp"
#include "ocdmd/trajectory.hpp"
#include "support/testing.hpp"

using namespace ocdmd;
using ocdmd::testing::TempDir;
using ocdmd::testing::write_text;

namespace {

Trajectory ramp(Eigen::Index samples, Eigen::Index dim = 2) {
  Eigen::VectorXd t = Eigen::VectorXd::LinSpaced(samples, 0.0, 0.1 * (samples - 1));
  Eigen::MatrixXd x(samples, dim);
  for (Eigen::Index r = 0; r < samples; ++r)
    for (Eigen::Index c = 0; c < dim; ++c) x(r, c) = static_cast<double>(r * 10 + c);
  return Trajectory(t, x);
}

template <typename Fn>
std::string error_message(Fn&& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("trajectory invariants") {
  CHECK_THROWS_AS(Trajectory(Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Zero(1, 2)),
                  InvalidInput);
  CHECK_THROWS_AS(Trajectory(Eigen::Vector2d(0.0, 0.0), Eigen::MatrixXd::Zero(2, 2)),
                  InvalidInput);
  CHECK_THROWS_AS(Trajectory(Eigen::Vector2d(0.0, 1.0), Eigen::MatrixXd::Zero(3, 2)),
                  InvalidInput);
  Eigen::MatrixXd bad = Eigen::MatrixXd::Zero(2, 1);
  bad(1, 0) = std::nan("");
  CHECK_THROWS_AS(Trajectory(Eigen::Vector2d(0.0, 1.0), bad), InvalidInput);
}

TEST_CASE("load a single file") {
  TempDir dir("traj");
  write_text(dir / "a.csv", "t,x1,x2\n0,1,2\n0.5,1.1,2.2\n");
  auto trajs = load_trajectories(dir / "a.csv", InputLayout::OneFilePerTrajectory);
  REQUIRE(trajs.size() == 1);
  CHECK(trajs[0].dim() == 2);
  CHECK(trajs[0].samples() == 2);
  CHECK(trajs[0].duration() == 0.5);
  CHECK(trajs[0].states()(1, 1) == 2.2);
}

TEST_CASE("times are rebased to zero") {
  TempDir dir("traj");
  write_text(dir / "a.csv", "t,x1\n2.0,1\n2.5,3\n3.0,4\n");
  auto trajs = load_trajectories(dir / "a.csv", InputLayout::OneFilePerTrajectory);
  CHECK(trajs[0].times()[0] == 0.0);
  CHECK(trajs[0].times()[2] == 1.0);
}

TEST_CASE("parse errors name file and line") {
  TempDir dir("traj");
  write_text(dir / "dec.csv", "t,x1\n1.0,0\n0.5,0\n");
  const std::string msg = error_message(
      [&] { load_trajectories(dir / "dec.csv", InputLayout::OneFilePerTrajectory); });
  CHECK(msg.find("non-increasing time") != std::string::npos);
  CHECK(msg.find("dec.csv:3") != std::string::npos);
  CHECK_THROWS_AS(load_trajectories(dir / "dec.csv", InputLayout::OneFilePerTrajectory),
                  ParseError);

  write_text(dir / "nan.csv", "t,x1\n0,1\n1,abc\n");
  CHECK(error_message([&] {
          load_trajectories(dir / "nan.csv", InputLayout::OneFilePerTrajectory);
        }).find("nan.csv:3") != std::string::npos);

  write_text(dir / "ragged.csv", "t,x1,x2\n0,1,2\n1,2\n");
  CHECK_THROWS_AS(load_trajectories(dir / "ragged.csv", InputLayout::OneFilePerTrajectory),
                  ParseError);

  write_text(dir / "short.csv", "t,x1\n0,1\n");
  CHECK_THROWS_AS(load_trajectories(dir / "short.csv", InputLayout::OneFilePerTrajectory),
                  ParseError);

  write_text(dir / "header.csv", "time,x1\n0,1\n1,2\n");
  CHECK_THROWS_AS(load_trajectories(dir / "header.csv", InputLayout::OneFilePerTrajectory),
                  ParseError);

  CHECK_THROWS_AS(load_trajectories(dir / "missing.csv", InputLayout::OneFilePerTrajectory),
                  IoError);
}

TEST_CASE("directory files load in lexicographic order") {
  TempDir dir("traj");
  write_text(dir / "b.csv", "t,x1\n0,2\n1,2\n");
  write_text(dir / "c.csv", "t,x1\n0,3\n1,3\n");
  write_text(dir / "a.csv", "t,x1\n0,1\n1,1\n");
  write_text(dir / "notes.txt", "not a trajectory\n");
  auto trajs = load_trajectories(dir.path(), InputLayout::OneFilePerTrajectory);
  REQUIRE(trajs.size() == 3);
  CHECK(trajs[0].states()(0, 0) == 1.0);
  CHECK(trajs[1].states()(0, 0) == 2.0);
  CHECK(trajs[2].states()(0, 0) == 3.0);

  TempDir empty("traj-empty");
  CHECK(load_trajectories(empty.path(), InputLayout::OneFilePerTrajectory).empty());
}

TEST_CASE("single file with trajectory ids") {
  TempDir dir("traj");
  write_text(dir / "all.csv",
             "traj_id,t,x1\n7,0,1\n7,1,2\n7,2,3\n3,5,10\n3,6,11\n");
  auto trajs = load_trajectories(dir / "all.csv", InputLayout::SingleFileWithId);
  REQUIRE(trajs.size() == 2);
  CHECK(trajs[0].samples() == 3);
  CHECK(trajs[1].states()(0, 0) == 10.0);
  CHECK(trajs[1].times()[0] == 0.0);

  write_text(dir / "split.csv", "traj_id,t,x1\n1,0,1\n1,1,2\n2,0,1\n2,1,1\n1,2,3\n");
  CHECK(error_message([&] {
          load_trajectories(dir / "split.csv", InputLayout::SingleFileWithId);
        }).find("split.csv:6") != std::string::npos);
}

TEST_CASE("save and load round-trip exactly") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> step(1e-3, 1.0);
  std::uniform_real_distribution<double> value(-1e6, 1e6);
  std::uniform_real_distribution<double> expo(-300.0, 300.0);
  TempDir dir("roundtrip");
  for (int trial = 0; trial < 25; ++trial) {
    const Eigen::Index n = 2 + trial % 7, dim = 1 + trial % 4;
    Eigen::VectorXd t(n);
    t[0] = 0.0;
    for (Eigen::Index k = 1; k < n; ++k) t[k] = t[k - 1] + step(rng);
    Eigen::MatrixXd x(n, dim);
    for (Eigen::Index r = 0; r < n; ++r)
      for (Eigen::Index c = 0; c < dim; ++c)
        x(r, c) = (c % 2 == 0) ? value(rng) : std::pow(10.0, expo(rng));
    Trajectory traj(t, x);
    const auto path = dir / ("t" + std::to_string(trial) + ".csv");
    save_trajectory(path, traj);
    auto back = load_trajectories(path, InputLayout::OneFilePerTrajectory);
    REQUIRE(back.size() == 1);
    CHECK(back[0].times() == traj.times());
    CHECK(back[0].states() == traj.states());
  }
}

TEST_CASE("segment window counts") {
  CHECK(segment(ramp(151), 5).size() == 30);
  CHECK(segment(ramp(7), 3).size() == 2);
  CHECK(segment(ramp(151), 5, 1).size() == 147);

  auto whole = segment(ramp(10), 10);
  REQUIRE(whole.size() == 1);
  CHECK(whole[0].states() == ramp(10).states());
  CHECK(whole[0].times() == ramp(10).rebased().times());

  // 8 samples, L = 3: windows 3, 3 and a 2-sample tail
  auto tail = segment(ramp(8), 3);
  REQUIRE(tail.size() == 3);
  CHECK(tail[2].samples() == 2);

  CHECK_THROWS_AS(segment(ramp(10), 1), InvalidInput);
  CHECK_THROWS_AS(segment(ramp(4), 5), InvalidInput);
}

TEST_CASE("segments rebase and concatenate back to the input") {
  for (Eigen::Index n : {2, 3, 10, 37, 151}) {
    for (Eigen::Index L : {2, 3, 5, 10}) {
      if (L > n) continue;
      CAPTURE(n);
      CAPTURE(L);
      const Trajectory traj = ramp(n);
      auto pieces = segment(traj, L);
      Eigen::Index row = 0;
      for (const auto& p : pieces) {
        CHECK(p.times()[0] == 0.0);
        CHECK(p.states() == traj.states().middleRows(row, p.samples()));
        row += p.samples();
      }
      const Eigen::Index dropped = n - row;
      CHECK((dropped == 0 || dropped == 1));
      CHECK(dropped == ((n % L == 1) ? 1 : 0));
    }
  }
}

TEST_CASE("simulate analytic cases") {
  Eigen::Vector2d x0(1.0, 2.0);
  auto still = simulate(LinearSystem{Eigen::Matrix2d::Zero()}, x0, 1.0, 0.1);
  CHECK(still.samples() == 11);
  for (Eigen::Index r = 0; r < still.samples(); ++r) CHECK(still.states().row(r) == x0.transpose());

  Eigen::Matrix2d rot;
  rot << 0, 1, -1, 0;
  auto orbit = simulate(LinearSystem{rot}, Eigen::Vector2d(1.0, 0.0), 2 * std::numbers::pi, 0.001);
  CHECK(orbit.times()[orbit.samples() - 1] == 2 * std::numbers::pi);
  CHECK((orbit.end() - Eigen::Vector2d(1.0, 0.0)).norm() < 1e-6);

  Eigen::MatrixXd decay(1, 1);
  decay << -1.0;
  auto d = simulate(LinearSystem{decay}, Eigen::VectorXd::Ones(1), 1.0, 0.01);
  CHECK(std::abs(d.end()[0] - 0.36787944117144232160) < 1e-6);
  CHECK(d.samples() == 101);
}

TEST_CASE("simulate converges at fourth order") {
  Eigen::Matrix2d rot;
  rot << 0, 1, -1, 0;
  Eigen::Vector2d exact(std::cos(1.0), -std::sin(1.0));
  auto err = [&](double dt) {
    return (simulate(LinearSystem{rot}, Eigen::Vector2d(1.0, 0.0), 1.0, dt).end() - exact).norm();
  };
  for (double dt : {0.1, 0.05, 0.025}) {
    CAPTURE(dt);
    const double ratio = err(dt) / err(dt / 2.0);
    CHECK(ratio >= 12.0);
    CHECK(ratio <= 20.0);
  }
}

TEST_CASE("simulate reports divergence and bad arguments") {
  CustomField blowup{1, [](const Eigen::VectorXd& x) -> Eigen::VectorXd {
                       return (x.array() * x.array() * x.array()).matrix() * 1e30;
                     }};
  try {
    simulate(blowup, Eigen::VectorXd::Constant(1, 10.0), 1.0, 0.1);
    FAIL("expected divergence");
  } catch (const DivergenceError& e) {
    CHECK(e.time() > 0.0);
    CHECK(e.time() <= 1.0);
  }

  Eigen::Matrix2d rot;
  rot << 0, 1, -1, 0;
  CHECK_THROWS_AS(simulate(LinearSystem{rot}, Eigen::Vector2d(1, 0), 0.0, 0.1), InvalidInput);
  CHECK_THROWS_AS(simulate(LinearSystem{rot}, Eigen::Vector2d(1, 0), 1.0, 2.0), InvalidInput);
  CHECK_THROWS_AS(simulate(LinearSystem{rot}, Eigen::Vector3d(1, 0, 0), 1.0, 0.1), InvalidInput);

  auto vdp = simulate(VanDerPol{1.0}, Eigen::Vector2d(2.0, 0.0), 1.0, 0.01);
  CHECK(vdp.dim() == 2);
  CHECK(vdp.states().allFinite());
}
