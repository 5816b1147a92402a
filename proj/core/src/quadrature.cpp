#include "ocdmd/quadrature.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "ocdmd/error.hpp"

namespace ocdmd {

namespace {

// Index of the gap deviating most from the mean spacing, or -1 when every
// gap is within tolerance.
Eigen::Index worst_nonuniform_gap(const Eigen::Ref<const Eigen::VectorXd>& t) {
  const Eigen::Index intervals = t.size() - 1;
  const double mean = (t[intervals] - t[0]) / static_cast<double>(intervals);
  Eigen::Index worst = -1;
  double worst_dev = 0.0;
  for (Eigen::Index k = 0; k < intervals; ++k) {
    const double dev = std::abs((t[k + 1] - t[k]) - mean);
    if (dev >= kUniformSpacingTolerance * mean && dev > worst_dev) {
      worst = k;
      worst_dev = dev;
    }
  }
  return worst;
}

void check_grid(const Eigen::Ref<const Eigen::VectorXd>& times) {
  if (times.size() < 2) {
    throw InvalidInput("quadrature needs at least 2 time points, got " +
                       std::to_string(times.size()));
  }
  for (Eigen::Index k = 0; k + 1 < times.size(); ++k) {
    if (!(times[k + 1] > times[k])) {
      throw InvalidInput("quadrature times must be strictly increasing (index " +
                         std::to_string(k + 1) + ")");
    }
  }
}

Eigen::VectorXd trapezoid(const Eigen::Ref<const Eigen::VectorXd>& t) {
  const Eigen::Index n = t.size();
  Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    const double half = 0.5 * (t[k + 1] - t[k]);
    w[k] += half;
    w[k + 1] += half;
  }
  return w;
}

// Composite Simpson over the first `intervals` (even) intervals of a uniform
// grid, accumulated into w. Panel widths use actual sample times so that the
// weight sum telescopes to the covered duration.
void add_simpson(const Eigen::Ref<const Eigen::VectorXd>& t, Eigen::Index intervals,
                 Eigen::VectorXd& w) {
  for (Eigen::Index k = 0; k + 2 <= intervals; k += 2) {
    const double panel = (t[k + 2] - t[k]) / 6.0;
    w[k] += panel;
    w[k + 1] += 4.0 * panel;
    w[k + 2] += panel;
  }
}

}  // namespace

std::string_view to_string(QuadratureRule rule) {
  switch (rule) {
    case QuadratureRule::Auto:
      return "auto";
    case QuadratureRule::Simpson:
      return "simpson";
    case QuadratureRule::Trapezoid:
      return "trapezoid";
  }
  return "unknown";
}

std::string_view to_string(AppliedRule rule) {
  switch (rule) {
    case AppliedRule::Simpson:
      return "simpson";
    case AppliedRule::Trapezoid:
      return "trapezoid";
    case AppliedRule::SimpsonWithTrapezoidTail:
      return "simpson+trapezoid_tail";
  }
  return "unknown";
}

QuadratureRule quadrature_rule_from_string(std::string_view name) {
  if (name == "auto") return QuadratureRule::Auto;
  if (name == "simpson") return QuadratureRule::Simpson;
  if (name == "trapezoid") return QuadratureRule::Trapezoid;
  throw InvalidInput("unknown quadrature rule '" + std::string(name) +
                     "' (expected auto, simpson or trapezoid)");
}

bool is_uniform(const Eigen::Ref<const Eigen::VectorXd>& times) {
  return times.size() >= 2 && worst_nonuniform_gap(times) < 0;
}

QuadratureWeights weights(const Eigen::Ref<const Eigen::VectorXd>& times,
                          QuadratureRule rule) {
  check_grid(times);
  const Eigen::Index intervals = times.size() - 1;

  bool use_simpson = false;
  if (rule == QuadratureRule::Simpson) {
    const Eigen::Index gap = worst_nonuniform_gap(times);
    if (gap >= 0) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "Simpson rule requires uniform spacing; gap " << gap << " ["
          << times[gap] << ", " << times[gap + 1] << "] deviates from the mean";
      throw InvalidInput(msg.str());
    }
    use_simpson = intervals >= 2;
  } else if (rule == QuadratureRule::Auto) {
    use_simpson = intervals >= 2 && is_uniform(times);
  }

  if (!use_simpson) return {trapezoid(times), AppliedRule::Trapezoid};

  Eigen::VectorXd w = Eigen::VectorXd::Zero(times.size());
  if (intervals % 2 == 0) {
    add_simpson(times, intervals, w);
    return {std::move(w), AppliedRule::Simpson};
  }
  add_simpson(times, intervals - 1, w);
  const double half = 0.5 * (times[intervals] - times[intervals - 1]);
  w[intervals - 1] += half;
  w[intervals] += half;
  return {std::move(w), AppliedRule::SimpsonWithTrapezoidTail};
}

double integrate(const QuadratureWeights& w,
                 const Eigen::Ref<const Eigen::VectorXd>& samples) {
  if (w.size() != samples.size()) {
    throw InvalidInput("integrate: " + std::to_string(samples.size()) +
                       " samples for " + std::to_string(w.size()) + " weights");
  }
  double sum = 0.0;
  for (Eigen::Index k = 0; k < samples.size(); ++k) sum += w.weights[k] * samples[k];
  return sum;
}

}  // namespace ocdmd
