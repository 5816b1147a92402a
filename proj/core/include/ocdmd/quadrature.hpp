#pragma once

#include <string_view>

#include <Eigen/Dense>

namespace ocdmd {

enum class QuadratureRule { Auto, Simpson, Trapezoid };

// What was actually applied; Simpson on an odd interval count closes the
// last interval with a trapezoid.
enum class AppliedRule { Simpson, Trapezoid, SimpsonWithTrapezoidTail };

std::string_view to_string(QuadratureRule rule);
std::string_view to_string(AppliedRule rule);
QuadratureRule quadrature_rule_from_string(std::string_view name);

// Grids whose spacings deviate from the mean by less than this (relative)
// count as uniform.
inline constexpr double kUniformSpacingTolerance = 1e-9;

/// Per-sample integration weights for one time grid. Weights are
/// non-negative and sum to the grid duration up to rounding.
struct QuadratureWeights {
  Eigen::VectorXd weights;
  AppliedRule rule_used = AppliedRule::Trapezoid;

  Eigen::Index size() const { return weights.size(); }
};

bool is_uniform(const Eigen::Ref<const Eigen::VectorXd>& times);

QuadratureWeights weights(const Eigen::Ref<const Eigen::VectorXd>& times,
                          QuadratureRule rule = QuadratureRule::Auto);

double integrate(const QuadratureWeights& w,
                 const Eigen::Ref<const Eigen::VectorXd>& samples);

}  // namespace ocdmd
