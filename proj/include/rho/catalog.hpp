#pragma once

#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rho/density.hpp"
#include "rho/quadrature.hpp"

// Validated constructors for the density catalog. Every factory (except the
// pathological version, which is a density w.r.t. N(0,1)) checks unit mass by
// quadrature to 1e-7.
namespace rho {

inline constexpr double kNormalizationTolerance = 1e-7;

inline std::size_t validation_cells(const DensitySpec& spec) {
  if (spec.is<PiecewiseConstant>() || spec.is<UniformInterval>()) {
    // exact under the midpoint rule: one cell per constant piece
    return quad::make_segments(natural_window(spec), jump_points(spec), singular_points(spec)).size();
  }
  return 200000;
}

inline void validate_normalization(const DensitySpec& spec) {
  double m = quad::total_mass(spec, validation_cells(spec));
  if (!(std::abs(m - 1.0) <= kNormalizationTolerance))
    throw std::invalid_argument(family_name(spec) + ": density does not integrate to 1 (mass " +
                                std::to_string(m) + ")");
}

namespace detail {
inline void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}
inline DensitySpec validated(DensitySpec s) {
  validate_normalization(s);
  return s;
}
}  // namespace detail

inline DensitySpec uniform(double a, double b) {
  detail::require(std::isfinite(a) && std::isfinite(b) && a < b, "uniform: requires finite a < b");
  return detail::validated(UniformInterval{a, b});
}

inline DensitySpec gaussian(double mean, double sd) {
  detail::require(std::isfinite(mean) && sd > 0.0 && std::isfinite(sd), "gaussian: requires sd > 0");
  return detail::validated(Gaussian{mean, sd});
}

inline DensitySpec exponential(double rate, double shift = 0.0) {
  detail::require(rate > 0.0 && std::isfinite(rate) && std::isfinite(shift), "exponential: requires rate > 0");
  return detail::validated(Exponential{rate, shift});
}

inline DensitySpec truncated_exponential(double rate, double T, double shift = 0.0) {
  detail::require(rate > 0.0 && T > 0.0 && std::isfinite(rate * T), "truncated_exponential: requires rate, T > 0");
  return detail::validated(TruncatedExponential{rate, T, shift});
}

inline DensitySpec heavy_tail(double shift = 0.0) {
  detail::require(std::isfinite(shift), "heavy_tail: shift must be finite");
  return detail::validated(HeavyTailP{shift});
}

inline DensitySpec cauchy(double location, double scale) {
  detail::require(scale > 0.0 && std::isfinite(location), "cauchy: requires scale > 0");
  return detail::validated(Cauchy{location, scale});
}

inline DensitySpec piecewise_constant(std::vector<double> breakpoints, std::vector<double> levels) {
  detail::require(breakpoints.size() >= 2, "piecewise_constant: needs at least two breakpoints");
  detail::require(levels.size() + 1 == breakpoints.size(), "piecewise_constant: one level per cell");
  for (std::size_t i = 1; i < breakpoints.size(); ++i)
    detail::require(breakpoints[i] > breakpoints[i - 1], "piecewise_constant: breakpoints must increase");
  for (double l : levels) detail::require(l >= 0.0 && std::isfinite(l), "piecewise_constant: negative level");
  return detail::validated(PiecewiseConstant{std::move(breakpoints), std::move(levels)});
}

// Piecewise constant density with the given cell probabilities.
inline DensitySpec histogram_density(const std::vector<double>& breakpoints, const std::vector<double>& probs) {
  detail::require(probs.size() + 1 == breakpoints.size(), "histogram_density: one probability per cell");
  std::vector<double> levels(probs.size());
  for (std::size_t j = 0; j < probs.size(); ++j) levels[j] = probs[j] / (breakpoints[j + 1] - breakpoints[j]);
  return piecewise_constant(breakpoints, std::move(levels));
}

inline DensitySpec mixture(std::vector<double> weights, std::vector<DensitySpec> components) {
  detail::require(!components.empty() && weights.size() == components.size(), "mixture: one weight per component");
  double total = 0.0;
  for (double w : weights) {
    detail::require(w >= 0.0, "mixture: negative weight");
    total += w;
  }
  detail::require(std::abs(total - 1.0) <= 1e-9, "mixture: weights must sum to 1");
  for (const auto& c : components)
    detail::require(!c.is<PathologicalGaussianVersion>() && !c.is<RegressionConditional>(),
                    "mixture: components must be Lebesgue densities on the real line");
  return detail::validated(Mixture{std::move(weights), std::move(components)});
}

inline DensitySpec pathological_gaussian(double theta) { return PathologicalGaussianVersion{theta}; }

inline DensitySpec regression_conditional(std::vector<double> coef, std::shared_ptr<const DensitySpec> error) {
  detail::require(error != nullptr, "regression_conditional: missing error density");
  detail::require(!error->is<RegressionConditional>(), "regression_conditional: nested regression density");
  detail::require(!coef.empty(), "regression_conditional: empty coefficient vector");
  PolynomialFeatures phi{coef.size()};
  return RegressionConditional{std::move(coef), phi, std::move(error)};
}

}  // namespace rho
