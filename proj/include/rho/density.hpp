#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

namespace rho {

class DensitySpec;

// Uniform on [a, b]. Translates carry the original width so that every
// member of a location family has bitwise the same density value.
struct UniformInterval {
  double a = 0.0, b = 1.0;
  double width = 0.0;  // 0: use b - a

  double length() const { return width > 0.0 ? width : b - a; }
  bool operator==(const UniformInterval&) const = default;
};

struct Gaussian {
  double mean = 0.0, sd = 1.0;
  bool operator==(const Gaussian&) const = default;
};

// rate * exp(-rate (x - shift)) on [shift, +inf)
struct Exponential {
  double rate = 1.0, shift = 0.0;
  bool operator==(const Exponential&) const = default;
};

// Exponential(rate, shift) conditioned on [shift, shift + T].
struct TruncatedExponential {
  double rate = 1.0, T = 1.0, shift = 0.0;
  bool operator==(const TruncatedExponential&) const = default;
};

// (1/6)[|u|^{-1/2} 1{0<|u|<=1} + u^{-2} 1{|u|>1}] with u = x - shift:
// symmetric, unbounded at the shift, Cauchy-like tails.
struct HeavyTailP {
  double shift = 0.0;
  bool operator==(const HeavyTailP&) const = default;
};

struct Cauchy {
  double location = 0.0, scale = 1.0;
  bool operator==(const Cauchy&) const = default;
};

// levels[j] on [breakpoints[j], breakpoints[j+1]); the last cell is closed.
struct PiecewiseConstant {
  std::vector<double> breakpoints;
  std::vector<double> levels;
  bool operator==(const PiecewiseConstant&) const = default;
};

struct Mixture {
  std::vector<double> weights;
  std::vector<DensitySpec> components;
  bool operator==(const Mixture&) const;
};

// Density of N(theta, 1) with respect to N(0, 1), in the version that differs
// from exp(theta x - theta^2/2) only at the single point x == theta > 0.
struct PathologicalGaussianVersion {
  double theta = 0.0;
  bool operator==(const PathologicalGaussianVersion&) const = default;
};

// phi(w) = (1, w, w^2, ..., w^{dim-1})
struct PolynomialFeatures {
  std::size_t dim = 1;

  double eval(std::span<const double> coef, double w) const {
    double acc = 0.0;
    for (std::size_t j = coef.size(); j-- > 0;) acc = acc * w + coef[j];
    return acc;
  }
  bool operator==(const PolynomialFeatures&) const = default;
};

// Conditional density of Y given W = w: error(y - f(w)), f = sum coef_j phi_j.
struct RegressionConditional {
  std::vector<double> coef;
  PolynomialFeatures features;
  std::shared_ptr<const DensitySpec> error;
  bool operator==(const RegressionConditional& o) const;
};

class DensitySpec {
 public:
  using Variant = std::variant<UniformInterval, Gaussian, Exponential, TruncatedExponential, HeavyTailP, Cauchy,
                               PiecewiseConstant, Mixture, PathologicalGaussianVersion, RegressionConditional>;

  template <class T>
    requires std::is_constructible_v<Variant, T&&>
  DensitySpec(T&& v) : v_(std::forward<T>(v)) {}

  const Variant& variant() const { return v_; }

  template <class T>
  bool is() const { return std::holds_alternative<T>(v_); }
  template <class T>
  const T& as() const { return std::get<T>(v_); }

  bool operator==(const DensitySpec& o) const { return v_ == o.v_; }

 private:
  Variant v_;
};

inline bool Mixture::operator==(const Mixture& o) const {
  return weights == o.weights && components == o.components;
}

inline bool RegressionConditional::operator==(const RegressionConditional& o) const {
  if (coef != o.coef || !(features == o.features)) return false;
  if (error == o.error) return true;
  return error && o.error && *error == *o.error;
}

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

namespace detail {

inline double heavy_tail_pdf(double u) {
  double a = std::abs(u);
  if (a == 0.0) return std::numeric_limits<double>::infinity();
  if (a <= 1.0) return 1.0 / (6.0 * std::sqrt(a));
  return 1.0 / (6.0 * a * a);
}

inline double heavy_tail_cdf(double u) {
  if (u < 0.0) return 1.0 - heavy_tail_cdf(-u);
  if (u <= 1.0) return 0.5 + std::sqrt(u) / 3.0;
  return 1.0 - 1.0 / (6.0 * u);
}

inline std::size_t cell_of(const std::vector<double>& br, double x) {
  // caller guarantees br.front() <= x <= br.back()
  auto it = std::upper_bound(br.begin(), br.end(), x);
  std::size_t j = static_cast<std::size_t>(it - br.begin());
  return j == br.size() ? br.size() - 2 : j - 1;
}

}  // namespace detail

// Pointwise density for real-valued observations.
inline double density_at(const DensitySpec& spec, double x) {
  return std::visit(
      overloaded{
          [x](const UniformInterval& d) { return (x >= d.a && x <= d.b) ? 1.0 / d.length() : 0.0; },
          [x](const Gaussian& d) {
            double z = (x - d.mean) / d.sd;
            return std::exp(-0.5 * z * z) / (d.sd * std::sqrt(2.0 * std::numbers::pi));
          },
          [x](const Exponential& d) { return x < d.shift ? 0.0 : d.rate * std::exp(-d.rate * (x - d.shift)); },
          [x](const TruncatedExponential& d) {
            double t = x - d.shift;
            if (t < 0.0 || t > d.T) return 0.0;
            return d.rate * std::exp(-d.rate * t) / (-std::expm1(-d.rate * d.T));
          },
          [x](const HeavyTailP& d) { return detail::heavy_tail_pdf(x - d.shift); },
          [x](const Cauchy& d) {
            double z = (x - d.location) / d.scale;
            return 1.0 / (std::numbers::pi * d.scale * (1.0 + z * z));
          },
          [x](const PiecewiseConstant& d) {
            if (x < d.breakpoints.front() || x > d.breakpoints.back()) return 0.0;
            return d.levels[detail::cell_of(d.breakpoints, x)];
          },
          [x](const Mixture& d) {
            double s = 0.0;
            for (std::size_t i = 0; i < d.weights.size(); ++i)
              if (d.weights[i] > 0.0) s += d.weights[i] * density_at(d.components[i], x);
            return s;
          },
          [x](const PathologicalGaussianVersion& d) {
            double base = d.theta * x - 0.5 * d.theta * d.theta;
            // exact equality: the exotic version lives on a single point
            if (x == d.theta && d.theta > 0.0) base += 0.5 * d.theta * d.theta * std::exp(x * x);
            return std::exp(base);
          },
          [](const RegressionConditional&) -> double {
            throw std::invalid_argument("density_at: regression densities need a (w, y) pair");
          },
      },
      spec.variant());
}

// Pointwise density for (w, y) observations.
inline double density_at(const DensitySpec& spec, double w, double y) {
  const auto* r = std::get_if<RegressionConditional>(&spec.variant());
  if (!r) throw std::invalid_argument("density_at: (w, y) pair given to a non-regression density");
  return density_at(*r->error, y - r->features.eval(r->coef, w));
}

// Analytic CDF. Not available for the pathological version or regression
// conditionals.
inline double cdf(const DensitySpec& spec, double x) {
  return std::visit(
      overloaded{
          [x](const UniformInterval& d) {
            if (x <= d.a) return 0.0;
            if (x >= d.b) return 1.0;
            return std::clamp((x - d.a) / d.length(), 0.0, 1.0);
          },
          [x](const Gaussian& d) { return 0.5 * std::erfc(-(x - d.mean) / (d.sd * std::numbers::sqrt2)); },
          [x](const Exponential& d) { return x <= d.shift ? 0.0 : -std::expm1(-d.rate * (x - d.shift)); },
          [x](const TruncatedExponential& d) {
            double t = std::clamp(x - d.shift, 0.0, d.T);
            return std::expm1(-d.rate * t) / std::expm1(-d.rate * d.T);
          },
          [x](const HeavyTailP& d) { return detail::heavy_tail_cdf(x - d.shift); },
          [x](const Cauchy& d) { return 0.5 + std::atan((x - d.location) / d.scale) / std::numbers::pi; },
          [x](const PiecewiseConstant& d) {
            const auto& br = d.breakpoints;
            if (x <= br.front()) return 0.0;
            double s = 0.0;
            for (std::size_t j = 0; j + 1 < br.size(); ++j) {
              if (x >= br[j + 1]) {
                s += d.levels[j] * (br[j + 1] - br[j]);
              } else {
                s += d.levels[j] * (x - br[j]);
                break;
              }
            }
            return std::min(s, 1.0);
          },
          [x](const Mixture& d) {
            double s = 0.0;
            for (std::size_t i = 0; i < d.weights.size(); ++i) s += d.weights[i] * cdf(d.components[i], x);
            return s;
          },
          [](const PathologicalGaussianVersion&) -> double {
            throw std::invalid_argument("cdf: not defined for the pathological Gaussian version");
          },
          [](const RegressionConditional&) -> double {
            throw std::invalid_argument("cdf: not defined for regression conditionals");
          },
      },
      spec.variant());
}

// Points where the density jumps (discontinuities), sorted and unique.
inline std::vector<double> jump_points(const DensitySpec& spec) {
  std::vector<double> out = std::visit(
      overloaded{
          [](const UniformInterval& d) { return std::vector<double>{d.a, d.b}; },
          [](const Exponential& d) { return std::vector<double>{d.shift}; },
          [](const TruncatedExponential& d) { return std::vector<double>{d.shift, d.shift + d.T}; },
          [](const HeavyTailP& d) { return std::vector<double>{d.shift - 1.0, d.shift + 1.0}; },
          [](const PiecewiseConstant& d) { return d.breakpoints; },
          [](const Mixture& d) {
            std::vector<double> v;
            for (const auto& c : d.components) {
              auto cj = jump_points(c);
              v.insert(v.end(), cj.begin(), cj.end());
            }
            return v;
          },
          [](const auto&) { return std::vector<double>{}; },
      },
      spec.variant());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// Points where the density is unbounded (integrable singularities).
inline std::vector<double> singular_points(const DensitySpec& spec) {
  std::vector<double> out = std::visit(
      overloaded{
          [](const HeavyTailP& d) { return std::vector<double>{d.shift}; },
          [](const Mixture& d) {
            std::vector<double> v;
            for (std::size_t i = 0; i < d.components.size(); ++i) {
              if (d.weights[i] == 0.0) continue;
              auto cs = singular_points(d.components[i]);
              v.insert(v.end(), cs.begin(), cs.end());
            }
            return v;
          },
          [](const auto&) { return std::vector<double>{}; },
      },
      spec.variant());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

struct Interval {
  double lo = 0.0, hi = 1.0;
  double length() const { return hi - lo; }
  bool operator==(const Interval&) const = default;
};

// A window outside which the density carries negligible mass (<= ~1e-8,
// exactly zero for compactly supported families).
inline Interval natural_window(const DensitySpec& spec) {
  return std::visit(
      overloaded{
          [](const UniformInterval& d) { return Interval{d.a, d.b}; },
          [](const Gaussian& d) { return Interval{d.mean - 12.0 * d.sd, d.mean + 12.0 * d.sd}; },
          [](const Exponential& d) { return Interval{d.shift, d.shift + 40.0 / d.rate}; },
          [](const TruncatedExponential& d) { return Interval{d.shift, d.shift + d.T}; },
          [](const HeavyTailP& d) { return Interval{d.shift - 1e8, d.shift + 1e8}; },
          [](const Cauchy& d) { return Interval{d.location - 1e4 * d.scale, d.location + 1e4 * d.scale}; },
          [](const PiecewiseConstant& d) { return Interval{d.breakpoints.front(), d.breakpoints.back()}; },
          [](const Mixture& d) {
            Interval w{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
            for (std::size_t i = 0; i < d.components.size(); ++i) {
              if (d.weights[i] == 0.0) continue;
              Interval c = natural_window(d.components[i]);
              w.lo = std::min(w.lo, c.lo);
              w.hi = std::max(w.hi, c.hi);
            }
            return w;
          },
          [](const PathologicalGaussianVersion& d) { return Interval{d.theta - 12.0, d.theta + 12.0}; },
          [](const RegressionConditional&) -> Interval {
            throw std::invalid_argument("natural_window: not defined for regression conditionals");
          },
      },
      spec.variant());
}

// Translate by delta: x -> spec(x - delta).
inline DensitySpec shifted(const DensitySpec& spec, double delta) {
  return std::visit(
      overloaded{
          [delta](const UniformInterval& d) -> DensitySpec {
            return UniformInterval{d.a + delta, d.b + delta, d.length()};
          },
          [delta](const Gaussian& d) -> DensitySpec { return Gaussian{d.mean + delta, d.sd}; },
          [delta](const Exponential& d) -> DensitySpec { return Exponential{d.rate, d.shift + delta}; },
          [delta](const TruncatedExponential& d) -> DensitySpec {
            return TruncatedExponential{d.rate, d.T, d.shift + delta};
          },
          [delta](const HeavyTailP& d) -> DensitySpec { return HeavyTailP{d.shift + delta}; },
          [delta](const Cauchy& d) -> DensitySpec { return Cauchy{d.location + delta, d.scale}; },
          [delta](const PiecewiseConstant& d) -> DensitySpec {
            PiecewiseConstant out = d;
            for (auto& b : out.breakpoints) b += delta;
            return out;
          },
          [delta](const Mixture& d) -> DensitySpec {
            Mixture out;
            out.weights = d.weights;
            for (const auto& c : d.components) out.components.push_back(shifted(c, delta));
            return out;
          },
          [](const auto&) -> DensitySpec {
            throw std::invalid_argument("shifted: family has no translation parameter");
          },
      },
      spec.variant());
}

inline std::string family_name(const DensitySpec& s) {
  return std::visit(overloaded{
                        [](const UniformInterval&) { return std::string("uniform"); },
                        [](const Gaussian&) { return std::string("gaussian"); },
                        [](const Exponential&) { return std::string("exponential"); },
                        [](const TruncatedExponential&) { return std::string("truncated_exponential"); },
                        [](const HeavyTailP&) { return std::string("heavy_tail"); },
                        [](const Cauchy&) { return std::string("cauchy"); },
                        [](const PiecewiseConstant&) { return std::string("piecewise_constant"); },
                        [](const Mixture&) { return std::string("mixture"); },
                        [](const PathologicalGaussianVersion&) { return std::string("pathological_gaussian"); },
                        [](const RegressionConditional&) { return std::string("regression"); },
                    },
                    s.variant());
}

}  // namespace rho
