#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "rho/density.hpp"
#include "rho/discrete.hpp"
#include "rho/quadrature.hpp"

namespace rho {

// Closed-form h^2 for the supported pairs; nullopt when the pair is not in
// the catalog (the caller then chooses quadrature parameters explicitly).
inline std::optional<double> hellinger2_analytic(const DensitySpec& a, const DensitySpec& b) {
  if (a == b) return 0.0;

  if (a.is<UniformInterval>() && b.is<UniformInterval>()) {
    const auto& u = a.as<UniformInterval>();
    const auto& v = b.as<UniformInterval>();
    double overlap = std::max(0.0, std::min(u.b, v.b) - std::max(u.a, v.a));
    double aff = overlap / std::sqrt(u.length() * v.length());
    return std::clamp(1.0 - aff, 0.0, 1.0);
  }

  if (a.is<Gaussian>() && b.is<Gaussian>()) {
    const auto& g = a.as<Gaussian>();
    const auto& k = b.as<Gaussian>();
    double s2 = g.sd * g.sd + k.sd * k.sd;
    double d = g.mean - k.mean;
    double aff = std::sqrt(2.0 * g.sd * k.sd / s2) * std::exp(-d * d / (4.0 * s2));
    return std::clamp(1.0 - aff, 0.0, 1.0);
  }

  auto exp_vs_trunc = [](const DensitySpec& e, const DensitySpec& t) -> std::optional<double> {
    if (!e.is<Exponential>() || !t.is<TruncatedExponential>()) return std::nullopt;
    const auto& x = e.as<Exponential>();
    const auto& y = t.as<TruncatedExponential>();
    if (x.rate != y.rate || x.shift != y.shift) return std::nullopt;
    // affinity sqrt(1 - e^{-rate T}); h^2 = e^{-rT} / (1 + sqrt(1 - e^{-rT}))
    double tail = std::exp(-x.rate * y.T);
    return tail / (1.0 + std::sqrt(-std::expm1(-x.rate * y.T)));
  };
  if (auto r = exp_vs_trunc(a, b)) return r;
  if (auto r = exp_vs_trunc(b, a)) return r;

  return std::nullopt;
}

struct QuadratureOptions {
  std::size_t cells = 100000;
  Interval window{0.0, 1.0};
  // Add (1/2)(tail_a + tail_b), an upper bound for the contribution of mass
  // outside the window. Without it, more than 1e-6 outside mass is an error.
  bool add_tail_bound = false;
};

namespace detail {
inline std::vector<double> merged(std::vector<double> x, const std::vector<double>& y) {
  x.insert(x.end(), y.begin(), y.end());
  std::sort(x.begin(), x.end());
  x.erase(std::unique(x.begin(), x.end()), x.end());
  return x;
}
}  // namespace detail

// Midpoint rule for (1/2) int (sqrt a - sqrt b)^2 over the window. Cells that
// touch an integrable singularity use the exact analytic cell masses.
inline double hellinger2_quadrature(const DensitySpec& a, const DensitySpec& b, const QuadratureOptions& opt) {
  if (opt.cells < 2) throw std::invalid_argument("hellinger2_quadrature: needs at least 2 cells");
  const Interval w = opt.window;
  const double tail_a = cdf(a, w.lo) + (1.0 - cdf(a, w.hi));
  const double tail_b = cdf(b, w.lo) + (1.0 - cdf(b, w.hi));
  if (!opt.add_tail_bound && (tail_a > 1e-6 || tail_b > 1e-6))
    throw std::invalid_argument("hellinger2_quadrature: window excludes non-negligible mass");

  auto segs = quad::make_segments(w, detail::merged(jump_points(a), jump_points(b)),
                                  detail::merged(singular_points(a), singular_points(b)));
  double s = 0.0, comp = 0.0;
  quad::for_each_cell(segs, opt.cells, [&](const quad::Cell& c) {
    double term;
    if (c.touches_singular) {
      double ma = cdf(a, c.hi) - cdf(a, c.lo);
      double mb = cdf(b, c.hi) - cdf(b, c.lo);
      double d = std::sqrt(std::max(ma, 0.0)) - std::sqrt(std::max(mb, 0.0));
      term = d * d;
    } else {
      double d = std::sqrt(density_at(a, c.mid)) - std::sqrt(density_at(b, c.mid));
      term = d * d * c.weight;
    }
    double y = term - comp;
    double t = s + y;
    comp = (t - s) - y;
    s = t;
  });
  double h2 = 0.5 * s;
  if (opt.add_tail_bound) h2 += 0.5 * (tail_a + tail_b);
  return std::clamp(h2, 0.0, 1.0);
}

// Smallest interval containing both natural windows.
inline Interval joint_window(const DensitySpec& a, const DensitySpec& b) {
  Interval x = natural_window(a), y = natural_window(b);
  return {std::min(x.lo, y.lo), std::max(x.hi, y.hi)};
}

// Analytic when supported, otherwise quadrature on the joint natural window.
inline double hellinger2(const DensitySpec& a, const DensitySpec& b, std::size_t cells = 200000) {
  if (auto v = hellinger2_analytic(a, b)) return *v;
  return hellinger2_quadrature(a, b, {cells, joint_window(a, b), true});
}

inline bool piecewise_flat(const DensitySpec& s) {
  if (s.is<UniformInterval>() || s.is<PiecewiseConstant>()) return true;
  if (s.is<Mixture>()) {
    for (const auto& c : s.as<Mixture>().components)
      if (!piecewise_flat(c)) return false;
    return true;
  }
  return false;
}

// Exact h^2 for piecewise constant densities (uniforms, histograms and their
// mixtures): one midpoint cell per constant piece.
inline double hellinger2_piecewise(const DensitySpec& a, const DensitySpec& b) {
  if (!piecewise_flat(a) || !piecewise_flat(b))
    throw std::invalid_argument("hellinger2_piecewise: densities must be piecewise constant");
  Interval w = joint_window(a, b);
  auto segs = quad::make_segments(w, detail::merged(jump_points(a), jump_points(b)), {});
  return hellinger2_quadrature(a, b, {std::max<std::size_t>(2, segs.size()), w, false});
}

// H^2 = sum of per-coordinate h^2, in [0, n].
inline double product_hellinger2(const std::vector<std::pair<DensitySpec, DensitySpec>>& pairs,
                                 std::size_t cells = 200000) {
  double s = 0.0;
  for (const auto& [p, q] : pairs) s += hellinger2(p, q, cells);
  return s;
}

}  // namespace rho
