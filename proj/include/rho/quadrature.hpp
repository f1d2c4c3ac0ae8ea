#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "rho/density.hpp"

namespace rho::quad {

// How cells are laid out on one segment of the window.
//   uniform:       equal cells
//   toward_lo/hi:  quadratic grading x = a + (b-a) s^2 toward a singular end;
//                  exact for |x - c|^{-1/2} behaviour under the midpoint rule
//   geometric:     equal cells in log |x - center| (long power-law tails)
enum class Grading { uniform, toward_lo, toward_hi, geometric };

struct Segment {
  double a = 0.0, b = 0.0;
  Grading grading = Grading::uniform;
  double center = 0.0;
};

struct Cell {
  double lo, hi, mid, weight;
  bool touches_singular;
};

// Splits the window at the given jump and singular points. Segments adjacent to
// a singular point are graded toward it; segments far from the nearest
// singular point (distance ratio > 2) are graded geometrically.
inline std::vector<Segment> make_segments(Interval window, std::vector<double> jumps, std::vector<double> singular) {
  if (!(window.hi > window.lo)) throw std::invalid_argument("quadrature: empty window");
  std::vector<double> pts{window.lo, window.hi};
  for (double p : jumps)
    if (p > window.lo && p < window.hi) pts.push_back(p);
  for (double p : singular)
    if (p > window.lo && p < window.hi) pts.push_back(p);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  std::sort(singular.begin(), singular.end());

  auto is_singular = [&](double x) { return std::binary_search(singular.begin(), singular.end(), x); };

  std::vector<Segment> out;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    double a = pts[i], b = pts[i + 1];
    bool sa = is_singular(a), sb = is_singular(b);
    if (sa && sb) {
      double m = 0.5 * (a + b);
      out.push_back({a, m, Grading::toward_lo, a});
      out.push_back({m, b, Grading::toward_hi, b});
    } else if (sa) {
      out.push_back({a, b, Grading::toward_lo, a});
    } else if (sb) {
      out.push_back({a, b, Grading::toward_hi, b});
    } else {
      Segment s{a, b, Grading::uniform, 0.0};
      if (!singular.empty()) {
        // nearest singular point outside (a, b)
        double best = std::numeric_limits<double>::infinity();
        for (double c : singular) {
          double d = std::min(std::abs(a - c), std::abs(b - c));
          if ((c <= a || c >= b) && d < best) {
            best = d;
            s.center = c;
          }
        }
        double near = std::min(std::abs(a - s.center), std::abs(b - s.center));
        double far = std::max(std::abs(a - s.center), std::abs(b - s.center));
        if (near > 0.0 && far / near > 2.0) s.grading = Grading::geometric;
      }
      out.push_back(s);
    }
  }
  return out;
}

// Visits every cell; `cells` is split evenly across segments (at least one
// cell each).
template <class F>
void for_each_cell(const std::vector<Segment>& segs, std::size_t cells, F&& f) {
  if (cells == 0) throw std::invalid_argument("quadrature: cells must be positive");
  std::size_t per = std::max<std::size_t>(1, cells / segs.size());
  for (const auto& s : segs) {
    const double len = s.b - s.a;
    const double m = static_cast<double>(per);
    for (std::size_t k = 0; k < per; ++k) {
      const double s0 = static_cast<double>(k) / m, s1 = static_cast<double>(k + 1) / m;
      const double sm = 0.5 * (s0 + s1);
      Cell c{};
      switch (s.grading) {
        case Grading::uniform:
          c = {s.a + len * s0, s.a + len * s1, s.a + len * sm, len / m, false};
          break;
        case Grading::toward_lo:
          c = {s.a + len * s0 * s0, s.a + len * s1 * s1, s.a + len * sm * sm, 2.0 * len * sm / m, k == 0};
          break;
        case Grading::toward_hi: {
          double t0 = 1.0 - s1, t1 = 1.0 - s0, tm = 1.0 - sm;
          c = {s.b - len * t1 * t1, s.b - len * t0 * t0, s.b - len * tm * tm, 2.0 * len * tm / m, k + 1 == per};
          break;
        }
        case Grading::geometric: {
          double dir = (s.a >= s.center) ? 1.0 : -1.0;
          double d_near = std::min(std::abs(s.a - s.center), std::abs(s.b - s.center));
          double d_far = std::max(std::abs(s.a - s.center), std::abs(s.b - s.center));
          double lr = std::log(d_far / d_near);
          double d0 = d_near * std::exp(lr * s0), d1 = d_near * std::exp(lr * s1), dm = d_near * std::exp(lr * sm);
          double x0 = s.center + dir * d0, x1 = s.center + dir * d1;
          c = {std::min(x0, x1), std::max(x0, x1), s.center + dir * dm, dm * lr / m, false};
          break;
        }
      }
      f(c);
    }
  }
}

// Midpoint-rule integral of the density over [lo, hi].
inline double integrate_density(const DensitySpec& spec, Interval window, std::size_t cells) {
  auto segs = make_segments(window, jump_points(spec), singular_points(spec));
  double s = 0.0, comp = 0.0;
  for_each_cell(segs, cells, [&](const Cell& c) {
    double y = density_at(spec, c.mid) * c.weight - comp;
    double t = s + y;
    comp = (t - s) - y;
    s = t;
  });
  return s;
}

// Quadrature mass over the natural window plus the analytic mass outside it.
inline double total_mass(const DensitySpec& spec, std::size_t cells) {
  Interval w = natural_window(spec);
  double inside = integrate_density(spec, w, cells);
  double outside = cdf(spec, w.lo) + (1.0 - cdf(spec, w.hi));
  return inside + outside;
}

}  // namespace rho::quad
