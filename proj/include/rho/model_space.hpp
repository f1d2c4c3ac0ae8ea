#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "rho/catalog.hpp"
#include "rho/density.hpp"

namespace rho {

// Upper bounds on the local dimension used as penalty constants.
struct DimensionBound {
  enum class Form { constant, d_log_en_over_d, d_log_plus_cubed };
  Form form = Form::constant;
  double d = 0.0;

  double eval(double n) const {
    switch (form) {
      case Form::constant:
        return d;
      case Form::d_log_en_over_d:
        return d * std::log(std::numbers::e * n / d);
      case Form::d_log_plus_cubed: {
        double l = std::max(1.0, std::log(n / d));
        return d * l * l * l;
      }
    }
    return d;
  }
};

// Cell-probability lattice behind a histogram family: member i has
// probabilities units[i][j] / K on cell j.
struct HistogramLattice {
  std::vector<double> breakpoints;
  int K = 1;
  std::vector<std::vector<int>> units;
  bool complete = true;  // every composition of K present (not filtered)

  std::size_t cells() const { return breakpoints.size() - 1; }

  std::uint64_t key(const std::vector<int>& u) const {
    std::uint64_t k = 0;
    for (int v : u) k = k * static_cast<std::uint64_t>(K + 1) + static_cast<std::uint64_t>(v);
    return k;
  }
  void build_index() {
    index_.clear();
    for (std::size_t i = 0; i < units.size(); ++i) index_.emplace(key(units[i]), i);
  }
  std::optional<std::size_t> index_of(const std::vector<int>& u) const {
    auto it = index_.find(key(u));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

 private:
  std::unordered_map<std::uint64_t, std::size_t> index_;
};

struct CandidateFamily {
  std::vector<DensitySpec> members;
  std::string label;
  std::optional<DimensionBound> dimension_bound;
  std::shared_ptr<const HistogramLattice> lattice;

  std::size_t size() const { return members.size(); }
  const DensitySpec& operator[](std::size_t i) const { return members[i]; }
};

struct PenalizedCollection {
  std::vector<CandidateFamily> families;
  std::vector<double> delta;
  double kappa = 1.0;
  std::vector<double> pen;  // empty until assign_penalties

  bool has_penalties() const { return pen.size() == families.size() && !families.empty(); }
};

inline CandidateFamily build_location_family(const DensitySpec& base, const std::vector<double>& thetas,
                                             std::string label = "location") {
  if (thetas.empty()) throw std::invalid_argument("build_location_family: empty grid");
  for (std::size_t i = 1; i < thetas.size(); ++i)
    if (!(thetas[i] > thetas[i - 1])) throw std::invalid_argument("build_location_family: grid must increase");
  CandidateFamily f;
  f.label = std::move(label);
  f.members.reserve(thetas.size());
  for (double t : thetas) f.members.push_back(shifted(base, t));
  return f;
}

// {U[0, theta]} for the given scales.
inline CandidateFamily build_uniform_scale_family(const std::vector<double>& thetas) {
  if (thetas.empty()) throw std::invalid_argument("build_uniform_scale_family: empty grid");
  CandidateFamily f;
  f.label = "uniform_scale";
  f.members.reserve(thetas.size());
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    if (!(thetas[i] > 0.0) || (i > 0 && !(thetas[i] > thetas[i - 1])))
      throw std::invalid_argument("build_uniform_scale_family: scales must be positive and increasing");
    f.members.push_back(UniformInterval{0.0, thetas[i]});
  }
  return f;
}

// theta_k = lo + k * step for k = 0..count-1, computed without accumulation.
inline std::vector<double> regular_grid(double lo, double step, std::size_t count) {
  if (!(step > 0.0) || count == 0) throw std::invalid_argument("regular_grid: bad step or count");
  std::vector<double> g(count);
  for (std::size_t k = 0; k < count; ++k) g[k] = lo + static_cast<double>(k) * step;
  return g;
}

inline constexpr std::size_t kDefaultLatticeCap = 2'000'000;

namespace detail {

inline int lattice_units(double step) {
  if (!(step > 0.0) || step > 1.0) throw std::invalid_argument("lattice step must lie in (0, 1]");
  double k = 1.0 / step;
  double r = std::round(k);
  if (std::abs(k - r) > 1e-9 * r) throw std::invalid_argument("lattice step must divide 1");
  return static_cast<int>(r);
}

inline double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Compositions of K into m parts, first coordinate descending, recursively.
inline void compositions(int K, std::size_t m, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (cur.size() + 1 == m) {
    cur.push_back(K);
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  for (int v = K; v >= 0; --v) {
    cur.push_back(v);
    compositions(K - v, m, cur, out);
    cur.pop_back();
  }
}

inline void check_partition(const std::vector<double>& br) {
  if (br.size() < 2) throw std::invalid_argument("histogram: needs at least two breakpoints");
  for (std::size_t i = 1; i < br.size(); ++i)
    if (!(br[i] > br[i - 1])) throw std::invalid_argument("histogram: breakpoints must increase");
}

inline CandidateFamily lattice_family(std::shared_ptr<HistogramLattice> lat, std::string label) {
  CandidateFamily f;
  f.label = std::move(label);
  f.members.reserve(lat->units.size());
  std::vector<double> probs(lat->cells());
  for (const auto& u : lat->units) {
    for (std::size_t j = 0; j < u.size(); ++j) probs[j] = static_cast<double>(u[j]) / static_cast<double>(lat->K);
    f.members.push_back(histogram_density(lat->breakpoints, probs));
  }
  f.dimension_bound = DimensionBound{DimensionBound::Form::d_log_plus_cubed, static_cast<double>(lat->cells())};
  lat->build_index();
  f.lattice = std::move(lat);
  return f;
}

}  // namespace detail

inline std::size_t histogram_lattice_size(std::size_t cells, double step) {
  int K = detail::lattice_units(step);
  return static_cast<std::size_t>(detail::binomial(K + static_cast<int>(cells) - 1, static_cast<int>(cells) - 1));
}

inline CandidateFamily build_histogram_family(const std::vector<double>& breakpoints, double step,
                                              std::size_t cap = kDefaultLatticeCap) {
  detail::check_partition(breakpoints);
  int K = detail::lattice_units(step);
  std::size_t m = breakpoints.size() - 1;
  if (histogram_lattice_size(m, step) > static_cast<double>(cap))
    throw std::length_error("build_histogram_family: lattice exceeds the size cap");
  auto lat = std::make_shared<HistogramLattice>();
  lat->breakpoints = breakpoints;
  lat->K = K;
  std::vector<int> cur;
  detail::compositions(K, m, cur, lat->units);
  return detail::lattice_family(std::move(lat), "histogram");
}

// Histogram lattice members whose levels (mass / width) do not increase.
inline CandidateFamily build_decreasing_family(const std::vector<double>& breakpoints, double step,
                                               std::size_t cap = kDefaultLatticeCap) {
  detail::check_partition(breakpoints);
  if (breakpoints.front() < 0.0) throw std::invalid_argument("build_decreasing_family: grid must lie in [0, inf)");
  int K = detail::lattice_units(step);
  std::size_t m = breakpoints.size() - 1;
  if (histogram_lattice_size(m, step) > static_cast<double>(cap))
    throw std::length_error("build_decreasing_family: lattice exceeds the size cap");
  std::vector<std::vector<int>> all;
  std::vector<int> cur;
  detail::compositions(K, m, cur, all);
  auto lat = std::make_shared<HistogramLattice>();
  lat->breakpoints = breakpoints;
  lat->K = K;
  lat->complete = m == 1;
  for (auto& u : all) {
    bool ok = true;
    for (std::size_t j = 1; j < m && ok; ++j) {
      // u[j]/w[j] <= u[j-1]/w[j-1], compared on the level scale
      double prev = static_cast<double>(u[j - 1]) / (breakpoints[j] - breakpoints[j - 1]);
      double here = static_cast<double>(u[j]) / (breakpoints[j + 1] - breakpoints[j]);
      ok = here <= prev;
    }
    if (ok) lat->units.push_back(std::move(u));
  }
  return detail::lattice_family(std::move(lat), "decreasing");
}

// One family per (coefficient grid, error density). Grids are lists of
// coefficient vectors; d = coefficient dimension.
//
// Weights: Delta(d, k) = d + a_k with a_k = log(K / (e - 1)), so that
// sum_k e^{-a_k} = e - 1. Only finitely many d are present; the largest listed
// d absorbs the mass of the unlisted ones, which keeps sum e^{-Delta} = 1.
inline PenalizedCollection build_regression_dictionary(const PolynomialFeatures& features,
                                                       const std::vector<std::vector<std::vector<double>>>& coefficient_grids,
                                                       const std::vector<DensitySpec>& error_densities) {
  if (coefficient_grids.empty() || error_densities.empty())
    throw std::invalid_argument("build_regression_dictionary: empty components");
  for (const auto& g : coefficient_grids) {
    if (g.empty()) throw std::invalid_argument("build_regression_dictionary: empty coefficient grid");
    for (const auto& c : g)
      if (c.size() != g.front().size() || c.size() > features.dim)
        throw std::invalid_argument("build_regression_dictionary: coefficient dimension mismatch");
  }

  const double K = static_cast<double>(error_densities.size());
  const double a_k = std::log(K / (std::numbers::e - 1.0));

  // distinct dimensions in increasing order
  std::vector<double> dims;
  for (const auto& g : coefficient_grids) dims.push_back(static_cast<double>(g.front().size()));
  std::vector<double> sorted = dims;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  auto dim_weight = [&](double d) {
    if (d != sorted.back()) return d;
    double rest = 1.0 / (std::numbers::e - 1.0);
    for (double s : sorted)
      if (s != d) rest -= std::exp(-s);
    return -std::log(rest);
  };

  // several grids of the same dimension share that dimension's weight
  std::vector<double> per_dim_count(sorted.size(), 0.0);
  for (double d : dims)
    per_dim_count[static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), d) - sorted.begin())] += 1.0;

  PenalizedCollection pc;
  for (std::size_t g = 0; g < coefficient_grids.size(); ++g) {
    double d = dims[g];
    double share = per_dim_count[static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), d) - sorted.begin())];
    for (std::size_t k = 0; k < error_densities.size(); ++k) {
      CandidateFamily f;
      f.label = "d" + std::to_string(static_cast<int>(d)) + "_" + family_name(error_densities[k]);
      auto err = std::make_shared<const DensitySpec>(error_densities[k]);
      for (const auto& c : coefficient_grids[g]) {
        std::vector<double> coef = c;
        coef.resize(features.dim, 0.0);
        f.members.push_back(RegressionConditional{std::move(coef), features, err});
      }
      f.dimension_bound = DimensionBound{DimensionBound::Form::d_log_en_over_d, d};
      pc.families.push_back(std::move(f));
      pc.delta.push_back(dim_weight(d) + a_k + std::log(share));
    }
  }
  return pc;
}

inline double prior_mass(const std::vector<double>& delta) {
  double s = 0.0;
  for (double d : delta) s += std::exp(-d);
  return s;
}

// pen[m] = kappa (dimension_bound[m](n) + delta[m]). Prior mass deficits below
// 1e-6 are renormalized away unless renormalize is false.
inline PenalizedCollection assign_penalties(PenalizedCollection c, double kappa, double n, bool renormalize = true) {
  if (!(kappa > 0.0)) throw std::invalid_argument("assign_penalties: kappa must be positive");
  if (!(n >= 1.0)) throw std::invalid_argument("assign_penalties: sample size must be >= 1");
  if (c.families.empty()) throw std::invalid_argument("assign_penalties: empty collection");
  if (c.delta.empty()) c.delta.assign(c.families.size(), std::log(static_cast<double>(c.families.size())));
  if (c.delta.size() != c.families.size()) throw std::invalid_argument("assign_penalties: one weight per family");
  for (double d : c.delta)
    if (!(d > -1e-12)) throw std::invalid_argument("assign_penalties: negative weight");

  double mass = prior_mass(c.delta);
  double gap = std::abs(mass - 1.0);
  if (gap > 1e-9) {
    if (!renormalize || gap > 1e-6)
      throw std::invalid_argument("assign_penalties: sum of exp(-Delta) differs from 1");
    double shift = std::log(mass);
    for (double& d : c.delta) d += shift;
  }

  c.kappa = kappa;
  c.pen.resize(c.families.size());
  for (std::size_t m = 0; m < c.families.size(); ++m) {
    if (!c.families[m].dimension_bound) throw std::invalid_argument("assign_penalties: family without dimension bound");
    c.pen[m] = kappa * (c.families[m].dimension_bound->eval(n) + c.delta[m]);
  }
  return c;
}

inline PenalizedCollection single_model(CandidateFamily f) {
  PenalizedCollection c;
  c.families.push_back(std::move(f));
  c.delta = {0.0};
  return c;
}

}  // namespace rho
