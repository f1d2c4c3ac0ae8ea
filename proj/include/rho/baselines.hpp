#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "rho/catalog.hpp"
#include "rho/dataset.hpp"
#include "rho/density.hpp"
#include "rho/evaluators.hpp"
#include "rho/model_space.hpp"
#include "rho/numeric.hpp"
#include "rho/psi.hpp"
#include "rho/rho_engine.hpp"

namespace rho {

// argmax_q sum_i log q(X_i) with log 0 = -inf, smallest index on ties.
// all_neg_inf reports that every member has zero likelihood.
inline EstimateResult mle_estimate(const Dataset& data, const CandidateFamily& family) {
  if (family.members.empty()) throw std::invalid_argument("mle_estimate: empty family");
  EstimateResult out;
  double best = -kInf;
  std::size_t best_i = 0;
  bool any_finite = false;

  if (!data.paired() && UniformIntervalEvaluator::applicable(family.members)) {
    // n log(1 / width) when the support covers the data, -inf otherwise
    auto [lo, hi] = std::minmax_element(data.x.begin(), data.x.end());
    const double n = static_cast<double>(data.size());
    for (std::size_t j = 0; j < family.size(); ++j) {
      const auto& u = family[j].as<UniformInterval>();
      if (data.empty() || (*lo >= u.a && *hi <= u.b)) {
        double ll = n * std::log(density_at(family[j], 0.5 * (u.a + u.b)));
        if (!any_finite || ll > best) {
          best = ll;
          best_i = j;
        }
        any_finite = true;
      }
    }
  } else {
    for (std::size_t j = 0; j < family.size(); ++j) {
      KahanSum s;
      for (std::size_t i = 0; i < data.size(); ++i) s.add(std::log(observation_density(family[j], data, i)));
      double ll = s.value();
      if (ll == -kInf) continue;
      if (!any_finite || ll > best) {
        best = ll;
        best_i = j;
      }
      any_finite = true;
    }
  }

  out.all_neg_inf = !any_finite;
  out.chosen_index = out.member_index = any_finite ? best_i : 0;
  out.criterion_value = any_finite ? best : -kInf;
  return out;
}

// Grenander estimator on a bin grid: pool-adjacent-violators on the histogram
// levels N_j / (n w_j) with width weights. Blocks are re-summed left to right
// after each merge.
inline DensitySpec grenander_estimate(const std::vector<double>& data, const std::vector<double>& bin_grid) {
  if (data.empty()) throw std::invalid_argument("grenander_estimate: empty data");
  if (bin_grid.size() < 2) throw std::invalid_argument("grenander_estimate: needs at least one bin");
  for (std::size_t i = 1; i < bin_grid.size(); ++i)
    if (!(bin_grid[i] > bin_grid[i - 1])) throw std::invalid_argument("grenander_estimate: grid must increase");
  const std::size_t k = bin_grid.size() - 1;
  std::vector<double> counts(k, 0.0), widths(k);
  for (std::size_t j = 0; j < k; ++j) widths[j] = bin_grid[j + 1] - bin_grid[j];
  for (double x : data) {
    if (x < 0.0) throw std::invalid_argument("grenander_estimate: data must be nonnegative");
    if (x < bin_grid.front() || x > bin_grid.back()) throw std::invalid_argument("grenander_estimate: grid does not cover the data");
    counts[detail::cell_of(bin_grid, x)] += 1.0;
  }
  const double n = static_cast<double>(data.size());

  struct Block {
    std::size_t first, last;
    double level;
  };
  auto pooled = [&](std::size_t first, std::size_t last) {
    double nb = 0.0, wb = 0.0;
    for (std::size_t j = first; j <= last; ++j) {
      nb += counts[j];
      wb += widths[j];
    }
    return nb / (n * wb);
  };
  std::vector<Block> blocks;
  for (std::size_t j = 0; j < k; ++j) {
    blocks.push_back({j, j, pooled(j, j)});
    while (blocks.size() > 1 && blocks.back().level > blocks[blocks.size() - 2].level) {
      Block b = blocks.back();
      blocks.pop_back();
      blocks.back().last = b.last;
      blocks.back().level = pooled(blocks.back().first, b.last);
    }
  }
  std::vector<double> levels(k);
  for (const auto& b : blocks)
    for (std::size_t j = b.first; j <= b.last; ++j) levels[j] = b.level;
  return piecewise_constant(bin_grid, std::move(levels));
}

struct GaussianSubmodelResult {
  double theta0_hat = 0.0;
  double grid_step = 0.0;
  double grid_center = 0.0;  // grid point nearest X_0
  EstimateResult result;
  std::vector<std::pair<double, double>> criterion_trace;  // (theta0, criterion) of fully evaluated points
};

// rho-estimator over Theta' = {(theta0, 0, ..., 0)} on the grid
// theta0 = (round(X_0 / step) + j) step, |j| <= half_width. Only coordinate 0
// differs between candidates, and
//   q'(X) / q(X) = exp([(X_0 - theta0)^2 - (X_0 - theta0')^2] / 2).
inline GaussianSubmodelResult gaussian_submodel_estimate(const std::vector<double>& x, const PsiKind& kind,
                                                         double step = 1e-3, std::size_t half_width = 500) {
  if (x.size() < 2) throw std::invalid_argument("gaussian_submodel_estimate: needs k >= 1");
  if (!(step > 0.0) || half_width == 0) throw std::invalid_argument("gaussian_submodel_estimate: empty grid");
  const double x0 = x[0];
  const double c = std::round(x0 / step);
  const std::size_t m = 2 * half_width + 1;
  std::vector<double> theta(m), d2(m);
  for (std::size_t i = 0; i < m; ++i) {
    theta[i] = (c + static_cast<double>(i) - static_cast<double>(half_width)) * step;
    double d = x0 - theta[i];
    d2[i] = d * d;
  }
  FunctionEvaluator ev(m, [&](std::size_t i, std::size_t j) {
    return psi_eval(kind, std::exp((d2[i] - d2[j]) / 4.0));
  });
  MinimaxResult r = solve_minimax(ev);

  GaussianSubmodelResult out;
  out.grid_step = step;
  out.grid_center = theta[half_width];
  out.theta0_hat = theta[r.chosen];
  out.result.chosen_index = out.result.member_index = r.chosen;
  out.result.criterion_value = r.value;
  out.result.adversary_index = out.result.adversary_member = r.adversary;
  out.result.full_scans = r.full_scans;
  for (auto [i, v] : r.evaluated) out.criterion_trace.emplace_back(theta[i], v);
  return out;
}

// sum_i log p_theta(X_i) for the density version of N(theta, 1) w.r.t.
// N(0, 1) that takes the exotic value only at x == theta > 0 (exact equality).
inline double pathological_loglik(const std::vector<double>& data, double theta) {
  KahanSum s;
  for (double xi : data) {
    double v = theta * xi - 0.5 * theta * theta;
    if (xi == theta && theta > 0.0) v += 0.5 * theta * theta * std::exp(xi * xi);
    s.add(v);
  }
  return s.value();
}

// Ordinary least squares via the normal equations (Phi^T Phi) b = Phi^T y,
// solved by Gaussian elimination with partial pivoting. Rank deficiency is
// detected from the pivot size relative to the largest diagonal entry.
inline std::vector<double> least_squares_fit(const Dataset& data, const PolynomialFeatures& features) {
  if (!data.paired()) throw std::invalid_argument("least_squares_fit: needs (w, y) pairs");
  const std::size_t p = features.dim;
  if (p == 0 || data.size() < p) throw std::invalid_argument("least_squares_fit: fewer observations than features");
  std::vector<double> A(p * p, 0.0), rhs(p, 0.0), phi(p);
  for (std::size_t i = 0; i < data.size(); ++i) {
    double v = 1.0;
    for (std::size_t j = 0; j < p; ++j) {
      phi[j] = v;
      v *= data.w[i];
    }
    for (std::size_t r = 0; r < p; ++r) {
      rhs[r] += phi[r] * data.x[i];
      for (std::size_t c = 0; c < p; ++c) A[r * p + c] += phi[r] * phi[c];
    }
  }
  double scale = 0.0;
  for (std::size_t r = 0; r < p; ++r) scale = std::max(scale, std::abs(A[r * p + r]));

  for (std::size_t col = 0; col < p; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < p; ++r)
      if (std::abs(A[r * p + col]) > std::abs(A[piv * p + col])) piv = r;
    if (!(std::abs(A[piv * p + col]) > 1e-12 * scale)) throw std::domain_error("least_squares_fit: design is rank deficient");
    if (piv != col) {
      for (std::size_t c = 0; c < p; ++c) std::swap(A[col * p + c], A[piv * p + c]);
      std::swap(rhs[col], rhs[piv]);
    }
    for (std::size_t r = col + 1; r < p; ++r) {
      double f = A[r * p + col] / A[col * p + col];
      for (std::size_t c = col; c < p; ++c) A[r * p + c] -= f * A[col * p + c];
      rhs[r] -= f * rhs[col];
    }
  }
  std::vector<double> beta(p);
  for (std::size_t r = p; r-- > 0;) {
    double s = rhs[r];
    for (std::size_t c = r + 1; c < p; ++c) s -= A[r * p + c] * beta[c];
    beta[r] = s / A[r * p + r];
  }
  return beta;
}

// Sample median; for even n the lower of the two middle order statistics.
inline double sample_median(std::vector<double> x) {
  if (x.empty()) throw std::invalid_argument("sample_median: empty data");
  std::size_t k = (x.size() - 1) / 2;
  std::nth_element(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(k), x.end());
  return x[k];
}

}  // namespace rho
