#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace rho::harness {

struct RiskSummary {
  std::size_t count = 0;
  double mean = 0.0;
  double sd = 0.0;  // unbiased
  double se = 0.0;  // sd / sqrt(count)
  double q50 = 0.0, q90 = 0.0, q99 = 0.0;
};

// Nearest-rank quantile: the ceil(p n)-th smallest value.
inline double nearest_rank(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) throw std::invalid_argument("nearest_rank: empty input");
  if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("nearest_rank: p must lie in (0, 1]");
  auto r = static_cast<std::size_t>(std::ceil(p * static_cast<double>(sorted.size())));
  return sorted[std::max<std::size_t>(r, 1) - 1];
}

// A single record has sd = se = 0.
inline RiskSummary estimate_risk(std::vector<double> losses) {
  if (losses.empty()) throw std::invalid_argument("estimate_risk: no records");
  RiskSummary r;
  r.count = losses.size();
  const double n = static_cast<double>(r.count);
  double s = 0.0;
  for (double v : losses) s += v;
  r.mean = s / n;
  if (r.count > 1) {
    double ss = 0.0;
    for (double v : losses) ss += (v - r.mean) * (v - r.mean);
    r.sd = std::sqrt(ss / (n - 1.0));
    r.se = r.sd / std::sqrt(n);
  }
  std::sort(losses.begin(), losses.end());
  r.q50 = nearest_rank(losses, 0.5);
  r.q90 = nearest_rank(losses, 0.9);
  r.q99 = nearest_rank(losses, 0.99);
  return r;
}

struct Frequency {
  std::size_t hits = 0, total = 0;
  double p() const { return total ? static_cast<double>(hits) / static_cast<double>(total) : 0.0; }
  // binomial standard error at the empirical (or a reference) proportion
  double se() const { return se_at(p()); }
  double se_at(double q) const { return total ? std::sqrt(q * (1.0 - q) / static_cast<double>(total)) : 0.0; }
};

}  // namespace rho::harness
