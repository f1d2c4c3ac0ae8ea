#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "rho/dataset.hpp"
#include "rho/density.hpp"
#include "rho/model_space.hpp"
#include "rho/numeric.hpp"
#include "rho/psi.hpp"
#include "rho/rho_engine.hpp"

// Naive re-computations used as test oracles. Nothing here touches the
// evaluator caches: every T value is recomputed from density_at.
namespace rho::oracle {

inline double naive_density(const DensitySpec& q, const Dataset& data, std::size_t i) {
  return data.paired() ? density_at(q, data.w[i], data.x[i]) : density_at(q, data.x[i]);
}

inline double naive_t(const Dataset& data, const DensitySpec& q, const DensitySpec& q2, const PsiKind& kind) {
  KahanSum s;
  for (std::size_t i = 0; i < data.size(); ++i) s.add(psi_ratio(kind, naive_density(q2, data, i), naive_density(q, data, i)));
  return s.value();
}

// O(|Q|^2 n) enumeration; same contract as rho_estimate.
inline EstimateResult brute_force_oracle(const Dataset& data, const CandidateFamily& family, const PsiKind& kind) {
  const std::size_t m = family.size();
  if (m == 0) throw std::invalid_argument("brute_force_oracle: empty family");
  EstimateResult best;
  best.criterion_value = kInf;
  for (std::size_t i = 0; i < m; ++i) {
    double sup = -kInf;
    std::size_t arg = 0;
    for (std::size_t j = 0; j < m; ++j) {
      double v = i == j ? 0.0 : naive_t(data, family[i], family[j], kind);
      if (v > sup) {
        sup = v;
        arg = j;
      }
    }
    if (sup < best.criterion_value) {
      best.criterion_value = sup;
      best.chosen_index = best.member_index = i;
      best.adversary_index = best.adversary_member = arg;
    }
  }
  return best;
}

inline EstimateResult brute_force_penalized(const Dataset& data, const PenalizedCollection& c, const PsiKind& kind) {
  if (!c.has_penalties()) throw std::invalid_argument("brute_force_penalized: penalties not assigned");
  EstimateResult best;
  best.criterion_value = kInf;
  std::size_t flat_i = 0;
  for (std::size_t fi = 0; fi < c.families.size(); ++fi) {
    for (std::size_t mi = 0; mi < c.families[fi].size(); ++mi, ++flat_i) {
      double sup = -kInf;
      std::size_t arg_f = 0, arg_m = 0, arg = 0, flat_j = 0;
      for (std::size_t fj = 0; fj < c.families.size(); ++fj)
        for (std::size_t mj = 0; mj < c.families[fj].size(); ++mj, ++flat_j) {
          double tv = flat_i == flat_j ? 0.0 : naive_t(data, c.families[fi][mi], c.families[fj][mj], kind);
          double v = flat_i == flat_j ? 0.0 : (tv - c.pen[fj]) + c.pen[fi];
          if (v > sup) {
            sup = v;
            arg_f = fj;
            arg_m = mj;
            arg = flat_j;
          }
        }
      if (sup < best.criterion_value) {
        best.criterion_value = sup;
        best.chosen_index = flat_i;
        best.family_index = fi;
        best.member_index = mi;
        best.adversary_index = arg;
        best.adversary_family = arg_f;
        best.adversary_member = arg_m;
      }
    }
  }
  return best;
}

// Smallest index maximizing the number of observations in the member's
// support interval (uniform members only).
inline std::size_t argmax_interval_count(const Dataset& data, const CandidateFamily& family) {
  std::size_t best = 0;
  long best_count = -1;
  for (std::size_t j = 0; j < family.size(); ++j) {
    const auto& u = family[j].as<UniformInterval>();
    long c = 0;
    for (double x : data.x) c += (x >= u.a && x <= u.b) ? 1 : 0;
    if (c > best_count) {
      best_count = c;
      best = j;
    }
  }
  return best;
}

// Constrained MLE over non-increasing histograms by enumerating every split of
// the bins into consecutive pooled blocks. Pooled level = N_B / (n W_B), with
// sums taken left to right.
inline std::vector<double> brute_force_decreasing_mle(const std::vector<double>& counts, const std::vector<double>& widths) {
  const std::size_t k = counts.size();
  if (k == 0 || widths.size() != k) throw std::invalid_argument("brute_force_decreasing_mle: bad input");
  if (k > 20) throw std::invalid_argument("brute_force_decreasing_mle: too many bins");
  double n = 0.0;
  for (double c : counts) n += c;
  if (!(n > 0.0)) throw std::invalid_argument("brute_force_decreasing_mle: empty data");

  std::vector<double> best;
  double best_ll = -kInf;
  for (unsigned long mask = 0; mask < (1ul << (k - 1)); ++mask) {
    // bit b set: a block boundary between bins b and b+1
    std::vector<double> lev(k);
    std::size_t start = 0;
    for (std::size_t b = 0; b < k; ++b) {
      bool cut = b + 1 == k || (mask >> b) & 1ul;
      if (!cut) continue;
      double nb = 0.0, wb = 0.0;
      for (std::size_t j = start; j <= b; ++j) {
        nb += counts[j];
        wb += widths[j];
      }
      double l = nb / (n * wb);
      for (std::size_t j = start; j <= b; ++j) lev[j] = l;
      start = b + 1;
    }
    bool ok = true;
    for (std::size_t j = 1; j < k && ok; ++j) ok = lev[j] <= lev[j - 1];
    if (!ok) continue;
    double ll = 0.0;
    for (std::size_t j = 0; j < k; ++j)
      if (counts[j] > 0.0) ll += counts[j] * std::log(lev[j]);
    if (ll > best_ll) {
      best_ll = ll;
      best = lev;
    }
  }
  return best;
}

}  // namespace rho::oracle
