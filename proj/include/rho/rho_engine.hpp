#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "rho/dataset.hpp"
#include "rho/density.hpp"
#include "rho/evaluators.hpp"
#include "rho/model_space.hpp"
#include "rho/numeric.hpp"
#include "rho/psi.hpp"

namespace rho {

struct EstimateResult {
  std::size_t chosen_index = 0;   // flat index (into the union for collections)
  std::size_t family_index = 0;
  std::size_t member_index = 0;
  double criterion_value = 0.0;
  std::size_t adversary_index = 0;
  std::size_t adversary_family = 0;
  std::size_t adversary_member = 0;
  std::optional<std::vector<std::vector<double>>> per_pair_matrix;
  bool all_neg_inf = false;       // likelihood baselines only
  std::size_t full_scans = 0;     // sup computations performed
};

struct MinimaxResult {
  std::size_t chosen = 0;
  double value = 0.0;
  std::size_t adversary = 0;
  std::size_t full_scans = 0;
  std::vector<std::pair<std::size_t, double>> evaluated;  // (index, exact criterion)
};

// sup_j t(i, j) with the smallest attaining j.
template <PairEvaluator E>
SupResult full_scan(const E& ev, std::size_t i) {
  if constexpr (SupEvaluator<E>) {
    if (ev.has_sup()) return ev.sup(i);
  }
  SupResult r{-kInf, 0};
  const std::size_t m = ev.size();
  for (std::size_t j = 0; j < m; ++j) {
    double v = ev.t(i, j);
    if (std::isnan(v)) throw std::domain_error("T statistic is undefined (NaN)");
    if (v > r.value) {
      r.value = v;
      r.adversary = j;
    }
  }
  return r;
}

namespace detail {
inline bool lex_less(double a, std::size_t ia, double b, std::size_t ib) { return a < b || (a == b && ia < ib); }
}  // namespace detail

// Exact argmin_i sup_j t(i, j), smallest index on ties.
//
// Branch and bound: every adversary found so far gives a lower bound
// lb(i) = max_a t(i, a) <= sup_j t(i, j). Members are fully scanned in order
// of increasing (lb, index) until the next bound exceeds the best criterion.
// With epsilon > 0 the smallest index whose criterion is within epsilon of
// the minimum is returned instead.
template <PairEvaluator E>
MinimaxResult solve_minimax(const E& ev, double epsilon = 0.0) {
  const std::size_t m = ev.size();
  if (m == 0) throw std::invalid_argument("solve_minimax: empty family");
  if (!(epsilon >= 0.0)) throw std::invalid_argument("solve_minimax: epsilon must be >= 0");

  MinimaxResult out;
  std::vector<double> crit(m, kInf);
  std::vector<std::size_t> adv(m, 0);
  std::vector<char> done(m, 0);

  auto evaluate = [&](std::size_t i) {
    SupResult s = full_scan(ev, i);
    crit[i] = s.value;
    adv[i] = s.adversary;
    done[i] = 1;
    ++out.full_scans;
    out.evaluated.emplace_back(i, s.value);
    return s;
  };

  bool direct = false;
  if constexpr (SupEvaluator<E>) direct = ev.has_sup();

  if (direct) {
    for (std::size_t i = 0; i < m; ++i) evaluate(i);
  } else {
    // T(i, i) = 0, so every criterion is >= 0
    std::vector<double> lb(m, 0.0);
    std::vector<char> is_adv(m, 0);
    auto add_adversary = [&](std::size_t a) {
      if (is_adv[a]) return;
      is_adv[a] = 1;
      for (std::size_t i = 0; i < m; ++i) {
        if (done[i]) continue;
        double v = ev.t(i, a);
        if (std::isnan(v)) throw std::domain_error("T statistic is undefined (NaN)");
        lb[i] = std::max(lb[i], v);
      }
    };

    double best = kInf;
    std::size_t best_i = 0;
    std::size_t next = 0;
    while (true) {
      SupResult s = evaluate(next);
      if (detail::lex_less(s.value, next, best, best_i)) {
        best = s.value;
        best_i = next;
      }
      add_adversary(s.adversary);

      bool found = false;
      double lo = kInf;
      for (std::size_t i = 0; i < m; ++i) {
        if (done[i]) continue;
        if (!found || detail::lex_less(lb[i], i, lo, next)) {
          lo = lb[i];
          next = i;
          found = true;
        }
      }
      if (!found || !detail::lex_less(lo, next, best, best_i)) break;
    }

    if (epsilon > 0.0) {
      const double limit = best + epsilon;
      for (std::size_t i = 0; i < best_i; ++i) {
        if (!done[i] && lb[i] > limit) continue;
        if (!done[i]) evaluate(i);
        if (crit[i] <= limit) break;
      }
    }
  }

  double best = kInf;
  std::size_t best_i = 0;
  for (std::size_t i = 0; i < m; ++i)
    if (done[i] && detail::lex_less(crit[i], i, best, best_i)) {
      best = crit[i];
      best_i = i;
    }
  if (epsilon > 0.0) {
    for (std::size_t i = 0; i < best_i; ++i)
      if (done[i] && crit[i] <= best + epsilon) {
        best_i = i;
        break;
      }
  }
  out.chosen = best_i;
  out.value = crit[best_i];
  out.adversary = adv[best_i];
  return out;
}

// T(X, q, q') = sum_i psi(sqrt(q'(X_i) / q(X_i))), computed directly.
inline double t_statistic(const Dataset& data, const DensitySpec& q, const DensitySpec& q2, const PsiKind& kind) {
  KahanSum s;
  for (std::size_t i = 0; i < data.size(); ++i)
    s.add(psi_ratio(kind, observation_density(q2, data, i), observation_density(q, data, i)));
  return s.value();
}

enum class EnginePath { automatic, generic };

struct EngineOptions {
  EnginePath path = EnginePath::automatic;
  double epsilon = 0.0;
  bool keep_matrix = false;           // per_pair_matrix for families of size <= kMatrixLimit
  std::size_t memory_cap = MatrixEvaluator::kDefaultMemoryCap;
  static constexpr std::size_t kMatrixLimit = 64;
};

namespace detail {

template <PairEvaluator E>
EstimateResult finish(const E& ev, const MinimaxResult& r, const EngineOptions& opt) {
  EstimateResult out;
  out.chosen_index = out.member_index = r.chosen;
  out.criterion_value = r.value;
  out.adversary_index = out.adversary_member = r.adversary;
  out.full_scans = r.full_scans;
  if (opt.keep_matrix && ev.size() <= EngineOptions::kMatrixLimit) {
    std::vector<std::vector<double>> mat(ev.size(), std::vector<double>(ev.size()));
    for (std::size_t i = 0; i < ev.size(); ++i)
      for (std::size_t j = 0; j < ev.size(); ++j) mat[i][j] = ev.t(i, j);
    out.per_pair_matrix = std::move(mat);
  }
  return out;
}

template <class F>
auto with_evaluator(const Dataset& data, const CandidateFamily& family, const PsiKind& kind, const EngineOptions& opt,
                    F&& f) {
  if (family.members.empty()) throw std::invalid_argument("rho: empty family");
  if (opt.path == EnginePath::automatic && !data.paired()) {
    if (family.lattice && family.lattice->units.size() == family.size())
      return f(HistogramEvaluator(data, family, kind));
    if (UniformIntervalEvaluator::applicable(family.members))
      return f(UniformIntervalEvaluator(data, family.members, kind));
  }
  return f(MatrixEvaluator(data, family.members, kind, opt.memory_cap));
}

}  // namespace detail

// (sup_{q'} T(X, q, q'), smallest attaining index) for member q.
inline SupResult rho_criterion(const Dataset& data, std::size_t q, const CandidateFamily& family, const PsiKind& kind,
                               const EngineOptions& opt = {}) {
  if (q >= family.size()) throw std::out_of_range("rho_criterion: member index out of range");
  return detail::with_evaluator(data, family, kind, opt, [&](const auto& ev) { return full_scan(ev, q); });
}

inline EstimateResult rho_estimate(const Dataset& data, const CandidateFamily& family, const PsiKind& kind,
                                   const EngineOptions& opt = {}) {
  return detail::with_evaluator(data, family, kind, opt, [&](const auto& ev) {
    return detail::finish(ev, solve_minimax(ev, opt.epsilon), opt);
  });
}

// Union of the families, in order, as one flat family.
inline CandidateFamily flatten(const PenalizedCollection& c) {
  CandidateFamily u;
  u.label = "union";
  for (const auto& f : c.families) u.members.insert(u.members.end(), f.members.begin(), f.members.end());
  return u;
}

inline std::pair<std::size_t, std::size_t> locate(const PenalizedCollection& c, std::size_t flat) {
  for (std::size_t f = 0; f < c.families.size(); ++f) {
    if (flat < c.families[f].size()) return {f, flat};
    flat -= c.families[f].size();
  }
  throw std::out_of_range("locate: index beyond the collection");
}

inline std::vector<double> member_penalties(const PenalizedCollection& c) {
  if (!c.has_penalties()) throw std::invalid_argument("penalized rho: penalties not assigned");
  std::vector<double> pen;
  for (std::size_t f = 0; f < c.families.size(); ++f) pen.insert(pen.end(), c.families[f].size(), c.pen[f]);
  return pen;
}

// Minimizes Upsilon(q) = sup_{q'} [T(X, q, q') - pen(q')] + pen(q) over the
// disjoint union of the models.
inline EstimateResult rho_estimate_penalized(const Dataset& data, const PenalizedCollection& c, const PsiKind& kind,
                                             const EngineOptions& opt = {}) {
  auto pen = member_penalties(c);
  CandidateFamily u = flatten(c);
  EngineOptions inner = opt;
  inner.keep_matrix = false;
  EstimateResult out = detail::with_evaluator(data, u, kind, inner, [&](const auto& ev) {
    PenalizedEvaluator pe(ev, pen);
    return detail::finish(pe, solve_minimax(pe, opt.epsilon), opt);
  });
  std::tie(out.family_index, out.member_index) = locate(c, out.chosen_index);
  std::tie(out.adversary_family, out.adversary_member) = locate(c, out.adversary_index);
  return out;
}

// Location families of equal-width uniforms with increasing left ends: the
// criterion is max_j N_j - N_i, so the estimator maximizes the interval count
// N_i = #{X in [a_i, b_i]}. Only members whose right end is the first to
// reach some observation (and member 0) can hold the smallest argmax.
// The family is checked once; estimates then cost O(n log m).
class UniformLocationGrid {
 public:
  explicit UniformLocationGrid(const CandidateFamily& family) {
    if (family.members.empty()) throw std::invalid_argument("uniform location grid: empty family");
    if (!UniformIntervalEvaluator::applicable(family.members))
      throw std::invalid_argument("uniform location grid: members must be uniform");
    const std::size_t m = family.size();
    a_.resize(m);
    b_.resize(m);
    const double len = family[0].as<UniformInterval>().length();
    for (std::size_t j = 0; j < m; ++j) {
      const auto& u = family[j].as<UniformInterval>();
      a_[j] = u.a;
      b_[j] = u.b;
      if (j > 0 && (!(a_[j] > a_[j - 1]) || !(b_[j] > b_[j - 1]) || u.length() != len))
        throw std::invalid_argument("uniform location grid: members must be equal-width translates in increasing order");
    }
  }

  std::size_t size() const { return a_.size(); }

  // argmax count, smallest index
  EstimateResult count_estimate(const Dataset& data) const {
    if (data.paired()) throw std::invalid_argument("count estimate: real-valued data required");
    std::vector<double> xs = data.x;
    std::sort(xs.begin(), xs.end());
    std::vector<std::size_t> cand{0};
    for (double x : xs) {
      auto g = static_cast<std::size_t>(std::lower_bound(b_.begin(), b_.end(), x) - b_.begin());
      if (g < size()) cand.push_back(g);
    }
    std::sort(cand.begin(), cand.end());
    cand.erase(std::unique(cand.begin(), cand.end()), cand.end());

    std::ptrdiff_t best = -1;
    std::size_t best_i = 0;
    for (std::size_t g : cand) {
      auto c = std::upper_bound(xs.begin(), xs.end(), b_[g]) - std::lower_bound(xs.begin(), xs.end(), a_[g]);
      if (c > best) {
        best = c;
        best_i = g;
      }
    }
    EstimateResult out;
    out.chosen_index = out.member_index = best_i;
    out.adversary_index = out.adversary_member = best_i;
    return out;
  }

  // Every covering member has likelihood width^-n; the first one is the
  // smallest j with b_j >= max X, if it also has a_j <= min X.
  EstimateResult mle(const Dataset& data) const {
    if (data.paired() || data.empty()) throw std::invalid_argument("uniform location mle: real-valued data required");
    auto [lo, hi] = std::minmax_element(data.x.begin(), data.x.end());
    auto g = static_cast<std::size_t>(std::lower_bound(b_.begin(), b_.end(), *hi) - b_.begin());
    EstimateResult out;
    out.all_neg_inf = !(g < size() && a_[g] <= *lo);
    out.chosen_index = out.member_index = out.all_neg_inf ? 0 : g;
    out.criterion_value =
        out.all_neg_inf ? -kInf : -static_cast<double>(data.size()) * std::log(b_[0] - a_[0]);
    return out;
  }

 private:
  std::vector<double> a_, b_;
};

inline EstimateResult uniform_location_count_estimate(const Dataset& data, const CandidateFamily& family) {
  return UniformLocationGrid(family).count_estimate(data);
}

}  // namespace rho
