#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "rho/dataset.hpp"
#include "rho/density.hpp"
#include "rho/model_space.hpp"
#include "rho/numeric.hpp"
#include "rho/psi.hpp"

// Pairwise T(X, q_i, q_j) evaluators over a finite, ordered family.
namespace rho {

template <class E>
concept PairEvaluator = requires(const E& e, std::size_t i, std::size_t j) {
  { e.size() } -> std::convertible_to<std::size_t>;
  { e.t(i, j) } -> std::convertible_to<double>;
};

// Some evaluators can compute sup_j T(i, j) directly.
struct SupResult {
  double value;
  std::size_t adversary;
};

template <class E>
concept SupEvaluator = PairEvaluator<E> && requires(const E& e, std::size_t i) {
  { e.has_sup() } -> std::convertible_to<bool>;
  { e.sup(i) } -> std::convertible_to<SupResult>;
};

inline double observation_density(const DensitySpec& q, const Dataset& data, std::size_t i) {
  return data.paired() ? density_at(q, data.w[i], data.x[i]) : density_at(q, data.x[i]);
}

// Density values of every member at every observation, member-major, with
// their square roots. T only needs these pointwise values.
class MatrixEvaluator {
 public:
  static constexpr std::size_t kDefaultMemoryCap = std::size_t{1} << 31;

  MatrixEvaluator(const Dataset& data, const std::vector<DensitySpec>& members, PsiKind kind,
                  std::size_t memory_cap = kDefaultMemoryCap)
      : kind_(kind), n_(data.size()), m_(members.size()) {
    if (m_ == 0) throw std::invalid_argument("MatrixEvaluator: empty family");
    if (2.0 * sizeof(double) * static_cast<double>(n_) * static_cast<double>(m_) > static_cast<double>(memory_cap))
      throw std::length_error("MatrixEvaluator: density cache exceeds the memory cap");
    d_.resize(n_ * m_);
    for (std::size_t j = 0; j < m_; ++j)
      for (std::size_t i = 0; i < n_; ++i) {
        double v = observation_density(members[j], data, i);
        if (std::isnan(v) || v < 0.0) throw std::domain_error("MatrixEvaluator: invalid density value");
        d_[j * n_ + i] = v;
      }
    fill_roots();
  }

  // From raw values, values[j * n + i] = q_j(X_i).
  MatrixEvaluator(std::size_t n, std::size_t m, std::vector<double> values, PsiKind kind)
      : kind_(kind), n_(n), m_(m), d_(std::move(values)) {
    if (m_ == 0 || d_.size() != n_ * m_) throw std::invalid_argument("MatrixEvaluator: bad value matrix shape");
    for (double v : d_)
      if (std::isnan(v) || v < 0.0) throw std::domain_error("MatrixEvaluator: invalid density value");
    fill_roots();
  }

  std::size_t size() const { return m_; }
  std::size_t observations() const { return n_; }
  double value(std::size_t member, std::size_t obs) const { return d_[member * n_ + obs]; }

  double t(std::size_t q, std::size_t q2) const {
    if (q == q2) return 0.0;
    const double* a = &d_[q * n_];
    const double* b = &d_[q2 * n_];
    const double* ra = &r_[q * n_];
    const double* rb = &r_[q2 * n_];
    KahanSum s;
    for (std::size_t i = 0; i < n_; ++i) s.add(psi_ratio_roots(kind_, b[i], a[i], rb[i], ra[i]));
    return s.value();
  }

 private:
  void fill_roots() {
    r_.resize(d_.size());
    for (std::size_t k = 0; k < d_.size(); ++k) r_[k] = std::sqrt(d_[k]);
  }

  PsiKind kind_;
  std::size_t n_, m_;
  std::vector<double> d_, r_;
};

// Families of uniform densities on intervals. With sorted data,
//   T(q, q') = N(q' only) psi(inf) + N(q only) psi(0) + N(both) psi(sqrt(w_q / w_q')).
class UniformIntervalEvaluator {
 public:
  static bool applicable(const std::vector<DensitySpec>& members) {
    return !members.empty() && std::all_of(members.begin(), members.end(),
                                           [](const DensitySpec& s) { return s.is<UniformInterval>(); });
  }

  UniformIntervalEvaluator(const Dataset& data, const std::vector<DensitySpec>& members, PsiKind kind)
      : kind_(kind) {
    if (!applicable(members)) throw std::invalid_argument("UniformIntervalEvaluator: members must be uniform");
    if (data.paired()) throw std::invalid_argument("UniformIntervalEvaluator: real-valued data required");
    std::vector<double> xs = data.x;
    std::sort(xs.begin(), xs.end());
    const std::size_t m = members.size();
    below_.resize(m);
    upto_.resize(m);
    dens_.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
      const auto& u = members[j].as<UniformInterval>();
      below_[j] = static_cast<long>(std::lower_bound(xs.begin(), xs.end(), u.a) - xs.begin());
      upto_[j] = static_cast<long>(std::upper_bound(xs.begin(), xs.end(), u.b) - xs.begin());
      dens_[j] = density_at(members[j], 0.5 * (u.a + u.b));
    }
    plus_ = psi_eval(kind_, kInf);
    minus_ = psi_eval(kind_, 0.0);
  }

  std::size_t size() const { return dens_.size(); }
  long count(std::size_t j) const { return upto_[j] - below_[j]; }

  double t(std::size_t q, std::size_t q2) const {
    if (q == q2) return 0.0;
    long both = std::max(0L, std::min(upto_[q], upto_[q2]) - std::max(below_[q], below_[q2]));
    long only_new = count(q2) - both;
    long only_old = count(q) - both;
    KahanSum s;
    if (only_new > 0) s.add(static_cast<double>(only_new) * plus_);
    if (only_old > 0) s.add(static_cast<double>(only_old) * minus_);
    if (both > 0) s.add(static_cast<double>(both) * psi_ratio(kind_, dens_[q2], dens_[q]));
    return s.value();
  }

 private:
  PsiKind kind_;
  std::vector<long> below_, upto_;
  std::vector<double> dens_;
  double plus_ = 1.0, minus_ = -1.0;
};

// Histogram lattice families: T(q, q') = sum_j N_j psi(sqrt(p'_j / p_j)) from
// the cell counts N_j. Observations outside the partition have density 0
// under every member and contribute psi(0/0) = 0.
class HistogramEvaluator {
 public:
  HistogramEvaluator(const Dataset& data, const CandidateFamily& family, PsiKind kind)
      : kind_(kind), lat_(family.lattice) {
    if (!lat_) throw std::invalid_argument("HistogramEvaluator: family has no lattice");
    if (data.paired()) throw std::invalid_argument("HistogramEvaluator: real-valued data required");
    const auto& br = lat_->breakpoints;
    const std::size_t cells = lat_->cells();
    counts_.assign(cells, 0.0);
    for (double x : data.x)
      if (x >= br.front() && x <= br.back()) counts_[detail::cell_of(br, x)] += 1.0;

    // table_[j][u][v] = psi(sqrt(level_j(v) / level_j(u)))
    const int K = lat_->K;
    stride_ = static_cast<std::size_t>(K + 1);
    table_.resize(cells * stride_ * stride_);
    for (std::size_t j = 0; j < cells; ++j) {
      double w = br[j + 1] - br[j];
      std::vector<double> level(stride_);
      for (int k = 0; k <= K; ++k) level[static_cast<std::size_t>(k)] = (static_cast<double>(k) / static_cast<double>(K)) / w;
      for (std::size_t u = 0; u < stride_; ++u)
        for (std::size_t v = 0; v < stride_; ++v) table_[(j * stride_ + u) * stride_ + v] = psi_ratio(kind_, level[v], level[u]);
    }
  }

  std::size_t size() const { return lat_->units.size(); }
  const std::vector<double>& cell_counts() const { return counts_; }

  double t(std::size_t q, std::size_t q2) const {
    if (q == q2) return 0.0;
    const auto& a = lat_->units[q];
    const auto& b = lat_->units[q2];
    KahanSum s;
    for (std::size_t j = 0; j < counts_.size(); ++j)
      if (counts_[j] > 0.0) s.add(counts_[j] * entry(j, a[j], b[j]));
    return s.value();
  }

  // Greedy unit allocation maximizes a separable concave objective over the
  // full simplex lattice; psi(sqrt(t)) is concave in t for psi1 and psi2.
  bool has_sup() const { return lat_->complete && kind_.bounded(); }

  SupResult sup(std::size_t q) const {
    const auto& a = lat_->units[q];
    const std::size_t cells = counts_.size();
    std::vector<int> v(cells, 0);
    for (int step = 0; step < lat_->K; ++step) {
      std::size_t best = cells;
      double gain = -kInf;
      for (std::size_t j = 0; j < cells; ++j) {
        if (v[j] == lat_->K) continue;
        double g = counts_[j] * (entry(j, a[j], v[j] + 1) - entry(j, a[j], v[j]));
        if (g > gain) {
          gain = g;
          best = j;
        }
      }
      ++v[best];
    }
    auto idx = lat_->index_of(v);
    if (!idx) throw std::logic_error("HistogramEvaluator: greedy allocation left the lattice");
    double val = t(q, *idx);
    // the member itself is always a candidate (T = 0)
    if (val < 0.0 || (val == 0.0 && q < *idx)) return {0.0, q};
    return {val, *idx};
  }

 private:
  double entry(std::size_t j, int u, int v) const {
    return table_[(j * stride_ + static_cast<std::size_t>(u)) * stride_ + static_cast<std::size_t>(v)];
  }

  PsiKind kind_;
  std::shared_ptr<const HistogramLattice> lat_;
  std::vector<double> counts_;
  std::size_t stride_ = 1;
  std::vector<double> table_;
};

// T(i, j) - pen_j + pen_i over a flattened union of families.
template <PairEvaluator E>
class PenalizedEvaluator {
 public:
  PenalizedEvaluator(const E& base, std::vector<double> pen) : base_(base), pen_(std::move(pen)) {
    if (pen_.size() != base_.size()) throw std::invalid_argument("PenalizedEvaluator: one penalty per member");
  }
  std::size_t size() const { return base_.size(); }
  double t(std::size_t i, std::size_t j) const {
    if (i == j) return 0.0;
    return (base_.t(i, j) - pen_[j]) + pen_[i];
  }

 private:
  const E& base_;
  std::vector<double> pen_;
};

// Evaluator from a callable t(i, j).
class FunctionEvaluator {
 public:
  FunctionEvaluator(std::size_t m, std::function<double(std::size_t, std::size_t)> f) : m_(m), f_(std::move(f)) {
    if (m_ == 0) throw std::invalid_argument("FunctionEvaluator: empty family");
  }
  std::size_t size() const { return m_; }
  double t(std::size_t i, std::size_t j) const { return i == j ? 0.0 : f_(i, j); }

 private:
  std::size_t m_;
  std::function<double(std::size_t, std::size_t)> f_;
};

}  // namespace rho
