#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rho {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class PsiVariant { Psi1, Psi2, HalfLog };

// A psi function together with the constants (a0, a1, a2^2) of its two
// moment inequalities. HalfLog carries no constants.
struct PsiKind {
  PsiVariant variant = PsiVariant::Psi1;
  double a0 = 0.0;
  double a1 = 0.0;
  double a2_sq = 0.0;

  bool bounded() const { return variant != PsiVariant::HalfLog; }
};

inline PsiKind psi1() { return {PsiVariant::Psi1, 4.0, 3.0 / 8.0, 3.0 * std::sqrt(2.0)}; }
inline PsiKind psi2() { return {PsiVariant::Psi2, 4.97, 0.083, 3.0 + 2.0 * std::sqrt(2.0)}; }
inline PsiKind half_log() { return {PsiVariant::HalfLog, 0.0, 0.0, 0.0}; }

inline std::string_view name(const PsiKind& k) {
  switch (k.variant) {
    case PsiVariant::Psi1: return "psi1";
    case PsiVariant::Psi2: return "psi2";
    case PsiVariant::HalfLog: return "halflog";
  }
  return "?";
}

inline PsiKind psi_from_name(std::string_view s) {
  if (s == "psi1") return psi1();
  if (s == "psi2") return psi2();
  if (s == "halflog") return half_log();
  throw std::invalid_argument("unknown psi kind: " + std::string(s));
}

// psi(x) on the extended half-line [0, +inf]. Exact at 0, 1 and +inf.
inline double psi_eval(const PsiKind& k, double x) {
  if (std::isnan(x) || x < 0.0) throw std::domain_error("psi_eval: argument must lie in [0, +inf]");
  if (x == 1.0) return 0.0;
  switch (k.variant) {
    case PsiVariant::Psi1:
      if (x == kInf) return 1.0;
      return (x - 1.0) / (x + 1.0);
    case PsiVariant::Psi2:
      if (x == kInf) return 1.0;
      // hypot avoids overflow of x*x for large finite x
      return (x - 1.0) / std::hypot(x, 1.0);
    case PsiVariant::HalfLog:
      if (x == kInf) return kInf;
      if (x == 0.0) return -kInf;
      return 0.5 * std::log(x);
  }
  return 0.0;
}

// psi(sqrt(num/den)) with 0/0 = 1 and a/0 = +inf for a > 0. A pair of equal
// infinite values (an evaluation at an integrable singularity) also counts as
// ratio 1.
//
// Computed from the square roots rn = sqrt(num), rd = sqrt(den):
//   psi1: (rn - rd) / (rn + rd),  psi2: (rn - rd) / sqrt(num + den).
// The cached evaluators pass precomputed roots and get bitwise the same values.
inline double psi_ratio_roots(const PsiKind& k, double num, double den, double rn, double rd) {
  if (num == den) return 0.0;
  if (den == 0.0 || num == kInf) return psi_eval(k, kInf);
  if (num == 0.0 || den == kInf) return psi_eval(k, 0.0);
  switch (k.variant) {
    case PsiVariant::Psi1:
      return (rn - rd) / (rn + rd);
    case PsiVariant::Psi2: {
      double s = num + den;
      return (rn - rd) / (s == kInf ? std::hypot(rn, rd) : std::sqrt(s));
    }
    case PsiVariant::HalfLog:
      return 0.5 * (std::log(num) - std::log(den));
  }
  return 0.0;
}

inline double psi_ratio(const PsiKind& k, double num, double den) {
  if (std::isnan(num) || std::isnan(den) || num < 0.0 || den < 0.0)
    throw std::domain_error("psi_ratio: arguments must be nonnegative");
  return psi_ratio_roots(k, num, den, std::sqrt(num), std::sqrt(den));
}

struct AxiomReport {
  double max_antisymmetry_defect = 0.0;
  std::size_t monotonicity_violations = 0;
  std::size_t boundedness_violations = 0;
  // ratio psi(x) / ((log x)/2) over the two windows around 1 (Psi1 only;
  // x = 1 itself is skipped)
  bool has_log_ratio = false;
  double ratio_min_half = kInf, ratio_max_half = -kInf;      // [1/2, 2]
  double ratio_min_quarter = kInf, ratio_max_quarter = -kInf; // [1/4, 4]

  bool passed() const {
    bool ok = max_antisymmetry_defect <= 1e-12 && monotonicity_violations == 0 &&
              boundedness_violations == 0;
    if (has_log_ratio) {
      if (ratio_min_half <= ratio_max_half)
        ok = ok && ratio_min_half > 0.96 && ratio_max_half <= 1.0;
      if (ratio_min_quarter <= ratio_max_quarter)
        ok = ok && ratio_min_quarter > 0.86 && ratio_max_quarter <= 1.0;
    }
    return ok;
  }
};

// Ties on adjacent grid points are tolerated only when the two psi values are
// within one ulp of each other.
inline AxiomReport check_psi_axioms(const PsiKind& k, std::span<const double> grid) {
  if (grid.empty()) throw std::invalid_argument("check_psi_axioms: empty grid");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0) || !std::isfinite(grid[i]))
      throw std::invalid_argument("check_psi_axioms: grid values must lie in (0, +inf)");
    if (i > 0 && !(grid[i] > grid[i - 1]))
      throw std::invalid_argument("check_psi_axioms: grid must be strictly increasing");
  }

  AxiomReport rep;
  rep.has_log_ratio = k.variant == PsiVariant::Psi1;
  double prev = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double x = grid[i];
    double v = psi_eval(k, x);
    double vi = psi_eval(k, 1.0 / x);
    double defect = std::abs(v + vi);
    if (std::isnan(defect)) defect = kInf;
    rep.max_antisymmetry_defect = std::max(rep.max_antisymmetry_defect, defect);
    if (!(std::abs(v) <= 1.0)) ++rep.boundedness_violations;
    if (i > 0 && v < std::nextafter(prev, -kInf)) ++rep.monotonicity_violations;
    prev = v;

    if (rep.has_log_ratio && x != 1.0) {
      double r = v / (0.5 * std::log(x));
      if (x >= 0.5 && x <= 2.0) {
        rep.ratio_min_half = std::min(rep.ratio_min_half, r);
        rep.ratio_max_half = std::max(rep.ratio_max_half, r);
      }
      if (x >= 0.25 && x <= 4.0) {
        rep.ratio_min_quarter = std::min(rep.ratio_min_quarter, r);
        rep.ratio_max_quarter = std::max(rep.ratio_max_quarter, r);
      }
    }
  }
  return rep;
}

inline std::vector<double> log_grid(double lo, double hi, std::size_t points) {
  if (!(lo > 0.0) || !(hi > lo) || points < 2) throw std::invalid_argument("log_grid: bad range");
  std::vector<double> g(points);
  double a = std::log(lo), b = std::log(hi);
  for (std::size_t i = 0; i < points; ++i)
    g[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(points - 1));
  g.front() = lo;
  g.back() = hi;
  return g;
}

}  // namespace rho
