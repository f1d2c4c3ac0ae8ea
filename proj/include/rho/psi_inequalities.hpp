#pragma once

#include <stdexcept>

#include "rho/discrete.hpp"
#include "rho/psi.hpp"

namespace rho {

struct InequalityReport {
  double lhs_mean = 0.0;      // sum_x r(x) psi(sqrt(q'(x)/q(x)))
  double rhs_mean = 0.0;      // a0 h2(R,Q) - a1 h2(R,Q')
  double lhs_variance = 0.0;  // sum_x r(x) psi(...)^2
  double rhs_variance = 0.0;  // a2^2 [h2(R,Q) + h2(R,Q')]

  double slack_mean() const { return rhs_mean - lhs_mean; }
  double slack_variance() const { return rhs_variance - lhs_variance; }
};

// Both moment inequalities for one triple (R, Q, Q') on a shared grid.
inline InequalityReport check_moment_inequalities(const PsiKind& kind, const DiscreteDensity& r,
                                                  const DiscreteDensity& q, const DiscreteDensity& q2) {
  if (!kind.bounded())
    throw std::invalid_argument("check_moment_inequalities: psi kind carries no (a0, a1, a2) constants");
  require_same_grid(r, q);
  require_same_grid(r, q2);

  InequalityReport rep;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (r[i] == 0.0) continue;
    double v = psi_ratio(kind, q2[i], q[i]);
    rep.lhs_mean += r[i] * v;
    rep.lhs_variance += r[i] * v * v;
  }
  double h_rq = hellinger2_discrete(r, q);
  double h_rq2 = hellinger2_discrete(r, q2);
  rep.rhs_mean = kind.a0 * h_rq - kind.a1 * h_rq2;
  rep.rhs_variance = kind.a2_sq * (h_rq + h_rq2);
  return rep;
}

}  // namespace rho
