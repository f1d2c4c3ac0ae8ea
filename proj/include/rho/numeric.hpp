#pragma once

#include <cmath>
#include <stdexcept>

namespace rho {

// Kahan-compensated sum that keeps infinite terms out of the compensation.
// Adding both +inf and -inf is a domain error (an undefined comparison).
class KahanSum {
 public:
  void add(double v) {
    if (std::isinf(v)) {
      (v > 0 ? pos_inf_ : neg_inf_) = true;
      return;
    }
    if (std::isnan(v)) throw std::domain_error("KahanSum: NaN term");
    double y = v - c_;
    double t = s_ + y;
    c_ = (t - s_) - y;
    s_ = t;
  }

  double value() const {
    if (pos_inf_ && neg_inf_) throw std::domain_error("sum of +inf and -inf terms is undefined");
    if (pos_inf_) return INFINITY;
    if (neg_inf_) return -INFINITY;
    return s_;
  }

 private:
  double s_ = 0.0, c_ = 0.0;
  bool pos_inf_ = false, neg_inf_ = false;
};

}  // namespace rho
