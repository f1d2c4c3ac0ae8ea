#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

namespace rho {

// Probability masses on a finite, strictly increasing support (cell ids or
// midpoints).
class DiscreteDensity {
 public:
  DiscreteDensity(std::vector<double> support, std::vector<double> mass)
      : support_(std::move(support)), mass_(std::move(mass)) {
    if (support_.size() != mass_.size() || support_.empty())
      throw std::invalid_argument("DiscreteDensity: support and mass must have equal nonzero length");
    double total = 0.0;
    for (std::size_t i = 0; i < mass_.size(); ++i) {
      if (!(mass_[i] >= 0.0) || !std::isfinite(mass_[i]))
        throw std::invalid_argument("DiscreteDensity: masses must be finite and nonnegative");
      if (i > 0 && !(support_[i] > support_[i - 1]))
        throw std::invalid_argument("DiscreteDensity: support must be strictly increasing");
      total += mass_[i];
    }
    if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("DiscreteDensity: masses must sum to 1");
  }

  // Masses on the cells 0..k-1.
  static DiscreteDensity on_cells(std::vector<double> mass) {
    std::vector<double> s(mass.size());
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = static_cast<double>(i);
    return DiscreteDensity(std::move(s), std::move(mass));
  }

  std::size_t size() const { return mass_.size(); }
  const std::vector<double>& support() const { return support_; }
  const std::vector<double>& mass() const { return mass_; }
  double operator[](std::size_t i) const { return mass_[i]; }

 private:
  std::vector<double> support_;
  std::vector<double> mass_;
};

inline void require_same_grid(const DiscreteDensity& p, const DiscreteDensity& q) {
  if (p.support() != q.support()) throw std::invalid_argument("discrete densities live on different grids");
}

inline double affinity_discrete(const DiscreteDensity& p, const DiscreteDensity& q) {
  require_same_grid(p, q);
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::sqrt(p[i] * q[i]);
  return s;
}

// (1/2) sum (sqrt p - sqrt q)^2
inline double hellinger2_discrete(const DiscreteDensity& p, const DiscreteDensity& q) {
  require_same_grid(p, q);
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    double d = std::sqrt(p[i]) - std::sqrt(q[i]);
    s += d * d;
  }
  return 0.5 * s;
}

inline double total_variation_discrete(const DiscreteDensity& p, const DiscreteDensity& q) {
  require_same_grid(p, q);
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return 0.5 * s;
}

}  // namespace rho
