#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "rho/catalog.hpp"
#include "rho/dataset.hpp"
#include "rho/model_space.hpp"
#include "rho/sampling.hpp"

// Small random (data, family) instances for oracle and property checks.
namespace rho::harness {

struct Instance {
  Dataset data;
  CandidateFamily family;
  int kind = 0;  // 0 gaussian loc, 1 heavy-tail loc, 2 uniform intervals, 3 mixed, 4 histogram lattice
};

inline std::size_t uniform_index(Stream& s, std::size_t n) {
  return std::min(n - 1, static_cast<std::size_t>(s.u01() * static_cast<double>(n)));
}

// Strictly increasing values drawn from [lo, hi).
inline std::vector<double> sorted_unique(Stream& s, std::size_t m, double lo, double hi) {
  std::vector<double> v;
  while (v.size() < m) {
    v.push_back(lo + (hi - lo) * s.u01());
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }
  return v;
}

inline Instance random_instance(Stream& s, std::size_t max_members = 12, std::size_t max_n = 50) {
  Instance out;
  const std::size_t m = 1 + uniform_index(s, max_members);
  const std::size_t n = 1 + uniform_index(s, max_n);
  out.kind = static_cast<int>(uniform_index(s, 5));
  DensitySpec truth = gaussian(0, 1);

  switch (out.kind) {
    case 0: {
      double sd = 0.5 + 1.5 * s.u01();
      out.family = build_location_family(gaussian(0, sd), sorted_unique(s, m, -2.0, 2.0), "gaussian_location");
      truth = gaussian(2.0 * s.u01() - 1.0, 1.0);
      break;
    }
    case 1:
      out.family = build_location_family(heavy_tail(0), sorted_unique(s, m, -1.0, 1.0), "heavy_tail_location");
      truth = heavy_tail(0.5 * s.u01());
      break;
    case 2: {
      const double widths[] = {0.5, 1.0, 1.5, 2.0};
      for (std::size_t j = 0; j < m; ++j) {
        double a = std::round(8.0 * (3.0 * s.u01() - 1.0)) / 8.0;  // coarse grid: frequent ties
        out.family.members.push_back(uniform(a, a + widths[uniform_index(s, 4)]));
      }
      out.family.label = "uniform_intervals";
      truth = uniform(-1.0, 3.0);
      break;
    }
    case 3:
      for (std::size_t j = 0; j < m; ++j) {
        switch (uniform_index(s, 4)) {
          case 0: out.family.members.push_back(gaussian(2.0 * s.u01() - 1.0, 0.3 + s.u01())); break;
          case 1: out.family.members.push_back(cauchy(2.0 * s.u01() - 1.0, 0.2 + s.u01())); break;
          case 2: out.family.members.push_back(exponential(0.5 + s.u01(), -1.0 + s.u01())); break;
          default: out.family.members.push_back(uniform(-1.0 - s.u01(), 1.0 + s.u01())); break;
        }
      }
      out.family.label = "mixed";
      truth = mixture({0.8, 0.2}, {gaussian(0, 1), cauchy(0, 1)});
      break;
    default: {
      std::size_t cells = 2 + uniform_index(s, 2);
      std::vector<double> br{0.0};
      for (std::size_t j = 1; j < cells; ++j) br.push_back(static_cast<double>(j) / static_cast<double>(cells));
      br.push_back(1.0);
      out.family = build_histogram_family(br, cells == 2 ? 0.125 : 0.25);  // 9 or 15 members
      truth = mixture({0.9, 0.1}, {uniform(0, 0.6), uniform(0, 1.2)});
      break;
    }
  }
  out.data = sample(SamplerSpec{truth, 0x5eed, s.next_u64()}, n);
  return out;
}

}  // namespace rho::harness
