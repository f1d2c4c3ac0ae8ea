#include <gtest/gtest.h>

#include <cmath>

#include "rho/catalog.hpp"
#include "rho/discrete.hpp"
#include "rho/hellinger.hpp"
#include "rho/sampling.hpp"

using namespace rho;

namespace {
DiscreteDensity random_density(Stream& s, std::size_t k) {
  std::vector<double> m(k);
  double tot = 0.0;
  for (auto& v : m) {
    v = s.u01() < 0.3 ? 0.0 : -std::log(s.u01());
    tot += v;
  }
  if (tot == 0.0) {
    m[k - 1] = 1.0;
    tot = 1.0;
  }
  for (auto& v : m) v /= tot;
  return DiscreteDensity::on_cells(m);
}

DiscreteDensity discretized_uniform(double a, double b, double lo, double hi, std::size_t cells) {
  std::vector<double> m(cells);
  double w = (hi - lo) / static_cast<double>(cells), tot = 0.0;
  for (std::size_t i = 0; i < cells; ++i) {
    double c0 = lo + w * static_cast<double>(i), c1 = c0 + w;
    m[i] = std::max(0.0, std::min(c1, b) - std::max(c0, a)) / (b - a);
    tot += m[i];
  }
  for (auto& v : m) v /= tot;
  return DiscreteDensity::on_cells(m);
}
}  // namespace

TEST(HellingerDiscrete, Examples) {
  auto p = DiscreteDensity::on_cells({0.2, 0.3, 0.5, 0.0});
  auto q = DiscreteDensity::on_cells({0.0, 0.0, 0.0, 1.0});
  EXPECT_EQ(hellinger2_discrete(p, p), 0.0);
  EXPECT_DOUBLE_EQ(hellinger2_discrete(p, q), 1.0);
  EXPECT_EQ(affinity_discrete(p, q), 0.0);
  // U[0,1] vs U[1/2,3/2] on 10^4 cells of [0, 2]: closed form 1/2
  auto u = discretized_uniform(0.0, 1.0, 0.0, 2.0, 10000);
  auto v = discretized_uniform(0.5, 1.5, 0.0, 2.0, 10000);
  EXPECT_NEAR(hellinger2_discrete(u, v), 0.5, 1e-3);
  EXPECT_THROW(hellinger2_discrete(p, DiscreteDensity::on_cells({1.0})), std::invalid_argument);
}

TEST(HellingerDiscrete, Properties) {
  Stream s(99, 3);
  for (int t = 0; t < 2000; ++t) {
    std::size_t k = 1 + static_cast<std::size_t>(s.u01() * 12.0);
    auto p = random_density(s, k), q = random_density(s, k), r = random_density(s, k);
    double hpq = hellinger2_discrete(p, q);
    EXPECT_EQ(hpq, hellinger2_discrete(q, p));
    EXPECT_NEAR(hpq, 1.0 - affinity_discrete(p, q), 1e-12);
    EXPECT_LE(std::sqrt(hellinger2_discrete(p, r)),
              std::sqrt(hpq) + std::sqrt(hellinger2_discrete(q, r)) + 1e-9);
    EXPECT_LE(hpq, total_variation_discrete(p, q) + 1e-12);
    // contamination: h^2((1-eps) P + eps Q, P) <= eps
    double eps = s.u01();
    std::vector<double> mix(k);
    for (std::size_t i = 0; i < k; ++i) mix[i] = (1.0 - eps) * p[i] + eps * q[i];
    EXPECT_LE(hellinger2_discrete(DiscreteDensity::on_cells(mix), p), eps + 1e-12);
    // refinement: split cell 0 proportionally
    std::vector<double> pr{0.3 * p[0], 0.7 * p[0]}, qr{0.3 * q[0], 0.7 * q[0]};
    for (std::size_t i = 1; i < k; ++i) {
      pr.push_back(p[i]);
      qr.push_back(q[i]);
    }
    EXPECT_NEAR(hellinger2_discrete(DiscreteDensity::on_cells(pr), DiscreteDensity::on_cells(qr)), hpq, 1e-12);
  }
}

TEST(HellingerAnalytic, Examples) {
  // closed form 1 - sqrt(1 - e^{-3}), evaluated independently at 30 digits
  EXPECT_NEAR(*hellinger2_analytic(exponential(1.0), truncated_exponential(1.0, 3.0)), 0.0252113400166495284, 1e-15);
  EXPECT_NEAR(*hellinger2_analytic(truncated_exponential(1.0, 3.0), exponential(1.0)), 0.0252113400166495284, 1e-15);
  EXPECT_NEAR(*hellinger2_analytic(uniform(0, 1), uniform(0.3, 1.3)), 0.3, 1e-15);
  EXPECT_EQ(*hellinger2_analytic(gaussian(0, 1), gaussian(0, 1)), 0.0);
  // general Gaussian pair; mpmath quadrature oracle 0.14919453784735981
  EXPECT_NEAR(*hellinger2_analytic(gaussian(0, 1), gaussian(1, 2)), 0.149194537847359789, 1e-14);
  EXPECT_FALSE(hellinger2_analytic(gaussian(0, 1), heavy_tail(0)).has_value());
  EXPECT_FALSE(hellinger2_analytic(exponential(1.0), truncated_exponential(2.0, 3.0)).has_value());
}

TEST(HellingerQuadrature, MatchesClosedForms) {
  auto g = gaussian(0, 1);
  EXPECT_NEAR(hellinger2_quadrature(g, g, {1000, {-12, 12}, false}), 0.0, 1e-12);
  double q = hellinger2_quadrature(exponential(1.0), truncated_exponential(1.0, 3.0), {1000000, {0, 3}, true});
  EXPECT_NEAR(q, *hellinger2_analytic(exponential(1.0), truncated_exponential(1.0, 3.0)), 1e-8);
  EXPECT_NEAR(hellinger2_quadrature(uniform(0, 1), uniform(0.5, 1.5), {1000, {0, 1.5}, false}), 0.5, 1e-6);
  EXPECT_NEAR(hellinger2_quadrature(gaussian(0, 1), gaussian(1, 2), {400000, {-30, 30}, false}),
              0.149194537847359789, 1e-8);
  EXPECT_THROW(hellinger2_quadrature(g, g, {1000, {-1, 1}, false}), std::invalid_argument);
  EXPECT_THROW(hellinger2_quadrature(g, g, {1, {-12, 12}, false}), std::invalid_argument);
}

TEST(HellingerQuadrature, SingularDensity) {
  auto h = heavy_tail(0.0);
  EXPECT_NEAR(hellinger2_quadrature(h, h, {10000, natural_window(h), true}), 0.0, 1e-8);
  double a = hellinger2(h, heavy_tail(0.5), 400000);
  double b = hellinger2(heavy_tail(0.5), h, 400000);
  EXPECT_GT(a, 0.0);
  EXPECT_LT(a, 1.0);
  EXPECT_NEAR(a, b, 1e-9);
}

TEST(HellingerPiecewise, Exact) {
  EXPECT_NEAR(hellinger2_piecewise(uniform(0, 1), uniform(0.5, 1.5)), 0.5, 1e-15);
  auto p = histogram_density({0, 0.5, 1}, {0.2, 0.8});
  // affinity = 0.5 * (sqrt(0.4 * 2) + sqrt(1.6 * 2)) / ... computed on cells directly
  double aff = std::sqrt(0.2 * 0.5) + std::sqrt(0.8 * 0.5);
  EXPECT_NEAR(hellinger2_piecewise(p, uniform(0, 1)), 1.0 - aff, 1e-15);
  auto mix = mixture({0.9, 0.1}, {uniform(0, 1), uniform(2, 3)});
  EXPECT_NEAR(hellinger2_piecewise(mix, uniform(0, 1)), 1.0 - std::sqrt(0.9), 1e-15);
  EXPECT_THROW(hellinger2_piecewise(gaussian(0, 1), uniform(0, 1)), std::invalid_argument);
}

TEST(ProductHellinger, Additivity) {
  std::vector<std::pair<DensitySpec, DensitySpec>> same(5, {uniform(0, 1), uniform(0, 1)});
  EXPECT_EQ(product_hellinger2(same), 0.0);
  std::vector<std::pair<DensitySpec, DensitySpec>> ten(10, {uniform(0, 1), uniform(0.5, 1.5)});
  EXPECT_NEAR(product_hellinger2(ten), 5.0, 1e-12);
  std::vector<std::pair<DensitySpec, DensitySpec>> mixed{{uniform(0, 1), uniform(0.3, 1.3)},
                                                         {gaussian(0, 1), gaussian(1, 2)}};
  EXPECT_NEAR(product_hellinger2(mixed), 0.3 + 0.149194537847359789, 1e-12);
}
