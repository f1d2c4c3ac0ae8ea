#include <gtest/gtest.h>

#include <cmath>

#include "rho/catalog.hpp"
#include "rho/density.hpp"
#include "rho/psi.hpp"
#include "rho/quadrature.hpp"

using namespace rho;

TEST(Density, PointwiseExamples) {
  EXPECT_EQ(density_at(uniform(0, 1), 0.5), 1.0);
  EXPECT_DOUBLE_EQ(density_at(heavy_tail(0), 0.25), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(density_at(heavy_tail(0), 2.0), 1.0 / 24.0);
  EXPECT_EQ(density_at(heavy_tail(0), 0.0), kInf);
  EXPECT_DOUBLE_EQ(density_at(heavy_tail(0), -2.0), 1.0 / 24.0);
  EXPECT_EQ(density_at(exponential(2.0), -0.1), 0.0);
  EXPECT_DOUBLE_EQ(density_at(exponential(2.0), 0.0), 2.0);
  EXPECT_DOUBLE_EQ(density_at(cauchy(0, 1), 0.0), 1.0 / std::numbers::pi);
}

TEST(Density, RegressionPairs) {
  auto err = std::make_shared<const DensitySpec>(uniform(-0.5, 0.5));
  auto r = regression_conditional({1.0, 2.0}, err);
  EXPECT_EQ(density_at(r, 0.5, 2.2), 1.0);   // residual 0.2
  EXPECT_EQ(density_at(r, 0.5, 2.7), 0.0);   // residual 0.7
  EXPECT_THROW(density_at(r, 0.5), std::invalid_argument);
  EXPECT_THROW(density_at(uniform(0, 1), 0.5, 0.5), std::invalid_argument);
}

TEST(Density, PathologicalVersion) {
  auto p = pathological_gaussian(1.5);
  EXPECT_DOUBLE_EQ(density_at(p, 0.0), std::exp(-1.125));
  EXPECT_GT(density_at(p, 1.5), std::exp(1.5 * 1.5 - 1.125) * 2.0);
  EXPECT_DOUBLE_EQ(density_at(pathological_gaussian(-1.0), -1.0), std::exp(1.0 - 0.5));
}

TEST(Catalog, ValidatesParameters) {
  EXPECT_THROW(uniform(1, 1), std::invalid_argument);
  EXPECT_THROW(gaussian(0, 0), std::invalid_argument);
  EXPECT_THROW(exponential(-1), std::invalid_argument);
  EXPECT_THROW(piecewise_constant({0, 1, 2}, {0.5, 0.6}), std::invalid_argument);  // mass 1.1
  EXPECT_THROW(piecewise_constant({0, 1}, {-1.0}), std::invalid_argument);
  EXPECT_THROW(mixture({0.5, 0.6}, {uniform(0, 1), uniform(1, 2)}), std::invalid_argument);
  EXPECT_NO_THROW(mixture({0.5, 0.5}, {uniform(0, 1), gaussian(3, 1)}));
  EXPECT_NO_THROW(pathological_gaussian(2.0));
}

TEST(Catalog, EveryFamilyHasUnitMass) {
  std::vector<DensitySpec> all{uniform(-1, 2),
                               gaussian(1, 0.3),
                               exponential(0.5, 1.0),
                               truncated_exponential(2.0, 3.0, -1.0),
                               heavy_tail(0.7),
                               cauchy(0, 0.2),
                               piecewise_constant({0, 0.2, 1}, {2.5, 0.625}),
                               mixture({0.3, 0.7}, {heavy_tail(0), gaussian(5, 1)})};
  for (const auto& d : all) EXPECT_NEAR(quad::total_mass(d, 200000), 1.0, 1e-7) << family_name(d);
}

TEST(Catalog, HeavyTailCdfAndMass) {
  // F(1) = 1/2 + 1/3 and the tail beyond 2 is 1/12 (mpmath integration)
  EXPECT_NEAR(cdf(heavy_tail(0), 1.0), 0.833333333333333331, 1e-15);
  EXPECT_NEAR(1.0 - cdf(heavy_tail(0), 2.0), 1.0 / 12.0, 1e-15);
  EXPECT_NEAR(quad::total_mass(heavy_tail(0), 1000000), 1.0, 1e-9);
}

TEST(Density, ShiftAndWindows) {
  auto u = shifted(uniform(0, 1), 0.1);
  EXPECT_EQ(density_at(u, 1.05), 1.0);
  EXPECT_EQ(u.as<UniformInterval>().length(), 1.0);
  EXPECT_THROW(shifted(pathological_gaussian(1.0), 1.0), std::invalid_argument);
  auto j = jump_points(heavy_tail(0));
  ASSERT_EQ(j.size(), 2u);
  EXPECT_EQ(j[0], -1.0);
  EXPECT_EQ(singular_points(heavy_tail(3.0)).front(), 3.0);
}
