#include <gtest/gtest.h>

#include <cmath>

#include "rho/psi.hpp"
#include "rho/psi_inequalities.hpp"
#include "rho/sampling.hpp"

using namespace rho;

TEST(Psi, Constants) {
  EXPECT_EQ(psi1().a0, 4.0);
  EXPECT_EQ(psi1().a1, 3.0 / 8.0);
  EXPECT_DOUBLE_EQ(psi1().a2_sq, 3.0 * std::sqrt(2.0));
  EXPECT_EQ(psi2().a0, 4.97);
  EXPECT_EQ(psi2().a1, 0.083);
  EXPECT_DOUBLE_EQ(psi2().a2_sq, 3.0 + 2.0 * std::sqrt(2.0));
  EXPECT_FALSE(half_log().bounded());
}

TEST(Psi, EvalExamples) {
  EXPECT_EQ(psi_eval(psi1(), 1.0), 0.0);
  EXPECT_EQ(psi_eval(psi1(), 0.0), -1.0);
  EXPECT_EQ(psi_eval(psi1(), kInf), 1.0);
  EXPECT_DOUBLE_EQ(psi_eval(psi1(), 4.0), 0.6);
  EXPECT_EQ(psi_eval(psi2(), kInf), 1.0);
  EXPECT_EQ(psi_eval(psi2(), 0.0), -1.0);
  EXPECT_EQ(psi_eval(half_log(), 0.0), -kInf);
  EXPECT_THROW(psi_eval(psi1(), -1.0), std::domain_error);
  EXPECT_THROW(psi_eval(psi1(), NAN), std::domain_error);
}

TEST(Psi, RatioConventions) {
  EXPECT_EQ(psi_ratio(psi1(), 0.0, 0.0), 0.0);
  EXPECT_EQ(psi_ratio(psi1(), 2.0, 0.0), 1.0);
  EXPECT_EQ(psi_ratio(psi1(), 0.0, 3.0), -1.0);
  EXPECT_DOUBLE_EQ(psi_ratio(psi1(), 1.0, 4.0), -1.0 / 3.0);
  EXPECT_EQ(psi_ratio(psi2(), kInf, kInf), 0.0);
  EXPECT_EQ(psi_ratio(psi2(), kInf, 2.0), 1.0);
  EXPECT_THROW(psi_ratio(psi1(), -1.0, 1.0), std::domain_error);
}

TEST(Psi, RatioMatchesEvalAndScaleInvariance) {
  Stream s(7, 0);
  for (PsiKind k : {psi1(), psi2()}) {
    for (int i = 0; i < 10000; ++i) {
      double a = std::exp(20.0 * (s.u01() - 0.5)), b = std::exp(20.0 * (s.u01() - 0.5));
      double c = std::exp(40.0 * (s.u01() - 0.5));
      double r = psi_ratio(k, a, b);
      EXPECT_NEAR(r, psi_eval(k, std::sqrt(a / b)), 1e-15);
      EXPECT_NEAR(psi_ratio(k, a * c, b * c), r, 1e-15);
    }
  }
}

TEST(Psi, AxiomsOnWideLogGrid) {
  auto grid = log_grid(1e-8, 1e8, 10000);
  for (PsiKind k : {psi1(), psi2()}) {
    AxiomReport r = check_psi_axioms(k, grid);
    EXPECT_LE(r.max_antisymmetry_defect, 1e-12);
    EXPECT_EQ(r.monotonicity_violations, 0u);
    EXPECT_EQ(r.boundedness_violations, 0u);
    EXPECT_TRUE(r.passed());
  }
}

TEST(Psi, LogRatioWindows) {
  AxiomReport r = check_psi_axioms(psi1(), log_grid(0.25, 4.0, 20001));
  ASSERT_TRUE(r.has_log_ratio);
  EXPECT_GT(r.ratio_min_half, 0.96);
  EXPECT_LE(r.ratio_max_half, 1.0);
  EXPECT_GT(r.ratio_min_quarter, 0.86);
  EXPECT_LE(r.ratio_max_quarter, 1.0);
}

TEST(Psi, HalfLogFlaggedUnbounded) {
  std::vector<double> g{1e-8, 1.0, 10.0};
  AxiomReport r = check_psi_axioms(half_log(), g);
  EXPECT_GT(r.boundedness_violations, 0u);
  EXPECT_FALSE(r.passed());
}

TEST(Psi, AxiomGridValidation) {
  std::vector<double> bad{1.0, 0.5};
  EXPECT_THROW(check_psi_axioms(psi1(), bad), std::invalid_argument);
  std::vector<double> empty;
  EXPECT_THROW(check_psi_axioms(psi1(), empty), std::invalid_argument);
}

TEST(Psi, NameRoundTrip) {
  for (PsiKind k : {psi1(), psi2(), half_log()}) EXPECT_EQ(psi_from_name(name(k)).variant, k.variant);
  EXPECT_THROW(psi_from_name("psi3"), std::invalid_argument);
}

TEST(MomentInequalities, Examples) {
  auto r = DiscreteDensity::on_cells({0.5, 0.5, 0.0, 0.0});
  auto far = DiscreteDensity::on_cells({0.0, 0.0, 0.5, 0.5});
  InequalityReport same = check_moment_inequalities(psi1(), r, r, r);
  EXPECT_EQ(same.lhs_mean, 0.0);
  EXPECT_EQ(same.rhs_mean, 0.0);
  EXPECT_EQ(same.slack_mean(), 0.0);
  InequalityReport dis = check_moment_inequalities(psi1(), r, r, far);
  EXPECT_EQ(dis.lhs_mean, -1.0);
  EXPECT_DOUBLE_EQ(dis.rhs_mean, -3.0 / 8.0);
  EXPECT_GE(dis.slack_mean(), 0.0);
  EXPECT_THROW(check_moment_inequalities(half_log(), r, r, r), std::invalid_argument);
  auto other = DiscreteDensity::on_cells({1.0, 0.0});
  EXPECT_THROW(check_moment_inequalities(psi1(), r, r, other), std::invalid_argument);
}

namespace {
DiscreteDensity random_density(Stream& s, std::size_t k) {
  std::vector<double> m(k);
  double tot = 0.0;
  for (auto& v : m) {
    // sparse: about a third of the cells empty
    v = s.u01() < 0.35 ? 0.0 : -std::log(s.u01());
    tot += v;
  }
  if (tot == 0.0) {
    m[0] = 1.0;
    tot = 1.0;
  }
  for (auto& v : m) v /= tot;
  return DiscreteDensity::on_cells(m);
}
}  // namespace

TEST(MomentInequalities, RandomTriplesProperty) {
  Stream s(20240601, 1);
  for (PsiKind k : {psi1(), psi2()}) {
    double worst_mean = kInf, worst_var = kInf;
    for (int t = 0; t < 10000; ++t) {
      std::size_t size = 1 + static_cast<std::size_t>(s.u01() * 16.0);
      auto r = random_density(s, size), q = random_density(s, size), q2 = random_density(s, size);
      auto rep = check_moment_inequalities(k, r, q, q2);
      worst_mean = std::min(worst_mean, rep.slack_mean());
      worst_var = std::min(worst_var, rep.slack_variance());
    }
    EXPECT_GE(worst_mean, -1e-10);
    EXPECT_GE(worst_var, -1e-10);
  }
}
