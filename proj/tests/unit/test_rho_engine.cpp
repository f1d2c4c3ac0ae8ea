#include <gtest/gtest.h>

#include <cmath>

#include "rho/harness/instances.hpp"
#include "rho/oracle.hpp"
#include "rho/rho_engine.hpp"

using namespace rho;

namespace {
CandidateFamily unit_location(const std::vector<double>& thetas) { return build_location_family(uniform(0, 1), thetas); }
}  // namespace

TEST(TStatistic, Examples) {
  auto f = unit_location({0.0, 1.0});
  Dataset d({0.3, 0.6, 1.4});
  EXPECT_EQ(t_statistic(d, f[0], f[1], psi1()), -1.0);
  EXPECT_EQ(t_statistic(d, f[0], f[0], psi1()), 0.0);
}

TEST(TStatistic, Antisymmetry) {
  Stream s(11, 0);
  for (int t = 0; t < 200; ++t) {
    auto inst = harness::random_instance(s);
    for (PsiKind k : {psi1(), psi2()}) {
      const auto& f = inst.family;
      std::size_t i = harness::uniform_index(s, f.size()), j = harness::uniform_index(s, f.size());
      double a = t_statistic(inst.data, f[i], f[j], k), b = t_statistic(inst.data, f[j], f[i], k);
      EXPECT_NEAR(a, -b, 1e-10 * static_cast<double>(inst.data.size()));
      EXPECT_LE(std::abs(a), static_cast<double>(inst.data.size()));
    }
  }
}

TEST(RhoCriterion, SingletonAndNonnegative) {
  CandidateFamily one;
  one.members = {gaussian(0, 1)};
  Dataset d({0.1, -0.3});
  auto c = rho_criterion(d, 0, one, psi1());
  EXPECT_EQ(c.value, 0.0);
  EXPECT_EQ(c.adversary, 0u);
  Stream s(12, 0);
  for (int t = 0; t < 100; ++t) {
    auto inst = harness::random_instance(s);
    for (std::size_t q = 0; q < inst.family.size(); ++q) EXPECT_GE(rho_criterion(inst.data, q, inst.family, psi2()).value, 0.0);
  }
}

TEST(RhoCriterion, UniformLocationCountIdentity) {
  // criterion(theta) = max_theta' N[theta', theta'+1] - N[theta, theta+1]
  auto f = unit_location(regular_grid(-1.0, 0.25, 17));
  Dataset d({0.1, 0.3, 0.35, 1.2, 2.9, 3.0});
  std::vector<long> counts;
  for (std::size_t j = 0; j < f.size(); ++j) {
    const auto& u = f[j].as<UniformInterval>();
    long c = 0;
    for (double x : d.x) c += (x >= u.a && x <= u.b);
    counts.push_back(c);
  }
  long mx = *std::max_element(counts.begin(), counts.end());
  for (std::size_t j = 0; j < f.size(); ++j) {
    EXPECT_EQ(rho_criterion(d, j, f, psi1()).value, static_cast<double>(mx - counts[j]));
    EXPECT_EQ(rho_criterion(d, j, f, psi2(), {EnginePath::generic}).value, static_cast<double>(mx - counts[j]));
  }
}

TEST(RhoEstimate, UniformLocationExample) {
  auto f = unit_location(regular_grid(0.0, 0.1, 50));
  Dataset d({0.2, 0.5, 0.7, 5.0});
  for (PsiKind k : {psi1(), psi2()}) {
    auto r = rho_estimate(d, f, k);
    EXPECT_EQ(r.chosen_index, 0u);
    EXPECT_EQ(r.criterion_value, 0.0);
    EXPECT_EQ(rho_estimate(d, f, k, {EnginePath::generic}).chosen_index, 0u);
    EXPECT_EQ(uniform_location_count_estimate(d, f).chosen_index, 0u);
  }
}

TEST(RhoEstimate, Singleton) {
  CandidateFamily one;
  one.members = {heavy_tail(0)};
  auto r = rho_estimate(Dataset({0.5, 3.0}), one, psi1());
  EXPECT_EQ(r.chosen_index, 0u);
  EXPECT_EQ(r.criterion_value, 0.0);
}

TEST(RhoEstimate, GenericPathMatchesOracleExactly) {
  Stream s(2024, 0);
  for (int t = 0; t < 200; ++t) {
    auto inst = harness::random_instance(s);
    for (PsiKind k : {psi1(), psi2()}) {
      auto fast = rho_estimate(inst.data, inst.family, k, {EnginePath::generic});
      auto slow = oracle::brute_force_oracle(inst.data, inst.family, k);
      ASSERT_EQ(fast.chosen_index, slow.chosen_index) << "instance " << t << " kind " << inst.kind;
      EXPECT_EQ(fast.criterion_value, slow.criterion_value);
      // the recorded adversary attains the sup
      EXPECT_EQ(t_statistic(inst.data, inst.family[fast.chosen_index], inst.family[fast.adversary_index], k),
                fast.criterion_value);
    }
  }
}

TEST(RhoEstimate, FastPathsMatchOracleValues) {
  Stream s(77, 0);
  int checked = 0;
  while (checked < 150) {
    auto inst = harness::random_instance(s);
    if (inst.kind != 2 && inst.kind != 4) continue;
    ++checked;
    for (PsiKind k : {psi1(), psi2()}) {
      auto fast = rho_estimate(inst.data, inst.family, k);
      auto slow = oracle::brute_force_oracle(inst.data, inst.family, k);
      EXPECT_NEAR(fast.criterion_value, slow.criterion_value, 1e-9);
      // the chosen member is optimal for the oracle as well
      EXPECT_NEAR(oracle::naive_t(inst.data, inst.family[fast.chosen_index], inst.family[fast.adversary_index], k),
                  fast.criterion_value, 1e-9);
      double crit_fast = -kInf;
      for (std::size_t j = 0; j < inst.family.size(); ++j)
        crit_fast = std::max(crit_fast, oracle::naive_t(inst.data, inst.family[fast.chosen_index], inst.family[j], k));
      EXPECT_NEAR(crit_fast, slow.criterion_value, 1e-9);
    }
  }
}

TEST(RhoEstimate, HistogramGreedySupIsExact) {
  Stream s(5, 5);
  auto f = build_histogram_family({0, 0.3, 0.5, 1.0}, 0.1);
  for (int t = 0; t < 20; ++t) {
    Dataset d = sample(SamplerSpec{uniform(-0.1, 1.1), 1, s.next_u64()}, 30);
    for (PsiKind k : {psi1(), psi2()}) {
      HistogramEvaluator ev(d, f, k);
      ASSERT_TRUE(ev.has_sup());
      for (std::size_t q = 0; q < f.size(); q += 7) {
        SupResult g = ev.sup(q);
        double brute = -kInf;
        for (std::size_t j = 0; j < f.size(); ++j) brute = std::max(brute, ev.t(q, j));
        EXPECT_NEAR(g.value, brute, 1e-12);
        EXPECT_EQ(ev.t(q, g.adversary), g.value);
      }
    }
  }
}

TEST(RhoEstimate, UniformLocationIdentityRandom) {
  Stream s(31, 0);
  for (int t = 0; t < 100; ++t) {
    std::size_t m = 2 + harness::uniform_index(s, 60);
    double step = 0.05 + 0.5 * s.u01();
    auto f = unit_location(regular_grid(-2.0 + s.u01(), step, m));
    Dataset d = sample(SamplerSpec{mixture({0.7, 0.3}, {uniform(0, 1), gaussian(2, 2)}), 3, s.next_u64()},
                       1 + harness::uniform_index(s, 60));
    std::size_t want = oracle::argmax_interval_count(d, f);
    EXPECT_EQ(rho_estimate(d, f, psi1()).chosen_index, want);
    EXPECT_EQ(rho_estimate(d, f, psi2(), {EnginePath::generic}).chosen_index, want);
    EXPECT_EQ(uniform_location_count_estimate(d, f).chosen_index, want);
  }
}

TEST(RhoEstimate, HalfLogIsMle) {
  // strictly positive densities and a unique likelihood maximizer
  Stream s(41, 0);
  for (int t = 0; t < 50; ++t) {
    auto f = build_location_family(gaussian(0, 1), regular_grid(-1.0, 0.1, 21));
    Dataset d = sample(SamplerSpec{gaussian(0.3, 1), 9, s.next_u64()}, 25);
    std::size_t best = 0;
    double best_ll = -kInf;
    for (std::size_t j = 0; j < f.size(); ++j) {
      double ll = 0.0;
      for (double x : d.x) ll += std::log(density_at(f[j], x));
      if (ll > best_ll) {
        best_ll = ll;
        best = j;
      }
    }
    EXPECT_EQ(rho_estimate(d, f, half_log()).chosen_index, best);
  }
}

TEST(RhoEstimate, HalfLogMixedInfinityThrows) {
  CandidateFamily f;
  f.members = {uniform(0, 1), uniform(0.5, 1.5)};
  Dataset d({0.2, 1.2});
  EXPECT_THROW(rho_estimate(d, f, half_log(), {EnginePath::generic}), std::domain_error);
  EXPECT_THROW(rho_estimate(d, f, half_log()), std::domain_error);
}

TEST(RhoEstimate, ScaleInvariance) {
  Stream s(8, 8);
  for (int t = 0; t < 50; ++t) {
    auto inst = harness::random_instance(s);
    const std::size_t n = inst.data.size(), m = inst.family.size();
    std::vector<double> v(n * m), w(n * m);
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t i = 0; i < n; ++i) v[j * n + i] = observation_density(inst.family[j], inst.data, i);
    for (std::size_t k = 0; k < v.size(); ++k) w[k] = v[k] * 0.125;  // power of two: exact rescaling
    for (PsiKind k : {psi1(), psi2()}) {
      auto a = solve_minimax(MatrixEvaluator(n, m, v, k));
      auto b = solve_minimax(MatrixEvaluator(n, m, w, k));
      EXPECT_EQ(a.chosen, b.chosen);
    }
  }
}

TEST(RhoEstimate, EpsilonSlackAndMatrix) {
  auto f = unit_location(regular_grid(0.0, 0.25, 9));
  Dataset d({0.1, 0.2, 0.9, 1.1, 1.15});
  auto exact = rho_estimate(d, f, psi1(), {EnginePath::generic, 0.0, true});
  ASSERT_TRUE(exact.per_pair_matrix.has_value());
  EXPECT_EQ(exact.per_pair_matrix->size(), 9u);
  auto loose = rho_estimate(d, f, psi1(), {EnginePath::generic, 1.5});
  EXPECT_LE(loose.chosen_index, exact.chosen_index);
  EXPECT_LE(loose.criterion_value, exact.criterion_value + 1.5);
  EXPECT_EQ(loose.chosen_index, 0u);
}

TEST(RhoEstimatePenalized, EqualPenaltiesMatchUnion) {
  Stream s(3, 1);
  for (int t = 0; t < 40; ++t) {
    auto a = harness::random_instance(s, 6, 30);
    PenalizedCollection c;
    c.families = {build_location_family(gaussian(0, 1), {-1.0, 0.0, 1.0}),
                  build_location_family(gaussian(0, 2), {-0.5, 0.5})};
    for (auto& f : c.families) f.dimension_bound = DimensionBound{DimensionBound::Form::constant, 1.0};
    c.delta = {std::log(2.0), std::log(2.0)};
    c = assign_penalties(c, 1.0, static_cast<double>(a.data.size()));
    auto pr = rho_estimate_penalized(a.data, c, psi1());
    auto plain = rho_estimate(a.data, flatten(c), psi1(), {EnginePath::generic});
    auto brute = oracle::brute_force_penalized(a.data, c, psi1());
    EXPECT_EQ(pr.chosen_index, plain.chosen_index);
    EXPECT_EQ(pr.chosen_index, brute.chosen_index);
    EXPECT_EQ(pr.family_index, brute.family_index);
    EXPECT_EQ(pr.member_index, brute.member_index);
  }
}

TEST(RhoEstimatePenalized, SingleModelZeroPenalty) {
  auto f = build_location_family(gaussian(0, 1), regular_grid(-1.0, 0.5, 5));
  f.dimension_bound = DimensionBound{DimensionBound::Form::constant, 0.0};
  auto c = assign_penalties(single_model(f), 1.0, 10.0);
  EXPECT_EQ(c.pen[0], 0.0);
  Dataset d({0.3, 0.1, -0.2, 0.8});
  EXPECT_EQ(rho_estimate_penalized(d, c, psi2()).chosen_index, rho_estimate(d, f, psi2()).chosen_index);
  PenalizedCollection bare;
  bare.families = {f};
  EXPECT_THROW(rho_estimate_penalized(d, bare, psi2()), std::invalid_argument);
}

TEST(RhoEstimatePenalized, HeavyPenaltySwitchesModel) {
  // Small model {U[0,1]}, larger model {U[0,0.5], U[0.5,1]}. All data in
  // [0, 0.5]: T(U[0,1], U[0,0.5]) = n psi(sqrt 2). The larger model wins
  // unless its penalty exceeds that gain.
  CandidateFamily small, large;
  small.members = {uniform(0, 1)};
  large.members = {uniform(0, 0.5), uniform(0.5, 1)};
  Dataset d({0.1, 0.2, 0.3, 0.4});
  double gain = 4.0 * psi_eval(psi1(), std::sqrt(2.0));
  for (double gap : {gain - 0.1, gain + 0.1}) {
    PenalizedCollection c;
    c.families = {small, large};
    c.pen = {0.0, gap};
    c.delta = {0.0, 0.0};
    auto r = rho_estimate_penalized(d, c, psi1());
    auto b = oracle::brute_force_penalized(d, c, psi1());
    EXPECT_EQ(r.chosen_index, b.chosen_index);
    EXPECT_EQ(r.family_index, gap < gain ? 1u : 0u);
  }
}
