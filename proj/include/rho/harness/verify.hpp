#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "rho/baselines.hpp"
#include "rho/discrete.hpp"
#include "rho/hellinger.hpp"
#include "rho/oracle.hpp"
#include "rho/psi.hpp"
#include "rho/psi_inequalities.hpp"
#include "rho/quadrature.hpp"
#include "rho/rho_engine.hpp"
#include "rho/sampling.hpp"
#include "rho/harness/instances.hpp"
#include "rho/harness/runner.hpp"

// Property suites behind `rho verify` and the acceptance binary.
namespace rho::harness {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

template <class F>
CheckResult timed(std::string name, F&& body) {
  auto t0 = std::chrono::steady_clock::now();
  CheckResult r;
  r.name = std::move(name);
  try {
    std::ostringstream os;
    os.precision(6);
    r.passed = body(os);
    r.detail = os.str();
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail = std::string("exception: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

inline CheckResult check_psi_axiom_suite() {
  return timed("psi_axioms", [](std::ostream& os) {
    auto grid = log_grid(1e-8, 1e8, 10000);
    bool ok = true;
    for (PsiKind k : {psi1(), psi2()}) {
      AxiomReport a = check_psi_axioms(k, grid);
      os << name(k) << ": antisym " << a.max_antisymmetry_defect << ", mono viol " << a.monotonicity_violations
         << ", range viol " << a.boundedness_violations;
      if (a.has_log_ratio)
        os << ", ratio [1/2,2] " << a.ratio_min_half << ".." << a.ratio_max_half << ", [1/4,4] " << a.ratio_min_quarter
           << ".." << a.ratio_max_quarter;
      os << "; ";
      ok = ok && a.passed();
    }
    return ok;
  });
}

inline DiscreteDensity random_sparse_density(Stream& s, std::size_t k) {
  std::vector<double> m(k);
  double tot = 0.0;
  for (auto& v : m) {
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

inline CheckResult check_moment_inequality_suite(std::size_t triples = 10000) {
  return timed("moment_inequalities", [triples](std::ostream& os) {
    bool ok = true;
    for (PsiKind k : {psi1(), psi2()}) {
      Stream s(20240601, name(k) == "psi1" ? 11 : 12);
      double wm = kInf, wv = kInf;
      for (std::size_t t = 0; t < triples; ++t) {
        std::size_t size = 1 + harness::uniform_index(s, 16);
        auto r = random_sparse_density(s, size), q = random_sparse_density(s, size), q2 = random_sparse_density(s, size);
        auto rep = check_moment_inequalities(k, r, q, q2);
        wm = std::min(wm, rep.slack_mean());
        wv = std::min(wv, rep.slack_variance());
      }
      os << name(k) << ": min slack mean " << wm << ", variance " << wv << "; ";
      ok = ok && wm >= -1e-10 && wv >= -1e-10;
    }
    return ok;
  });
}

inline CheckResult check_oracle_equivalence(std::size_t instances = 200) {
  return timed("oracle_equivalence", [instances](std::ostream& os) {
    Stream s(2024, 0);
    std::size_t agree = 0, total = 0;
    for (std::size_t t = 0; t < instances; ++t) {
      auto inst = random_instance(s, 12, 50);
      for (PsiKind k : {psi1(), psi2()}) {
        auto fast = rho_estimate(inst.data, inst.family, k, {EnginePath::generic});
        auto slow = oracle::brute_force_oracle(inst.data, inst.family, k);
        ++total;
        agree += fast.chosen_index == slow.chosen_index;
      }
    }
    os << agree << "/" << total << " chosen indices equal";
    return agree == total;
  });
}

inline CheckResult check_uniform_location_identity(std::size_t datasets = 100) {
  return timed("uniform_location_identity", [datasets](std::ostream& os) {
    Stream s(31, 1);
    std::size_t agree = 0, total = 0;
    for (std::size_t t = 0; t < datasets; ++t) {
      std::size_t m = 2 + uniform_index(s, 80);
      double step = 0.02 + 0.5 * s.u01();
      auto f = build_location_family(uniform(0, 1), regular_grid(-2.0 + s.u01(), step, m));
      Dataset d = sample(SamplerSpec{mixture({0.7, 0.3}, {uniform(0, 1), gaussian(2, 2)}), 3, s.next_u64()},
                         1 + uniform_index(s, 80));
      std::size_t want = oracle::argmax_interval_count(d, f);
      for (PsiKind k : {psi1(), psi2()}) {
        total += 2;
        agree += rho_estimate(d, f, k).chosen_index == want;
        agree += rho_estimate(d, f, k, {EnginePath::generic}).chosen_index == want;
      }
    }
    os << agree << "/" << total << " estimates equal the argmax-count index";
    return agree == total;
  });
}

inline CheckResult check_grenander_brute_force(std::size_t instances = 500) {
  return timed("grenander_brute_force", [instances](std::ostream& os) {
    Stream s(99, 1);
    std::size_t agree = 0;
    for (std::size_t t = 0; t < instances; ++t) {
      std::size_t k = 1 + uniform_index(s, 4);
      std::vector<double> grid{0.0};
      for (std::size_t j = 0; j < k; ++j) grid.push_back(grid.back() + 0.25 + s.u01());
      std::vector<double> x(1 + uniform_index(s, 40));
      for (auto& v : x) v = grid.back() * s.u01() * s.u01();
      std::vector<double> counts(k, 0.0), widths(k);
      for (std::size_t j = 0; j < k; ++j) widths[j] = grid[j + 1] - grid[j];
      for (double v : x) counts[rho::detail::cell_of(grid, v)] += 1.0;
      agree += grenander_estimate(x, grid).as<PiecewiseConstant>().levels ==
               oracle::brute_force_decreasing_mle(counts, widths);
    }
    os << agree << "/" << instances << " exact matches";
    return agree == instances;
  });
}

inline CheckResult check_exponential_truncation() {
  return timed("exponential_truncation", [](std::ostream& os) {
    double worst = 0.0;
    for (double th : {0.5, 1.0, 2.0})
      for (double T : {1.0, 3.0, 10.0}) {
        double closed = 1.0 - std::sqrt(-std::expm1(-th * T));
        double an = *hellinger2_analytic(exponential(th), truncated_exponential(th, T));
        double q = hellinger2_quadrature(exponential(th), truncated_exponential(th, T), {1000000, {0.0, T}, true});
        worst = std::max({worst, std::abs(closed - q), std::abs(an - closed)});
      }
    os << "max |closed form - quadrature| = " << worst;
    return worst <= 1e-8;
  });
}

// 1/2 + int_0^x p by symmetry, singularity-aware midpoint cells.
inline double numeric_heavy_tail_cdf(double x) {
  if (x == 0.0) return 0.5;
  double m = quad::integrate_density(heavy_tail(0), {0.0, std::abs(x)}, 20000);
  return x > 0.0 ? 0.5 + m : 0.5 - m;
}

inline CheckResult check_heavy_tail_sampler() {
  return timed("heavy_tail_sampler", [](std::ostream& os) {
    const DensitySpec p = heavy_tail(0);
    Stream s(5, 5);
    double rt = 0.0;
    for (int i = 0; i < 1000; ++i) {
      double u = s.u01();
      rt = std::max(rt, std::abs(numeric_heavy_tail_cdf(heavy_tail_quantile(u)) - u));
    }
    double mass = quad::total_mass(p, 1000000);
    auto x = sample(SamplerSpec{p, 2025, 3}, 100000).x;
    std::sort(x.begin(), x.end());
    double ks = 0.0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      double f = cdf(p, x[i]);
      ks = std::max({ks, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
    }
    os << "round trip " << rt << ", mass - 1 = " << mass - 1.0 << ", KS " << ks;
    return rt <= 1e-8 && std::abs(mass - 1.0) <= 1e-9 && ks < 0.01;
  });
}

inline CheckResult check_hellinger_properties(std::size_t triples = 2000) {
  return timed("hellinger_properties", [triples](std::ostream& os) {
    Stream s(17, 0);
    double worst = 0.0;
    for (std::size_t t = 0; t < triples; ++t) {
      std::size_t k = 1 + uniform_index(s, 16);
      auto a = random_sparse_density(s, k), b = random_sparse_density(s, k), c = random_sparse_density(s, k);
      double ab = hellinger2_discrete(a, b), ba = hellinger2_discrete(b, a), bc = hellinger2_discrete(b, c),
             ac = hellinger2_discrete(a, c), tv = total_variation_discrete(a, b);
      worst = std::max({worst, std::abs(ab - ba), std::sqrt(ac) - std::sqrt(ab) - std::sqrt(bc), ab - tv,
                        std::abs(ab - (1.0 - affinity_discrete(a, b))), -ab, ab - 1.0});
    }
    os << "max defect " << worst;
    return worst <= 1e-12;
  });
}

inline CheckResult check_sampler_thread_determinism() {
  return timed("sampler_thread_determinism", [](std::ostream& os) {
    auto run = [](std::size_t threads) {
      return run_reps(64, threads, [](std::size_t rep) {
        auto x = sample(SamplerSpec{heavy_tail(0.5), 7, rep}, 257).x;
        Record r;
        r.rep = rep;
        r.estimate = x.front();
        r.sq_loss = x.back();
        r.h2_loss = x[128];
        return std::vector<Record>{r};
      });
    };
    auto a = run(1), b = run(8);
    bool same = a.size() == b.size();
    for (std::size_t i = 0; same && i < a.size(); ++i) same = csv_row(a[i]) == csv_row(b[i]);
    os << (same ? "identical" : "different") << " across 1 and 8 workers";
    return same;
  });
}

inline std::vector<std::function<CheckResult()>> verify_suites() {
  return {check_psi_axiom_suite,
          [] { return check_moment_inequality_suite(); },
          [] { return check_oracle_equivalence(); },
          [] { return check_uniform_location_identity(); },
          [] { return check_grenander_brute_force(); },
          check_exponential_truncation,
          check_heavy_tail_sampler,
          [] { return check_hellinger_properties(); },
          check_sampler_thread_determinism};
}

}  // namespace rho::harness
