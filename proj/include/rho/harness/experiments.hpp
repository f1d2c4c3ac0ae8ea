#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "rho/baselines.hpp"
#include "rho/catalog.hpp"
#include "rho/hellinger.hpp"
#include "rho/model_space.hpp"
#include "rho/oracle.hpp"
#include "rho/rho_engine.hpp"
#include "rho/sampling.hpp"
#include "rho/harness/config.hpp"
#include "rho/harness/report.hpp"
#include "rho/harness/risk.hpp"
#include "rho/harness/runner.hpp"

namespace rho::harness {

struct ExperimentOutput {
  std::vector<Record> records;
  json checks = json::object();
};

struct ExperimentInfo {
  std::string name;
  std::string description;
  std::vector<std::string> estimators;  // supported
  json defaults;
  std::function<ExperimentOutput(const ExperimentConfig&)> run;
};

namespace detail {

inline std::string rho_name(const PsiKind& k) { return "rho_" + std::string(name(k)); }

inline json base_config(const std::string& experiment, std::size_t n, std::size_t reps,
                        std::vector<std::string> estimators, json params) {
  return json{{"experiment", experiment},
              {"n", n},
              {"reps", reps},
              {"seed", 20240601},
              {"psi", {"psi1", "psi2"}},
              {"estimators", std::move(estimators)},
              {"out_dir", "results"},
              {"threads", 1},
              {"params", std::move(params)}};
}

inline Record record(const ExperimentConfig& c, std::size_t rep, std::uint64_t seed, std::string estimator,
                     std::string group = {}) {
  Record r;
  r.experiment = c.experiment;
  r.rep = rep;
  r.seed = seed;
  r.estimator = std::move(estimator);
  r.group = std::move(group);
  return r;
}

inline void require_bounded(const ExperimentConfig& c) {
  for (const auto& k : c.psi)
    if (!k.bounded()) throw ConfigError(c.experiment + ": psi '" + std::string(name(k)) + "' is not supported here");
}

// Frequency over records of `estimator` in `group` whose flag `key` is "1".
inline Frequency flag_frequency(const std::vector<Record>& recs, const std::string& estimator, const std::string& group,
                                const std::string& key) {
  Frequency f;
  for (const auto& r : recs)
    if (r.estimator == estimator && r.group == group) {
      ++f.total;
      if (r.find(key) == "1") ++f.hits;
    }
  return f;
}

inline std::vector<double> column(const std::vector<Record>& recs, const std::string& estimator, const std::string& group,
                                  std::optional<double> Record::*field) {
  std::vector<double> v;
  for (const auto& r : recs)
    if (r.estimator == estimator && r.group == group && (r.*field)) v.push_back(*(r.*field));
  return v;
}

inline std::string group_label(const std::string& key, double v) { return key + "=" + format_double(v); }

// Lattice units nearest (largest remainder) to the empirical cell frequencies.
inline std::vector<int> nearest_units(const std::vector<double>& counts, int K) {
  const double n = std::accumulate(counts.begin(), counts.end(), 0.0);
  std::vector<int> u(counts.size());
  std::vector<std::pair<double, std::size_t>> rem;
  int used = 0;
  for (std::size_t j = 0; j < counts.size(); ++j) {
    double exact = static_cast<double>(K) * counts[j] / n;
    u[j] = static_cast<int>(std::floor(exact));
    used += u[j];
    rem.emplace_back(exact - u[j], j);
  }
  std::stable_sort(rem.begin(), rem.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t k = 0; used < K; ++k, ++used) ++u[rem[k].second];
  return u;
}

inline std::vector<double> cell_counts(const std::vector<double>& breakpoints, const std::vector<double>& x) {
  std::vector<double> counts(breakpoints.size() - 1, 0.0);
  for (double v : x)
    if (v >= breakpoints.front() && v <= breakpoints.back()) counts[rho::detail::cell_of(breakpoints, v)] += 1.0;
  return counts;
}

// ---------------------------------------------------------------- 1
inline ExperimentOutput run_outlier_uniform_scale(const ExperimentConfig& c) {
  const auto denom = c.param<double>("theta_denominator");
  const auto count = c.param<std::size_t>("theta_count");
  const auto truth = c.param<double>("truth_theta");
  const auto outlier = c.param<double>("outlier_value");
  const auto idx = c.param<std::size_t>("outlier_index");
  const auto window = c.param<std::vector<double>>("rho_window");
  const auto large_n = c.param<std::size_t>("mle_large_n");
  if (idx >= c.n) throw ConfigError("outlier_index must be < n");
  if (window.size() != 2) throw ConfigError("rho_window needs two values");
  std::vector<double> thetas(count);
  for (std::size_t k = 0; k < count; ++k) thetas[k] = static_cast<double>(k + 1) / denom;
  const CandidateFamily fam = build_uniform_scale_family(thetas);
  const DensitySpec truth_d = uniform(0.0, truth);
  const std::uint64_t seed = sweep_seed(c.seed, 0);
  const TrueLaw law = outlier_injected(UniformScale{truth}, {idx}, {outlier});

  auto one = [&](const Dataset& d, std::size_t rep, const std::string& est, std::size_t chosen, bool neg_inf) {
    Record r = record(c, rep, seed, est);
    if (!neg_inf) {
      double th = fam[chosen].as<UniformInterval>().b;
      r.estimate = th;
      r.sq_loss = (th - truth) * (th - truth);
      r.h2_loss = *hellinger2_analytic(truth_d, fam[chosen]);
      r.flag("abs_err", std::abs(th - truth));
      r.flag("in_window", th >= window[0] && th <= window[1]);
    }
    r.flag("n", d.size());
    return r;
  };

  auto recs = run_reps(c.reps, c.threads, [&](std::size_t rep) {
    std::vector<Record> out;
    Dataset d = sample(SamplerSpec{law, seed, rep}, c.n);
    if (c.uses("mle")) {
      auto m = mle_estimate(d, fam);
      out.push_back(one(d, rep, "mle", m.chosen_index, m.all_neg_inf).flag("all_neg_inf", m.all_neg_inf));
    }
    if (c.uses("rho"))
      for (const auto& k : c.psi) {
        auto e = rho_estimate(d, fam, k);
        out.push_back(one(d, rep, rho_name(k), e.chosen_index, false).flag("criterion", e.criterion_value));
      }
    if (c.uses("mle") && rep == 0 && large_n > 0) {
      // the MLE alone at the larger sample size
      Dataset big = sample(SamplerSpec{law, sweep_seed(c.seed, 1), rep}, std::max(large_n, idx + 1));
      auto m = mle_estimate(big, fam);
      out.push_back(one(big, rep, "mle_large_n", m.chosen_index, m.all_neg_inf).flag("all_neg_inf", m.all_neg_inf));
    }
    return out;
  });

  ExperimentOutput o{std::move(recs)};
  json ch = json::object();
  if (c.uses("mle")) {
    std::size_t exact = 0, total = 0;
    for (const auto& r : o.records)
      if (r.estimator == "mle") {
        ++total;
        exact += (r.estimate && *r.estimate == outlier);
      }
    ch["mle_equals_outlier"] = {{"hits", exact}, {"total", total}};
  }
  for (const auto& k : c.psi) {
    auto f = flag_frequency(o.records, rho_name(k), "", "in_window");
    ch[rho_name(k) + "_in_window"] = {{"hits", f.hits}, {"total", f.total}, {"frequency", f.p()}};
  }
  o.checks = ch;
  return o;
}

// ---------------------------------------------------------------- 2
inline ExperimentOutput run_unbounded_likelihood_translation(const ExperimentConfig& c) {
  const auto shift = c.param<double>("truth_shift");
  const auto lo = c.param<double>("grid_lo");
  const auto step = c.param<double>("grid_step");
  const auto count = c.param<std::size_t>("grid_count");
  const CandidateFamily fam = build_location_family(heavy_tail(0.0), regular_grid(lo, step, count), "heavy_tail_location");
  const DensitySpec truth = heavy_tail(shift);
  const std::uint64_t seed = sweep_seed(c.seed, 0);
  const double n = static_cast<double>(c.n);

  auto recs = run_reps(c.reps, c.threads, [&](std::size_t rep) {
    std::vector<Record> out;
    Dataset d = sample(SamplerSpec{truth, seed, rep}, c.n);
    auto emit = [&](const std::string& est, double th) {
      Record r = record(c, rep, seed, est);
      r.estimate = th;
      r.sq_loss = (th - shift) * (th - shift);
      r.flag("n_abs_err", n * std::abs(th - shift));
      out.push_back(std::move(r));
    };
    if (c.uses("rho"))
      for (const auto& k : c.psi) emit(rho_name(k), fam[rho_estimate(d, fam, k).chosen_index].as<HeavyTailP>().shift);
    if (c.uses("median")) emit("median", sample_median(d.x));
    return out;
  });
  ExperimentOutput o{std::move(recs)};
  json ch = json::object();
  std::vector<std::string> ests;
  for (const auto& k : c.psi) ests.push_back(rho_name(k));
  ests.push_back("median");
  for (const auto& e : ests) {
    std::vector<double> v;
    for (const auto& r : o.records)
      if (r.estimator == e) v.push_back(std::stod(*r.find("n_abs_err")));
    if (!v.empty()) ch[e + "_n_abs_err"] = risk_json(estimate_risk(v));
  }
  o.checks = ch;
  return o;
}

// ---------------------------------------------------------------- 3
inline ExperimentOutput run_gaussian_submodel(const ExperimentConfig& c) {
  const auto k = c.param<std::size_t>("k");
  const auto step = c.param<double>("grid_step");
  const auto half = c.param<std::size_t>("half_width");
  const auto cases = c.param<std::vector<std::string>>("cases");
  if (c.n != k + 1) throw ConfigError("gaussian_submodel: n must equal k + 1");

  std::vector<Record> all;
  json ch = json::object();
  for (std::size_t s = 0; s < cases.size(); ++s) {
    std::vector<double> theta(k + 1, 0.0);
    if (cases[s] == "k_quarter") {
      theta[0] = std::pow(static_cast<double>(k), 0.25);
    } else if (cases[s] == "theta_prime_2") {
      theta[1] = 2.0;
    } else {
      throw ConfigError("gaussian_submodel: unknown case '" + cases[s] + "'");
    }
    double tail = 0.0;
    for (std::size_t i = 1; i <= k; ++i) tail += theta[i] * theta[i];
    const std::uint64_t seed = sweep_seed(c.seed, s);
    const std::string group = "case=" + cases[s];

    auto recs = run_reps(c.reps, c.threads, [&](std::size_t rep) {
      std::vector<Record> out;
      Dataset d = sample(SamplerSpec{GaussianMean{theta}, seed, rep}, c.n);
      const double x0 = d.x[0];
      if (c.uses("submodel_mle")) {
        Record r = record(c, rep, seed, "submodel_mle", group);
        r.estimate = x0;
        r.sq_loss = (x0 - theta[0]) * (x0 - theta[0]) + tail;
        out.push_back(std::move(r));
      }
      if (c.uses("rho"))
        for (const auto& kind : c.psi) {
          auto g = gaussian_submodel_estimate(d.x, kind, step, half);
          Record r = record(c, rep, seed, rho_name(kind), group);
          r.estimate = g.theta0_hat;
          r.sq_loss = (g.theta0_hat - theta[0]) * (g.theta0_hat - theta[0]) + tail;
          r.flag("nearest", g.theta0_hat == g.grid_center);
          r.flag("full_scans", g.result.full_scans);
          out.push_back(std::move(r));
        }
      return out;
    });

    json cj{{"target_risk", 1.0 + tail}};
    auto sq = column(recs, "submodel_mle", group, &Record::sq_loss);
    if (!sq.empty()) cj["submodel_mle_risk"] = risk_json(estimate_risk(sq));
    for (const auto& kind : c.psi) {
      auto f = flag_frequency(recs, rho_name(kind), group, "nearest");
      cj[rho_name(kind) + "_nearest"] = {{"hits", f.hits}, {"total", f.total}};
    }
    ch[cases[s]] = cj;
    all.insert(all.end(), recs.begin(), recs.end());
  }
  return {std::move(all), ch};
}

// ---------------------------------------------------------------- 4
inline ExperimentOutput run_pathological_mle(const ExperimentConfig& c) {
  const DensitySpec truth = gaussian(0.0, 1.0);
  // c.n first; trend_n adds larger samples to show the frequency tending to 1
  std::vector<std::size_t> ns{c.n};
  for (auto m : c.param<std::vector<std::size_t>>("trend_n")) ns.push_back(m);
  std::vector<Record> all;
  json ch = json::object();
  for (std::size_t s = 0; s < ns.size(); ++s) {
    const std::size_t n = ns[s];
    const std::uint64_t seed = sweep_seed(c.seed, s);
    const std::string group = s == 0 ? std::string() : "n=" + std::to_string(n);
    auto recs = run_reps(c.reps, c.threads, [&](std::size_t rep) {
      Dataset d = sample(SamplerSpec{truth, seed, rep}, n);
      double xmax = *std::max_element(d.x.begin(), d.x.end());
      double mean = std::accumulate(d.x.begin(), d.x.end(), 0.0) / static_cast<double>(d.size());
      double at_max = pathological_loglik(d.x, xmax), at_mean = pathological_loglik(d.x, mean);
      Record r = record(c, rep, seed, "mle", group);
      r.estimate = xmax;
      r.sq_loss = xmax * xmax;
      r.flag("loglik_at_max", at_max).flag("loglik_at_mean", at_mean).flag("exceeds", at_max > at_mean);
      return std::vector<Record>{std::move(r)};
    });
    auto f = flag_frequency(recs, "mle", group, "exceeds");
    json e{{"n", n}, {"hits", f.hits}, {"total", f.total}, {"frequency", f.p()}, {"se", f.se()}};
    if (s == 0)
      ch["exceeds"] = e;
    else
      ch["trend"].push_back(e);
    all.insert(all.end(), std::make_move_iterator(recs.begin()), std::make_move_iterator(recs.end()));
  }
  return {std::move(all), ch};
}

// ---------------------------------------------------------------- 5
inline ExperimentOutput run_approx_model_mixture(const ExperimentConfig& c) {
  require_bounded(c);
  const auto alphas = c.param<std::vector<double>>("alphas");
  const auto cs = c.param<std::vector<double>>("cs");
  const auto theta0 = c.param<double>("theta0");
  const auto denom = c.param<double>("grid_denominator");
  const auto k_lo = c.param<long>("grid_first_index");
  const auto k_hi = c.param<long>("grid_last_index");
  if (k_hi <= k_lo) throw ConfigError("grid_last_index must exceed grid_first_index");
  for (double a : alphas)
    if (!(a >= 0.0 && a < 0.5)) throw ConfigError("alphas must lie in [0, 1/2)");
  std::vector<double> thetas;
  for (long k = k_lo; k <= k_hi; ++k) thetas.push_back(static_cast<double>(k) / denom);
  const CandidateFamily fam = build_location_family(uniform(0.0, 1.0), thetas, "uniform_location");
  const UniformLocationGrid grid(fam);
  const double n = static_cast<double>(c.n);

  std::vector<Record> all;
  json ch = json::object();
  for (std::size_t s = 0; s < alphas.size(); ++s) {
    const double alpha = alphas[s];
    const std::uint64_t seed = sweep_seed(c.seed, s);
    const std::string group = group_label("alpha", alpha);
    auto recs = run_reps(c.reps, c.threads, [&](std::size_t rep) {
      std::vector<Record> out;
      Dataset d = sample(SamplerSpec{MixtureAlphaTheta{alpha, theta0}, seed, rep}, c.n);
      if (c.uses("rho")) {
        // argmax-count identity: the same member for every bounded psi
        double th = fam[grid.count_estimate(d).chosen_index].as<UniformInterval>().a;
        for (const auto& k : c.psi) {
          Record r = record(c, rep, seed, rho_name(k), group);
          r.estimate = th;
          r.sq_loss = (th - theta0) * (th - theta0);
          r.flag("path", "count");
          for (double cc : cs) r.flag("dev_c" + format_double(cc), std::abs(th - theta0) > cc / n);
          out.push_back(std::move(r));
        }
      }
      if (c.uses("mle")) {
        auto m = grid.mle(d);
        Record r = record(c, rep, seed, "mle", group);
        if (!m.all_neg_inf) {
          double th = fam[m.chosen_index].as<UniformInterval>().a;
          r.estimate = th;
          r.sq_loss = (th - theta0) * (th - theta0);
        }
        r.flag("all_neg_inf", m.all_neg_inf);
        out.push_back(std::move(r));
      }
      return out;
    });

    json cj = json::object();
    if (c.uses("mle")) {
      auto f = flag_frequency(recs, "mle", group, "all_neg_inf");
      double ref = std::pow(1.0 - alpha, n) + std::pow(alpha, n);
      double finite = 1.0 - f.p();
      cj["mle_finite"] = {{"frequency", finite},
                          {"reference", ref},
                          {"se", std::max(f.se(), f.se_at(ref))},
                          {"total", f.total}};
    }
    for (const auto& k : c.psi) {
      json per_c = json::object();
      for (double cc : cs) {
        auto f = flag_frequency(recs, rho_name(k), group, "dev_c" + format_double(cc));
        double bound = std::exp(-n * (1.0 - 2.0 * alpha) * (1.0 - 2.0 * alpha) / 2.0) + 2.0 * std::exp(-(1.0 - alpha) * cc);
        per_c[format_double(cc)] = {{"frequency", f.p()}, {"se", f.se()}, {"bound", bound}, {"total", f.total}};
      }
      cj[rho_name(k) + "_deviation"] = per_c;
    }
    ch[group] = cj;
    all.insert(all.end(), recs.begin(), recs.end());
  }
  return {std::move(all), ch};
}

// ---------------------------------------------------------------- 6, 7
struct HistogramSetup {
  std::vector<double> breakpoints, probs;
  DensitySpec truth;
  CandidateFamily family;
};

inline HistogramSetup histogram_setup(const ExperimentConfig& c) {
  HistogramSetup h{c.param<std::vector<double>>("breakpoints"), c.param<std::vector<double>>("probs"), gaussian(0, 1), {}};
  try {
    h.truth = histogram_density(h.breakpoints, h.probs);
    h.family = build_histogram_family(h.breakpoints, c.param<double>("lattice_step"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(c.experiment + ": " + e.what());
  } catch (const std::length_error& e) {
    throw ConfigError(c.experiment + ": " + e.what());
  }
  return h;
}

// Estimators on the histogram family; loss h^2(reference, estimate), exact.
inline std::vector<Record> histogram_estimates(const ExperimentConfig& c, const HistogramSetup& h, const Dataset& d,
                                               const DensitySpec& reference, std::size_t rep, std::uint64_t seed,
                                               const std::string& group) {
  std::vector<Record> out;
  auto emit = [&](const std::string& est, std::size_t idx, bool neg_inf) {
    Record r = record(c, rep, seed, est, group);
    if (!neg_inf) {
      r.estimate = static_cast<double>(idx);
      r.h2_loss = hellinger2_piecewise(reference, h.family[idx]);
    }
    out.push_back(std::move(r));
  };
  if (c.uses("rho"))
    for (const auto& k : c.psi) emit(rho_name(k), rho_estimate(d, h.family, k).chosen_index, false);
  if (c.uses("mle")) {
    auto m = mle_estimate(d, h.family);
    emit("mle", m.chosen_index, m.all_neg_inf);
    out.back().flag("all_neg_inf", m.all_neg_inf);
  }
  return out;
}

// Risk at each sweep point against the first one: excess <= 2 level + 3 se.
inline json stability_checks(const ExperimentConfig& c, const std::vector<Record>& recs, const std::string& key,
                             const std::vector<double>& levels) {
  json ch = json::object();
  std::vector<std::string> ests;
  for (const auto& k : c.psi) ests.push_back(rho_name(k));
  if (c.uses("mle")) ests.push_back("mle");
  for (const auto& e : ests) {
    json rows = json::array();
    RiskSummary base;
    for (std::size_t s = 0; s < levels.size(); ++s) {
      auto v = column(recs, e, group_label(key, levels[s]), &Record::h2_loss);
      if (v.empty()) continue;
      RiskSummary r = estimate_risk(v);
      if (s == 0) base = r;
      double allowed = 2.0 * (levels[s] - levels[0]) + 3.0 * std::sqrt(r.se * r.se + base.se * base.se);
      rows.push_back({{key, levels[s]},
                      {"mean", r.mean},
                      {"se", r.se},
                      {"count", r.count},
                      {"excess", r.mean - base.mean},
                      {"allowed", allowed}});
    }
    ch[e] = rows;
  }
  return ch;
}

inline ExperimentOutput run_contamination_density(const ExperimentConfig& c) {
  const HistogramSetup h = histogram_setup(c);
  const auto eps = c.param<std::vector<double>>("eps");
  const auto cont = c.param<std::vector<double>>("contamination_interval");
  if (cont.size() != 2) throw ConfigError("contamination_interval needs two values");
  const DensitySpec q = uniform(cont[0], cont[1]);
  std::vector<Record> all;
  for (std::size_t s = 0; s < eps.size(); ++s) {
    const double e = eps[s];
    if (!(e >= 0.0 && e < 1.0)) throw ConfigError("eps must lie in [0, 1)");
    const DensitySpec pstar = e == 0.0 ? h.truth : mixture({1.0 - e, e}, {h.truth, q});
    const std::uint64_t seed = sweep_seed(c.seed, s);
    const std::string group = group_label("eps", e);
    auto recs = run_reps(c.reps, c.threads, [&](std::size_t rep) {
      Dataset d = sample(SamplerSpec{Contaminated{e, h.truth, q}, seed, rep}, c.n);
      return histogram_estimates(c, h, d, pstar, rep, seed, group);
    });
    all.insert(all.end(), recs.begin(), recs.end());
  }
  json ch = stability_checks(c, all, "eps", eps);
  return {std::move(all), ch};
}

inline ExperimentOutput run_equidistribution_outliers(const ExperimentConfig& c) {
  const HistogramSetup h = histogram_setup(c);
  const auto fracs = c.param<std::vector<double>>("outlier_fractions");
  const auto value = c.param<double>("outlier_value");
  std::vector<Record> all;
  for (std::size_t s = 0; s < fracs.size(); ++s) {
    const double f = fracs[s];
    if (!(f >= 0.0 && f < 1.0)) throw ConfigError("outlier_fractions must lie in [0, 1)");
    const auto m = static_cast<std::size_t>(std::llround(f * static_cast<double>(c.n)));
    std::vector<std::size_t> idx(m);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    const TrueLaw law = outlier_injected(h.truth, idx, std::vector<double>(m, value));
    const std::uint64_t seed = sweep_seed(c.seed, s);
    const std::string group = group_label("outlier_fraction", f);
    auto recs = run_reps(c.reps, c.threads, [&](std::size_t rep) {
      Dataset d = sample(SamplerSpec{law, seed, rep}, c.n);
      auto out = histogram_estimates(c, h, d, h.truth, rep, seed, group);
      for (auto& r : out) r.flag("outliers", m);
      return out;
    });
    all.insert(all.end(), recs.begin(), recs.end());
  }
  json ch = stability_checks(c, all, "outlier_fraction", fracs);
  return {std::move(all), ch};
}

// ---------------------------------------------------------------- 8
inline ExperimentOutput run_convex_mle_equivalence(const ExperimentConfig& c) {
  const auto step = c.param<double>("lattice_step");
  const auto bp_step = c.param<double>("breakpoint_step");
  const auto cmin = c.param<std::size_t>("cells_min");
  const auto cmax = c.param<std::size_t>("cells_max");
  const auto rate = c.param<double>("truth_rate");
  const auto decreasing = c.param<bool>("decreasing_lattice");
  if (cmin < 1 || cmax < cmin) throw ConfigError("cells_min/cells_max out of order");
  const auto slots = static_cast<std::size_t>(std::llround(1.0 / bp_step)) - 1;  // interior breakpoint candidates
  if (slots + 1 < cmax) throw ConfigError("breakpoint_step too coarse for cells_max");
  if (histogram_lattice_size(cmax, step) > static_cast<double>(kDefaultLatticeCap)) throw ConfigError("lattice too large");
  const DensitySpec truth = truncated_exponential(rate, 1.0);
  const std::uint64_t seed = sweep_seed(c.seed, 0);
  const double n = static_cast<double>(c.n);

  auto recs = run_reps(c.reps, c.threads, [&](std::size_t rep) {
    std::vector<Record> out;
    // random partition of [0, 1]
    Stream ps(sweep_seed(c.seed, 1), rep);
    const std::size_t cells = cmin + std::min(cmax - cmin, static_cast<std::size_t>(ps.u01() * static_cast<double>(cmax - cmin + 1)));
    std::vector<std::size_t> pool(slots);
    std::iota(pool.begin(), pool.end(), std::size_t{1});
    for (std::size_t i = 0; i + 1 < cells; ++i) {
      std::size_t j = i + std::min(slots - i - 1, static_cast<std::size_t>(ps.u01() * static_cast<double>(slots - i)));
      std::swap(pool[i], pool[j]);
    }
    std::vector<std::size_t> cut(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(cells - 1));
    std::sort(cut.begin(), cut.end());
    std::vector<double> br{0.0};
    for (std::size_t k : cut) br.push_back(static_cast<double>(k) * bp_step);
    br.push_back(1.0);
    std::string part;
    for (double b : br) part += (part.empty() ? "" : " ") + format_double(b);

    Dataset d = sample(SamplerSpec{truth, seed, rep}, c.n);
    const auto counts = cell_counts(br, d.x);
    std::vector<double> widths(cells);
    for (std::size_t j = 0; j < cells; ++j) widths[j] = br[j + 1] - br[j];

    if (c.uses("rho")) {
      const CandidateFamily fam = build_histogram_family(br, step);
      const auto near = fam.lattice->index_of(nearest_units(counts, fam.lattice->K));
      for (const auto& k : c.psi) {
        auto e = rho_estimate(d, fam, k);
        double at_near = rho_criterion(d, *near, fam, k).value;
        Record r = record(c, rep, seed, rho_name(k), "lattice=histogram");
        r.estimate = at_near - e.criterion_value;
        r.h2_loss = hellinger2(truth, fam[e.chosen_index]);
        r.flag("cells", cells).flag("partition", part);
        r.flag("criterion_min", e.criterion_value).flag("criterion_nearest", at_near);
        r.flag("slack_bound", n * step).flag("within", at_near - e.criterion_value <= n * step);
        out.push_back(std::move(r));
      }
      if (decreasing) {
        const CandidateFamily dec = build_decreasing_family(br, step);
        auto g = grenander_estimate(d.x, br);
        std::vector<double> gcounts(cells);
        for (std::size_t j = 0; j < cells; ++j) gcounts[j] = g.as<PiecewiseConstant>().levels[j] * widths[j];
        const auto gnear = dec.lattice->index_of(nearest_units(gcounts, dec.lattice->K));
        for (const auto& k : c.psi) {
          auto e = rho_estimate(d, dec, k);
          Record r = record(c, rep, seed, rho_name(k), "lattice=decreasing");
          r.h2_loss = hellinger2(truth, dec[e.chosen_index]);
          r.flag("cells", cells).flag("criterion_min", e.criterion_value).flag("members", dec.size());
          if (gnear) {
            double at = rho_criterion(d, *gnear, dec, k).value;
            r.estimate = at - e.criterion_value;
            r.flag("criterion_grenander", at);
          }
          r.flag("grenander_in_lattice", gnear.has_value());
          out.push_back(std::move(r));
        }
      }
    }
    if (c.uses("grenander")) {
      auto g = grenander_estimate(d.x, br);
      const auto& lev = g.as<PiecewiseConstant>().levels;
      Record r = record(c, rep, seed, "grenander", "lattice=decreasing");
      r.h2_loss = hellinger2(truth, g);
      r.flag("cells", cells).flag("partition", part);
      if (cells <= 20) r.flag("matches_brute_force", lev == oracle::brute_force_decreasing_mle(counts, widths));
      out.push_back(std::move(r));
    }
    return out;
  });

  json ch = json::object();
  for (const auto& k : c.psi) {
    auto f = flag_frequency(recs, rho_name(k), "lattice=histogram", "within");
    ch[rho_name(k) + "_within_slack"] = {{"hits", f.hits}, {"total", f.total}};
  }
  auto g = flag_frequency(recs, "grenander", "lattice=decreasing", "matches_brute_force");
  ch["grenander_matches_brute_force"] = {{"hits", g.hits}, {"total", g.total}};
  return {std::move(recs), ch};
}

// ---------------------------------------------------------------- 9
inline DensitySpec named_error(const std::string& s) {
  if (s == "uniform") return uniform(-0.5, 0.5);
  if (s == "gaussian") return gaussian(0.0, 1.0 / std::sqrt(12.0));
  if (s == "cauchy") return cauchy(0.0, 0.2);
  throw ConfigError("unknown error density '" + s + "'");
}

inline ExperimentOutput run_regression_heavy_tail(const ExperimentConfig& c) {
  const auto truth = c.param<std::vector<double>>("truth_coef");
  const auto dim = c.param<std::size_t>("feature_dim");
  const auto step = c.param<double>("grid_step");
  const auto half = c.param<long>("grid_half_count");
  const auto offset = c.param<double>("grid_offset");
  const auto errors = c.param<std::vector<std::string>>("error_densities");
  const auto truth_error = named_error(c.param<std::string>("truth_error"));
  const auto shift = c.param<double>("outlier_shift");
  const auto oidx = c.param<std::size_t>("outlier_index");
  const auto kappa = c.param<double>("kappa");
  const auto scenarios = c.param<std::vector<std::string>>("scenarios");
  if (truth.size() > dim || dim == 0) throw ConfigError("truth_coef longer than feature_dim");
  if (oidx >= c.n) throw ConfigError("outlier_index must be < n");

  std::vector<double> beta = truth;
  beta.resize(dim, 0.0);
  // product grid beta_j + offset step + step {-half..half}
  std::vector<std::vector<double>> grid{{}};
  for (std::size_t j = 0; j < dim; ++j) {
    std::vector<std::vector<double>> next;
    for (const auto& g : grid)
      for (long i = -half; i <= half; ++i) {
        auto v = g;
        v.push_back(beta[j] + offset * step + static_cast<double>(i) * step);
        next.push_back(std::move(v));
      }
    grid = std::move(next);
  }
  std::vector<DensitySpec> errs;
  for (const auto& e : errors) errs.push_back(named_error(e));
  const PolynomialFeatures phi{dim};
  const PenalizedCollection dict = assign_penalties(build_regression_dictionary(phi, {grid}, errs), kappa, static_cast<double>(c.n));
  const std::uint64_t seed = sweep_seed(c.seed, 0);  // scenarios share the base data

  auto coef_err = [&](const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t j = 0; j < dim; ++j) s += (b[j] - beta[j]) * (b[j] - beta[j]);
    return std::sqrt(s);
  };
  auto l1_emp = [&](const Dataset& d, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) s += std::abs(phi.eval(b, d.w[i]) - phi.eval(beta, d.w[i]));
    return s / static_cast<double>(d.size());
  };

  std::vector<Record> all;
  json ch = json::object();
  for (const auto& sc : scenarios) {
    if (sc != "clean" && sc != "outlier") throw ConfigError("unknown scenario '" + sc + "'");
    const std::string group = "scenario=" + sc;
    auto recs = run_reps(c.reps, c.threads, [&](std::size_t rep) {
      std::vector<Record> out;
      Dataset d = sample(SamplerSpec{RegressionLaw{uniform(0.0, 1.0), truth, truth_error}, seed, rep}, c.n);
      if (sc == "outlier") d.x[oidx] += shift;
      auto emit = [&](const std::string& est, const std::vector<double>& b) {
        Record r = record(c, rep, seed, est, group);
        double e = coef_err(b);
        r.estimate = e;
        r.sq_loss = e * e;
        r.flag("l1_emp", l1_emp(d, b));
        return r;
      };
      if (c.uses("rho_penalized"))
        for (const auto& k : c.psi) {
          auto e = rho_estimate_penalized(d, dict, k);
          const auto& rc = dict.families[e.family_index][e.member_index].as<RegressionConditional>();
          out.push_back(emit("rho_penalized_" + std::string(name(k)), rc.coef)
                            .flag("error_density", errors[e.family_index])
                            .flag("criterion", e.criterion_value));
        }
      if (c.uses("least_squares")) out.push_back(emit("least_squares", least_squares_fit(d, phi)));
      return out;
    });

    json cj = json::object();
    auto ls = column(recs, "least_squares", group, &Record::estimate);
    if (!ls.empty()) cj["least_squares_median_error"] = estimate_risk(ls).q50;
    for (const auto& k : c.psi) {
      const std::string est = "rho_penalized_" + std::string(name(k));
      auto rv = column(recs, est, group, &Record::estimate);
      if (rv.empty()) continue;
      cj[est + "_median_error"] = estimate_risk(rv).q50;
      if (rv.size() == ls.size()) {
        std::size_t tenfold = 0;
        for (std::size_t i = 0; i < rv.size(); ++i) tenfold += ls[i] >= 10.0 * rv[i];
        cj[est + "_ls_tenfold"] = {{"hits", tenfold}, {"total", rv.size()}};
      }
    }
    ch[sc] = cj;
    all.insert(all.end(), recs.begin(), recs.end());
  }
  return {std::move(all), ch};
}

// ---------------------------------------------------------------- 10
inline ExperimentOutput run_exponential_truncation_check(const ExperimentConfig& c) {
  const auto thetas = c.param<std::vector<double>>("thetas");
  const auto Ts = c.param<std::vector<double>>("Ts");
  const auto cells = c.param<std::size_t>("quadrature_cells");
  const auto trace_ns = c.param<std::vector<double>>("trace_ns");
  const auto trace_theta = c.param<double>("trace_theta");
  std::vector<Record> recs;
  double worst = 0.0;
  std::size_t rep = 0;
  for (double th : thetas)
    for (double T : Ts) {
      const DensitySpec e = exponential(th), t = truncated_exponential(th, T);
      double closed = 1.0 - std::sqrt(-std::expm1(-th * T));
      double quad = hellinger2_quadrature(e, t, {cells, {0.0, T}, true});
      worst = std::max(worst, std::abs(closed - quad));
      Record r = record(c, rep++, c.seed, "analytic_vs_quadrature", "theta=" + format_double(th) + ";T=" + format_double(T));
      r.estimate = quad;
      r.h2_loss = closed;
      r.flag("abs_diff", std::abs(closed - quad));
      recs.push_back(std::move(r));
    }
  for (double nn : trace_ns) {
    double M = (2.0 / 3.0) * std::log(nn);
    Record r = record(c, rep++, c.seed, "truncation_trace", "n=" + format_double(nn));
    r.estimate = M;
    r.h2_loss = *hellinger2_analytic(exponential(trace_theta), truncated_exponential(trace_theta, M));
    r.flag("n_pow_minus_2_3", std::pow(nn, -2.0 / 3.0));
    recs.push_back(std::move(r));
  }
  return {std::move(recs), json{{"max_abs_diff", worst}, {"tolerance", 1e-8}}};
}

}  // namespace detail

inline const std::vector<ExperimentInfo>& registry() {
  using detail::base_config;
  static const std::vector<ExperimentInfo> reg = {
      {"outlier_uniform_scale",
       "U[0, theta] grid model with one observation replaced by 100; MLE vs rho",
       {"rho", "mle"},
       base_config("outlier_uniform_scale", 10000, 200, {"rho", "mle"},
                   {{"theta_denominator", 100.0},
                    {"theta_count", 10100},
                    {"truth_theta", 1.0},
                    {"outlier_value", 100.0},
                    {"outlier_index", 0},
                    {"rho_window", {0.98, 1.05}},
                    {"mle_large_n", 1000000}}),
       detail::run_outlier_uniform_scale},
      {"unbounded_likelihood_translation",
       "translation grid of the unbounded heavy-tailed density; rho vs sample median, loss n |error|",
       {"rho", "median"},
       base_config("unbounded_likelihood_translation", 100, 200, {"rho", "median"},
                   {{"truth_shift", 0.0}, {"grid_lo", -0.5}, {"grid_step", 0.005}, {"grid_count", 201}}),
       detail::run_unbounded_likelihood_translation},
      {"gaussian_submodel",
       "Gaussian mean in dimension k+1, rho on the one-dimensional submodel vs (X0, 0)",
       {"rho", "submodel_mle"},
       base_config("gaussian_submodel", 129, 10000, {"rho", "submodel_mle"},
                   {{"k", 128}, {"grid_step", 1e-3}, {"half_width", 500}, {"cases", {"k_quarter", "theta_prime_2"}}}),
       detail::run_gaussian_submodel},
      {"pathological_mle",
       "likelihood of a pathological density version at the sample maximum vs the sample mean",
       {"mle"},
       base_config("pathological_mle", 100, 1000, {"mle"}, {{"trend_n", {1000, 10000}}}),
       detail::run_pathological_mle},
      {"approx_model_mixture",
       "uniform location model under a two-component uniform mixture; MLE failures and rho deviations",
       {"rho", "mle"},
       base_config("approx_model_mixture", 100, 10000, {"rho", "mle"},
                   {{"alphas", {0.0, 0.05, 0.1, 0.2}},
                    {"cs", {2.0, 5.0, 10.0}},
                    {"theta0", 0.0},
                    {"grid_denominator", 1000.0},
                    {"grid_first_index", -1500},
                    {"grid_last_index", 101500}}),
       detail::run_approx_model_mixture},
      {"contamination_density",
       "histogram family under eps-contamination; h2(P*, estimate)",
       {"rho", "mle"},
       base_config("contamination_density", 200, 200, {"rho", "mle"},
                   {{"breakpoints", {0.0, 0.25, 0.5, 0.75, 1.0}},
                    {"probs", {0.4, 0.3, 0.2, 0.1}},
                    {"lattice_step", 0.05},
                    {"eps", {0.0, 0.05, 0.1}},
                    {"contamination_interval", {2.0, 3.0}}}),
       detail::run_contamination_density},
      {"equidistribution_outliers",
       "histogram family with a fraction of observations replaced by a fixed value; h2(Pbar, estimate)",
       {"rho", "mle"},
       base_config("equidistribution_outliers", 200, 200, {"rho", "mle"},
                   {{"breakpoints", {0.0, 0.25, 0.5, 0.75, 1.0}},
                    {"probs", {0.4, 0.3, 0.2, 0.1}},
                    {"lattice_step", 0.05},
                    {"outlier_fractions", {0.0, 0.05, 0.1}},
                    {"outlier_value", 0.9}}),
       detail::run_equidistribution_outliers},
      {"convex_mle_equivalence",
       "histogram and decreasing lattices: criterion of the member nearest the MLE; Grenander vs brute force",
       {"rho", "grenander"},
       base_config("convex_mle_equivalence", 100, 100, {"rho", "grenander"},
                   {{"lattice_step", 0.02},
                    {"breakpoint_step", 0.05},
                    {"cells_min", 2},
                    {"cells_max", 4},
                    {"truth_rate", 1.5},
                    {"decreasing_lattice", true}}),
       detail::run_convex_mle_equivalence},
      {"regression_heavy_tail",
       "polynomial regression, penalized rho over (coefficients, error density) vs least squares",
       {"rho_penalized", "least_squares"},
       base_config("regression_heavy_tail", 500, 200, {"rho_penalized", "least_squares"},
                   {{"truth_coef", {1.0, 2.0}},
                    {"feature_dim", 3},
                    {"grid_step", 0.05},
                    {"grid_half_count", 5},
                    {"grid_offset", 0.3},
                    {"error_densities", {"uniform", "gaussian", "cauchy"}},
                    {"truth_error", "uniform"},
                    {"scenarios", {"clean", "outlier"}},
                    {"outlier_shift", 1e6},
                    {"outlier_index", 0},
                    {"kappa", 1.0}}),
       detail::run_regression_heavy_tail},
      {"exponential_truncation_check",
       "closed-form vs quadrature h2 between an exponential law and its truncation, plus the M = (2/3) log n trace",
       {"analytic"},
       base_config("exponential_truncation_check", 1, 1, {"analytic"},
                   {{"thetas", {0.5, 1.0, 2.0}},
                    {"Ts", {1.0, 3.0, 10.0}},
                    {"quadrature_cells", 1000000},
                    {"trace_ns", {10.0, 100.0, 1000.0, 10000.0, 100000.0, 1000000.0}},
                    {"trace_theta", 1.0}}),
       detail::run_exponential_truncation_check},
  };
  return reg;
}

inline const ExperimentInfo& find_experiment(const std::string& name) {
  for (const auto& e : registry())
    if (e.name == name) return e;
  throw ConfigError("unknown experiment '" + name + "'");
}

// Registry defaults overlaid by `file`; estimators must be supported.
inline ExperimentConfig make_config(const std::string& experiment, const json& file = json::object()) {
  const auto& info = find_experiment(experiment);
  if (file.contains("experiment") && file.at("experiment") != experiment)
    throw ConfigError("config names experiment '" + file.at("experiment").dump() + "', expected '" + experiment + "'");
  ExperimentConfig c = parse_config(info.defaults, file);
  if (c.estimators.empty()) throw ConfigError("'estimators' must not be empty");
  for (const auto& e : c.estimators)
    if (std::find(info.estimators.begin(), info.estimators.end(), e) == info.estimators.end())
      throw ConfigError("estimator '" + e + "' is not applicable to " + experiment);
  return c;
}

struct RunResult {
  std::vector<Record> records;
  json summary;
};

inline RunResult run_experiment(const ExperimentConfig& c) {
  const auto& info = find_experiment(c.experiment);
  auto t0 = std::chrono::steady_clock::now();
  ExperimentOutput out = info.run(c);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  json summary{{"config", c.to_json()},
               {"description", info.description},
               {"risk", summarize_losses(out.records)},
               {"checks", out.checks},
               {"wall_time_s", secs}};
  return {std::move(out.records), std::move(summary)};
}

}  // namespace rho::harness
