#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <variant>
#include <vector>

#include "rho/dataset.hpp"
#include "rho/density.hpp"

namespace rho {

// Philox4x32-10 (Salmon et al., "Parallel random numbers: as easy as 1, 2, 3").
using PhiloxBlock = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

inline PhiloxBlock philox4x32_10(PhiloxBlock ctr, PhiloxKey key) {
  constexpr std::uint32_t M0 = 0xD2511F53u, M1 = 0xCD9E8D57u;
  constexpr std::uint32_t W0 = 0x9E3779B9u, W1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    std::uint64_t p0 = static_cast<std::uint64_t>(M0) * ctr[0];
    std::uint64_t p1 = static_cast<std::uint64_t>(M1) * ctr[2];
    std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32), lo0 = static_cast<std::uint32_t>(p0);
    std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32), lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += W0;
    key[1] += W1;
  }
  return ctr;
}

// Counter-based stream: draw k of stream s under seed is a pure function of
// (seed, s, k), so replications can run in any order on any thread.
class Stream {
 public:
  Stream(std::uint64_t seed, std::uint64_t stream_id) : key_{lo(seed), hi(seed)}, stream_(stream_id) {}

  std::uint64_t next_u64() {
    PhiloxBlock out = philox4x32_10({lo(counter_), hi(counter_), lo(stream_), hi(stream_)}, key_);
    ++counter_;
    return (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
  }

  // Uniform on (0, 1): 53 random bits, centered in their cell.
  double u01() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

  // Box-Muller, cosine branch only (two uniforms per normal).
  double normal() {
    double u1 = u01(), u2 = u01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  std::uint64_t draws() const { return counter_; }

 private:
  static std::uint32_t lo(std::uint64_t v) { return static_cast<std::uint32_t>(v); }
  static std::uint32_t hi(std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); }

  PhiloxKey key_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
};

// Inverse CDF of the heavy-tailed density (1/6)[|x|^{-1/2} on 0<|x|<=1, x^{-2} beyond].
inline double heavy_tail_quantile(double u) {
  if (!(u > 0.0 && u < 1.0)) throw std::domain_error("heavy_tail_quantile: u must lie in (0, 1)");
  if (u == 0.5) return 0.0;
  if (u < 0.5) return -heavy_tail_quantile(1.0 - u);
  if (u <= 5.0 / 6.0) {
    double t = 3.0 * (u - 0.5);
    return t * t;
  }
  return 1.0 / (6.0 * (1.0 - u));
}

// One draw from a catalog density by inverse CDF (Box-Muller for Gaussians).
inline double draw(const DensitySpec& spec, Stream& s) {
  return std::visit(
      overloaded{
          [&](const UniformInterval& d) { return d.a + (d.b - d.a) * s.u01(); },
          [&](const Gaussian& d) { return d.mean + d.sd * s.normal(); },
          [&](const Exponential& d) { return d.shift - std::log(s.u01()) / d.rate; },
          [&](const TruncatedExponential& d) {
            double u = s.u01();
            return d.shift - std::log1p(u * std::expm1(-d.rate * d.T)) / d.rate;
          },
          [&](const HeavyTailP& d) { return d.shift + heavy_tail_quantile(s.u01()); },
          [&](const Cauchy& d) { return d.location + d.scale * std::tan(std::numbers::pi * (s.u01() - 0.5)); },
          [&](const PiecewiseConstant& d) {
            double u = s.u01();
            double acc = 0.0;
            const auto& br = d.breakpoints;
            std::size_t last = 0;
            for (std::size_t j = 0; j + 1 < br.size(); ++j) {
              double mass = d.levels[j] * (br[j + 1] - br[j]);
              if (mass <= 0.0) continue;
              last = j;
              if (u < acc + mass) return br[j] + (u - acc) / d.levels[j];
              acc += mass;
            }
            return br[last + 1];
          },
          [&](const Mixture& d) {
            double u = s.u01();
            double acc = 0.0;
            std::size_t pick = d.weights.size() - 1;
            for (std::size_t i = 0; i < d.weights.size(); ++i) {
              acc += d.weights[i];
              if (u < acc) {
                pick = i;
                break;
              }
            }
            return draw(d.components[pick], s);
          },
          [&](const PathologicalGaussianVersion& d) { return d.theta + s.normal(); },
          [](const RegressionConditional&) -> double {
            throw std::invalid_argument("draw: use a RegressionLaw for regression data");
          },
      },
      spec.variant());
}

// Truth laws of the experiments.
struct UniformScale {
  double theta = 1.0;  // U[0, theta]
};
struct GaussianMean {
  std::vector<double> theta;  // one N(theta_i, 1) draw per coordinate; n must equal theta.size()
};
struct MixtureAlphaTheta {
  double alpha = 0.0, theta = 0.0;  // (1 - alpha) U[theta, theta+1] + alpha U[100+theta, 101+theta]
};
struct Contaminated {
  double eps = 0.0;
  DensitySpec base, contamination;
};
struct RegressionLaw {
  DensitySpec design;            // law of W
  std::vector<double> coef;      // f* over polynomial features
  DensitySpec error;
};
struct OutlierInjected;

using TrueLaw = std::variant<DensitySpec, UniformScale, GaussianMean, MixtureAlphaTheta, Contaminated, RegressionLaw,
                             std::shared_ptr<const OutlierInjected>>;

// Base draws, then observation i is replaced by values[k] for indices[k] = i.
struct OutlierInjected {
  TrueLaw base;
  std::vector<std::size_t> indices;
  std::vector<double> values;
};

struct SamplerSpec {
  TrueLaw target;
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
};

namespace detail {

inline Dataset sample_law(const TrueLaw& law, std::size_t n, Stream& s) {
  return std::visit(
      overloaded{
          [&](const DensitySpec& d) {
            std::vector<double> x(n);
            for (auto& v : x) v = draw(d, s);
            return Dataset(std::move(x));
          },
          [&](const UniformScale& u) {
            if (!(u.theta > 0.0)) throw std::invalid_argument("UniformScale: theta must be positive");
            std::vector<double> x(n);
            for (auto& v : x) v = u.theta * s.u01();
            return Dataset(std::move(x));
          },
          [&](const GaussianMean& g) {
            if (g.theta.size() != n) throw std::invalid_argument("GaussianMean: n must equal the mean dimension");
            std::vector<double> x(n);
            for (std::size_t i = 0; i < n; ++i) x[i] = g.theta[i] + s.normal();
            return Dataset(std::move(x));
          },
          [&](const MixtureAlphaTheta& m) {
            if (!(m.alpha >= 0.0 && m.alpha < 0.5)) throw std::invalid_argument("MixtureAlphaTheta: alpha must lie in [0, 1/2)");
            std::vector<double> x(n);
            for (auto& v : x) {
              double pick = s.u01(), u = s.u01();
              v = (pick < m.alpha ? 100.0 + m.theta : m.theta) + u;
            }
            return Dataset(std::move(x));
          },
          [&](const Contaminated& c) {
            if (!(c.eps >= 0.0 && c.eps <= 1.0)) throw std::invalid_argument("Contaminated: eps must lie in [0, 1]");
            std::vector<double> x(n);
            for (auto& v : x) {
              double pick = s.u01();
              v = draw(pick < c.eps ? c.contamination : c.base, s);
            }
            return Dataset(std::move(x));
          },
          [&](const RegressionLaw& r) {
            PolynomialFeatures phi{r.coef.size()};
            std::vector<double> w(n), y(n);
            for (std::size_t i = 0; i < n; ++i) {
              w[i] = draw(r.design, s);
              y[i] = phi.eval(r.coef, w[i]) + draw(r.error, s);
            }
            return Dataset(std::move(w), std::move(y));
          },
          [&](const std::shared_ptr<const OutlierInjected>& o) {
            if (!o) throw std::invalid_argument("OutlierInjected: null law");
            if (o->indices.size() != o->values.size()) throw std::invalid_argument("OutlierInjected: one value per index");
            Dataset d = sample_law(o->base, n, s);
            for (std::size_t k = 0; k < o->indices.size(); ++k) {
              if (o->indices[k] >= n) throw std::out_of_range("OutlierInjected: index beyond n");
              d.x[o->indices[k]] = o->values[k];
            }
            return d;
          },
      },
      law);
}

}  // namespace detail

inline Dataset sample(const SamplerSpec& spec, std::size_t n) {
  if (n == 0) throw std::invalid_argument("sample: n must be >= 1");
  Stream s(spec.seed, spec.stream_id);
  return detail::sample_law(spec.target, n, s);
}

inline TrueLaw outlier_injected(TrueLaw base, std::vector<std::size_t> indices, std::vector<double> values) {
  return std::make_shared<const OutlierInjected>(OutlierInjected{std::move(base), std::move(indices), std::move(values)});
}

}  // namespace rho
