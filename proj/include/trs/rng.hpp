#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

namespace trs {

// SplitMix64 finalizer. Used to spread seeds and derive stream seeds that are
// decorrelated from their (root, stream) inputs.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Seeded random stream. A root seed plus a stream index yields an independent,
// reproducible generator, so parallel replicates can each own one without any
// coordination. Distribution objects are constructed per call; no sampling
// state survives between calls beyond the engine itself.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix64(seed)) {}
  Rng(std::uint64_t root, std::uint64_t stream)
      : engine_(mix64(mix64(root) ^ (0x9e3779b97f4a7c15ULL * (stream + 1)))) {}

  std::mt19937_64& engine() { return engine_; }

  double uniform() {
    return std::uniform_real_distribution<double>(0.0, 1.0)(engine_);
  }

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }

  bool bernoulli(double p) {
    return std::bernoulli_distribution(p)(engine_);
  }

  double normal(double mean, double sd) {
    return std::normal_distribution<double>(mean, sd)(engine_);
  }

  // Rate parameterization: mean = 1 / rate.
  double exponential(double rate) {
    if (rate <= 0.0) throw std::invalid_argument("exponential: rate must be > 0");
    return std::exponential_distribution<double>(rate)(engine_);
  }

  // Shape/scale parameterization: mean = shape * scale.
  double gamma(double shape, double scale) {
    if (shape <= 0.0 || scale <= 0.0)
      throw std::invalid_argument("gamma: shape and scale must be > 0");
    return std::gamma_distribution<double>(shape, scale)(engine_);
  }

  double beta(double a, double b) {
    if (a <= 0.0 || b <= 0.0) throw std::invalid_argument("beta: shapes must be > 0");
    const double x = gamma(a, 1.0);
    const double y = gamma(b, 1.0);
    const double s = x + y;
    if (s <= 0.0) return a / (a + b);  // both underflowed; fall back to the mean
    return x / s;
  }

  std::int64_t poisson(double mean) {
    if (mean < 0.0) throw std::invalid_argument("poisson: mean must be >= 0");
    if (mean == 0.0) return 0;
    return std::poisson_distribution<std::int64_t>(mean)(engine_);
  }

  std::int64_t binomial(std::int64_t n, double p) {
    if (n < 0) throw std::invalid_argument("binomial: n must be >= 0");
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("binomial: p must be in [0,1]");
    if (n == 0 || p == 0.0) return 0;
    if (p == 1.0) return n;
    return std::binomial_distribution<std::int64_t>(n, p)(engine_);
  }

  // Failures before `size` successes with success probability p; sampled
  // through the gamma-Poisson mixture so non-integer and very large sizes are
  // handled uniformly.
  std::int64_t negative_binomial(double size, double p) {
    if (size <= 0.0) throw std::invalid_argument("negative_binomial: size must be > 0");
    if (p <= 0.0 || p > 1.0)
      throw std::invalid_argument("negative_binomial: p must be in (0,1]");
    if (p == 1.0) return 0;
    const double lambda = gamma(size, (1.0 - p) / p);
    return poisson(lambda);
  }

  // Zero concentrations are allowed and yield exact zeros, which keeps pinned
  // mixture components at zero.
  std::vector<double> dirichlet(std::span<const double> concentration) {
    std::vector<double> out(concentration.size(), 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < concentration.size(); ++i) {
      const double c = concentration[i];
      if (c < 0.0) throw std::invalid_argument("dirichlet: concentration must be >= 0");
      if (c > 0.0) {
        out[i] = gamma(c, 1.0);
        total += out[i];
      }
    }
    if (total <= 0.0) throw std::invalid_argument("dirichlet: all concentrations zero");
    for (double& v : out) v /= total;
    return out;
  }

  // Sequential binomial decomposition. The counts sum to n exactly and
  // zero-probability components receive exact zeros.
  std::vector<std::int64_t> multinomial(std::int64_t n, std::span<const double> probs) {
    std::vector<std::int64_t> out(probs.size(), 0);
    double mass = 0.0;
    std::size_t last = probs.size();
    for (std::size_t i = 0; i < probs.size(); ++i) {
      if (probs[i] < 0.0) throw std::invalid_argument("multinomial: negative probability");
      if (probs[i] > 0.0) last = i;
      mass += probs[i];
    }
    if (mass <= 0.0 || last == probs.size()) {
      if (n > 0) throw std::invalid_argument("multinomial: zero total probability");
      return out;
    }
    std::int64_t remaining = n;
    for (std::size_t i = 0; i < last && remaining > 0; ++i) {
      if (probs[i] <= 0.0) continue;
      const double q = std::min(1.0, probs[i] / mass);
      const std::int64_t draw = binomial(remaining, q);
      out[i] = draw;
      remaining -= draw;
      mass -= probs[i];
      if (mass <= 0.0) break;
    }
    out[last] += remaining;
    return out;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace trs
