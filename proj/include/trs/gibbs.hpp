#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string_view>
#include <utility>
#include <vector>

#include "trs/counts.hpp"
#include "trs/model.hpp"
#include "trs/rng.hpp"

namespace trs {

struct PriorSpec {
  enum class Regime { jeffreys, informative };

  Regime regime = Regime::jeffreys;
  // Dirichlet hyperparameters for (a1, a2, a3, a4, 1-alpha0).
  std::array<double, 5> alpha_conc{0.5, 0.5, 0.5, 0.5, 0.5};
  // Gamma prior on each delta_l (shape gamma_l, scale lambda_l); informative only.
  std::array<double, 3> delta_shape{1.0, 1.0, 1.0};
  std::array<double, 3> delta_scale{1.0, 1.0, 1.0};

  static PriorSpec jeffreys() { return PriorSpec{}; }
  static PriorSpec informative(const std::array<double, 5>& alpha_conc,
                               const std::array<double, 3>& delta_shape,
                               const std::array<double, 3>& delta_scale);
  void validate() const;
};

struct GibbsConfig {
  std::int64_t iterations = 200000;
  std::int64_t burn_in = 20000;
  std::int64_t thin = 10;
  std::uint64_t seed = 0;
  // Permanently pins alpha_s to zero (s = 1..4 at index s-1), recovering the
  // submodels: a3 pinned -> TBM-1, a4 pinned -> TBM-2, all pinned -> Mt.
  std::array<bool, 4> pin_alpha{false, false, false, false};
  // Start from an overdispersed random state instead of the default one.
  bool dispersed_init = false;

  void validate() const;
  std::int64_t retained() const { return (iterations - burn_in) / thin; }
};

// Latent regime decomposition of the observed cells and the unobserved cell.
// y111/y000 index (independent, a1, a2, a3, a4); the six scalar fields hold
// the independent-regime part of the binary-split cells.
struct LatentCounts {
  std::array<std::int64_t, 5> y111{};
  std::array<std::int64_t, 5> y000{};
  std::int64_t y110_1 = 0, y011_1 = 0, y100_1 = 0;
  std::int64_t y101_1 = 0, y010_1 = 0, y001_1 = 0;

  std::int64_t unobserved_total() const {
    return y000[0] + y000[1] + y000[2] + y000[3] + y000[4];
  }
  // Throws when a sum constraint or bound is violated.
  void validate_against(const TrsCounts& counts, std::int64_t n) const;
};

// Regime occupancy totals k1..k5 driving the Dirichlet update of alpha.
struct AlphaRegimeCounts {
  std::int64_t k1 = 0, k2 = 0, k3 = 0, k4 = 0, k5 = 0;
};
AlphaRegimeCounts alpha_regime_counts(const LatentCounts& latent, const TrsCounts& counts);

// Success/failure exposure (m_l, n_l) of each list's latent Bernoulli draws.
struct EffectCounts {
  std::array<std::int64_t, 3> m{};
  std::array<std::int64_t, 3> n{};
};
EffectCounts effect_counts(const LatentCounts& latent, const TrsCounts& counts,
                           std::int64_t n);

LatentCounts sample_latent(const TrsCounts& counts, std::int64_t n,
                           const AlphaVector& alpha, const RandomEffects& effects,
                           Rng& rng);

RandomEffects sample_effects(const LatentCounts& latent, const TrsCounts& counts,
                             std::int64_t n, const DeltaVector& delta, Rng& rng);

AlphaVector sample_alpha(const LatentCounts& latent, const TrsCounts& counts,
                         std::int64_t n, const PriorSpec& prior, Rng& rng,
                         const std::array<bool, 4>& pin_alpha = {});

DeltaVector sample_delta(const RandomEffects& effects, const PriorSpec& prior,
                         Rng& rng);

// Draws the unobserved-cell tail y000_5 ~ NB(x0 + sum_{u<=4} y000_u,
// 1 - alpha4*(1-P1)) and returns the implied population size.
std::int64_t sample_population_size(const LatentCounts& latent, const TrsCounts& counts,
                                    double alpha4, double p1, Rng& rng);

std::pair<LatentCounts, RandomEffects> initialize_state(const TrsCounts& counts,
                                                        const PriorSpec& prior,
                                                        Rng& rng,
                                                        bool dispersed = false);

struct ChainDraw {
  std::int64_t n = 0;
  AlphaVector alpha;
  DeltaVector delta;
  RandomEffects effects;
  CaptureProbs probs;
};

class Chain {
 public:
  Chain() = default;
  explicit Chain(std::int64_t x0) : x0_(x0) {}

  void reserve(std::size_t n) { draws_.reserve(n); }
  void push_back(const ChainDraw& d) { draws_.push_back(d); }
  std::size_t size() const { return draws_.size(); }
  bool empty() const { return draws_.empty(); }
  const ChainDraw& operator[](std::size_t i) const { return draws_[i]; }
  std::int64_t x0() const { return x0_; }

  static const std::vector<std::string>& scalar_names();
  // Extracts one tracked scalar by name: N, alpha1..alpha4, delta1..delta3,
  // b1..b3, P1..P3.
  std::vector<double> scalar(std::string_view name) const;

  void write_csv(std::ostream& out) const;

 private:
  std::vector<ChainDraw> draws_;
  std::int64_t x0_ = 0;
};

// Data-augmentation Gibbs sampler. Each iteration updates the theta block
// (alpha, delta, N), then the latent cells, then the random effects;
// deterministic given config.seed.
Chain run_gibbs(const TrsCounts& counts, const PriorSpec& prior,
                const GibbsConfig& config);

}  // namespace trs
