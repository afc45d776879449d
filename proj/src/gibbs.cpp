#include "trs/gibbs.hpp"

#include <cassert>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace trs {

namespace {

constexpr double kOmegaFloor = 1e-300;

// log(1 + e^{-b}), stable for large |b|.
double omega(double b) {
  const double x = -b;
  const double w = (x > 0.0 ? x : 0.0) + std::log1p(std::exp(-std::fabs(x)));
  return std::max(w, kOmegaFloor);
}

}  // namespace

PriorSpec PriorSpec::informative(const std::array<double, 5>& alpha_conc,
                                 const std::array<double, 3>& delta_shape,
                                 const std::array<double, 3>& delta_scale) {
  PriorSpec p;
  p.regime = Regime::informative;
  p.alpha_conc = alpha_conc;
  p.delta_shape = delta_shape;
  p.delta_scale = delta_scale;
  p.validate();
  return p;
}

void PriorSpec::validate() const {
  for (double b : alpha_conc) {
    if (!(b > 0.0)) throw std::invalid_argument("alpha prior concentrations must be > 0");
  }
  if (regime == Regime::informative) {
    // shape 0 is allowed: the full conditional Gamma(shape+1, .) stays proper
    // and the exponential regime-I law is recovered as scale -> infinity.
    for (int l = 0; l < 3; ++l) {
      if (!(delta_shape[l] >= 0.0) || !(delta_scale[l] > 0.0)) {
        throw std::invalid_argument("delta prior shape must be >= 0, scale > 0");
      }
    }
  }
}

void GibbsConfig::validate() const {
  if (iterations <= 0) throw std::invalid_argument("iterations must be > 0");
  if (burn_in < 0 || burn_in >= iterations) {
    throw std::invalid_argument("burn_in must lie in [0, iterations)");
  }
  if (thin < 1) throw std::invalid_argument("thin must be >= 1");
}

void LatentCounts::validate_against(const TrsCounts& counts, std::int64_t n) const {
  auto nonneg = [](std::int64_t v) { return v >= 0; };
  for (auto v : y111) {
    if (!nonneg(v)) throw std::runtime_error("latent y111 component negative");
  }
  for (auto v : y000) {
    if (!nonneg(v)) throw std::runtime_error("latent y000 component negative");
  }
  if (y111[0] + y111[1] + y111[2] + y111[3] + y111[4] != counts.x111) {
    throw std::runtime_error("y111 does not sum to x111");
  }
  if (unobserved_total() != n - counts.observed_total()) {
    throw std::runtime_error("y000 does not sum to N - x0");
  }
  const std::array<std::pair<std::int64_t, std::int64_t>, 6> binary = {{
      {y110_1, counts.x110}, {y011_1, counts.x011}, {y100_1, counts.x100},
      {y101_1, counts.x101}, {y010_1, counts.x010}, {y001_1, counts.x001},
  }};
  for (const auto& [part, cell] : binary) {
    if (part < 0 || part > cell) throw std::runtime_error("binary split out of range");
  }
}

AlphaRegimeCounts alpha_regime_counts(const LatentCounts& y, const TrsCounts& x) {
  AlphaRegimeCounts k;
  k.k1 = y.y111[1] + (x.x110 - y.y110_1) + (x.x001 - y.y001_1) + y.y000[1];
  k.k2 = y.y111[2] + (x.x011 - y.y011_1) + (x.x100 - y.y100_1) + y.y000[2];
  k.k3 = y.y111[3] + (x.x101 - y.y101_1) + (x.x010 - y.y010_1) + y.y000[3];
  k.k4 = y.y111[4] + y.y000[4];
  k.k5 = y.y111[0] + y.y110_1 + y.y011_1 + y.y100_1 + y.y101_1 + y.y010_1 +
         y.y001_1 + y.y000[0];
  return k;
}

EffectCounts effect_counts(const LatentCounts& y, const TrsCounts& x, std::int64_t n) {
  EffectCounts e;
  const std::int64_t x1dd = x.list1_total();
  e.m[0] = x1dd;
  e.n[0] = n - x1dd;
  e.m[1] = y.y111[0] + y.y111[2] + y.y111[3] + y.y110_1 + x.x011 + x.x010;
  e.n[1] = x.x100 + x.x101 + y.y001_1 + y.y000[0] + y.y000[2] + y.y000[3];
  e.m[2] = y.y111[0] + y.y111[1] + y.y011_1 + y.y101_1 + x.x001;
  e.n[2] = x.x110 + y.y100_1 + y.y010_1 + y.y000[0] + y.y000[1];
  return e;
}

LatentCounts sample_latent(const TrsCounts& counts, std::int64_t n,
                           const AlphaVector& alpha, const RandomEffects& effects,
                           Rng& rng) {
  const std::int64_t x0 = counts.observed_total();
  if (n < x0) throw std::invalid_argument("n must be >= x0");
  const CaptureProbs p = effects.capture_probs();
  const CellProbs cell = cell_probabilities(alpha, p);
  const SplitProbs split = latent_split_probabilities(alpha, p);

  auto check_mass = [](double mass, std::int64_t count, const char* name) {
    if (mass <= 0.0 && count > 0) {
      throw std::runtime_error(std::string("cell ") + name +
                               " has zero probability but a positive count");
    }
  };
  check_mass(cell.p111, counts.x111, "111");
  check_mass(cell.p110, counts.x110, "110");
  check_mass(cell.p011, counts.x011, "011");
  check_mass(cell.p100, counts.x100, "100");
  check_mass(cell.p101, counts.x101, "101");
  check_mass(cell.p010, counts.x010, "010");
  check_mass(cell.p001, counts.x001, "001");
  check_mass(cell.p000, n - x0, "000");

  LatentCounts y;
  if (counts.x111 > 0) {
    const auto draw = rng.multinomial(counts.x111, split.q111);
    for (int u = 0; u < 5; ++u) y.y111[u] = draw[u];
  }
  if (n > x0) {
    const auto draw = rng.multinomial(n - x0, split.q000);
    for (int u = 0; u < 5; ++u) y.y000[u] = draw[u];
  }
  y.y110_1 = rng.binomial(counts.x110, split.q110_1);
  y.y011_1 = rng.binomial(counts.x011, split.q011_1);
  y.y100_1 = rng.binomial(counts.x100, split.q100_1);
  y.y101_1 = rng.binomial(counts.x101, split.q101_1);
  y.y010_1 = rng.binomial(counts.x010, split.q010_1);
  y.y001_1 = rng.binomial(counts.x001, split.q001_1);
#ifndef NDEBUG
  y.validate_against(counts, n);
#endif
  return y;
}

RandomEffects sample_effects(const LatentCounts& latent, const TrsCounts& counts,
                             std::int64_t n, const DeltaVector& delta, Rng& rng) {
  delta.validate();
  const EffectCounts e = effect_counts(latent, counts, n);
  RandomEffects out;
  double* b[3] = {&out.b1, &out.b2, &out.b3};
  for (int l = 0; l < 3; ++l) {
    const double a = static_cast<double>(e.m[l]) + delta[l];  // Beta shape 1
    const double c = static_cast<double>(e.n[l]) + 1.0;       // Beta shape 2
    if (!(a > 0.0) || !(c > 0.0)) {
      throw std::runtime_error("effect full conditional has non-positive shape");
    }
    // b | rest ~ EGB2(n_l + 1, m_l + delta_l) == logit of Beta(m_l + delta_l, n_l + 1).
    const double p = clamp_prob(rng.beta(a, c));
    *b[l] = std::log(p / (1.0 - p));
  }
  return out;
}

AlphaVector sample_alpha(const LatentCounts& latent, const TrsCounts& counts,
                         std::int64_t n, const PriorSpec& prior, Rng& rng,
                         const std::array<bool, 4>& pin_alpha) {
  prior.validate();
#ifndef NDEBUG
  latent.validate_against(counts, n);
#else
  (void)n;
#endif
  const AlphaRegimeCounts k = alpha_regime_counts(latent, counts);
  const std::array<std::int64_t, 5> ks = {k.k1, k.k2, k.k3, k.k4, k.k5};
  std::array<double, 5> conc{};
  for (int u = 0; u < 5; ++u) {
    const bool pinned = u < 4 && pin_alpha[static_cast<std::size_t>(u)];
    conc[u] = pinned ? 0.0 : static_cast<double>(ks[u]) + prior.alpha_conc[u];
  }
  const auto draw = rng.dirichlet(conc);
  return AlphaVector{draw[0], draw[1], draw[2], draw[3]};
}

DeltaVector sample_delta(const RandomEffects& effects, const PriorSpec& prior,
                         Rng& rng) {
  prior.validate();
  const double b[3] = {effects.b1, effects.b2, effects.b3};
  DeltaVector out;
  double* d[3] = {&out.d1, &out.d2, &out.d3};
  for (int l = 0; l < 3; ++l) {
    if (!std::isfinite(b[l])) throw std::invalid_argument("effect b is not finite");
    const double w = omega(b[l]);
    if (prior.regime == PriorSpec::Regime::jeffreys) {
      *d[l] = rng.exponential(w);
    } else {
      *d[l] = rng.gamma(prior.delta_shape[l] + 1.0,
                        1.0 / (w + 1.0 / prior.delta_scale[l]));
    }
  }
  return out;
}

namespace {

// Joint draw of (N, y000_u*) given the other latent components: the regime
// whose unnormalized 000-cell mass is `carrier_mass` absorbs the
// negative-binomial tail. The derivation holds for any regime with positive
// mass; the default carrier is the a4 regime.
std::int64_t draw_population(const TrsCounts& counts, double carrier_mass,
                             std::int64_t fixed_y000_sum, Rng& rng) {
  if (carrier_mass >= 1.0) {
    throw std::runtime_error("unobserved-cell regime mass >= 1");
  }
  const std::int64_t size = counts.observed_total() + fixed_y000_sum;
  std::int64_t tail = 0;
  if (carrier_mass > 0.0) {
    tail = rng.negative_binomial(static_cast<double>(size), 1.0 - carrier_mass);
  }
  return size + tail;
}

}  // namespace

std::int64_t sample_population_size(const LatentCounts& latent, const TrsCounts& counts,
                                    double alpha4, double p1, Rng& rng) {
  if (!(alpha4 >= 0.0 && alpha4 <= 1.0)) {
    throw std::invalid_argument("alpha4 must lie in [0,1]");
  }
  if (!(p1 > 0.0 && p1 < 1.0)) {
    throw std::invalid_argument("p1 must lie in (0,1)");
  }
  const double q = alpha4 * (1.0 - p1);
  const std::int64_t fixed = latent.y000[0] + latent.y000[1] + latent.y000[2] +
                             latent.y000[3];
  return draw_population(counts, q, fixed, rng);
}

std::pair<LatentCounts, RandomEffects> initialize_state(const TrsCounts& counts,
                                                        const PriorSpec& prior,
                                                        Rng& rng, bool dispersed) {
  counts.validate();
  prior.validate();
  LatentCounts y;
  y.y111[0] = counts.x111;
  y.y110_1 = counts.x110;
  y.y011_1 = counts.x011;
  y.y100_1 = counts.x100;
  y.y101_1 = counts.x101;
  y.y010_1 = counts.x010;
  y.y001_1 = counts.x001;
  RandomEffects b;
  if (dispersed) {
    // Overdispersed start for convergence checks: random effects and a random
    // reshuffle of the observed splits.
    b.b1 = rng.normal(0.0, 2.0);
    b.b2 = rng.normal(0.0, 2.0);
    b.b3 = rng.normal(0.0, 2.0);
    const AlphaVector alpha{0.2, 0.2, 0.2, 0.2};
    const std::int64_t n0 = counts.observed_total() +
                            rng.poisson(static_cast<double>(counts.observed_total()));
    y = sample_latent(counts, n0, alpha, b, rng);
  }
  return {y, b};
}

const std::vector<std::string>& Chain::scalar_names() {
  static const std::vector<std::string> names = {
      "N",  "alpha1", "alpha2", "alpha3", "alpha4", "delta1", "delta2",
      "delta3", "b1", "b2", "b3", "P1", "P2", "P3"};
  return names;
}

std::vector<double> Chain::scalar(std::string_view name) const {
  std::vector<double> out;
  out.reserve(draws_.size());
  for (const auto& d : draws_) {
    double v;
    if (name == "N") v = static_cast<double>(d.n);
    else if (name == "alpha1") v = d.alpha.a1;
    else if (name == "alpha2") v = d.alpha.a2;
    else if (name == "alpha3") v = d.alpha.a3;
    else if (name == "alpha4") v = d.alpha.a4;
    else if (name == "delta1") v = d.delta.d1;
    else if (name == "delta2") v = d.delta.d2;
    else if (name == "delta3") v = d.delta.d3;
    else if (name == "b1") v = d.effects.b1;
    else if (name == "b2") v = d.effects.b2;
    else if (name == "b3") v = d.effects.b3;
    else if (name == "P1") v = d.probs.p1;
    else if (name == "P2") v = d.probs.p2;
    else if (name == "P3") v = d.probs.p3;
    else throw std::invalid_argument("unknown chain scalar '" + std::string(name) + "'");
    out.push_back(v);
  }
  return out;
}

void Chain::write_csv(std::ostream& out) const {
  out << "N,alpha1,alpha2,alpha3,alpha4,delta1,delta2,delta3,P1,P2,P3\n";
  char buf[64];
  for (const auto& d : draws_) {
    out << d.n;
    const double vals[10] = {d.alpha.a1, d.alpha.a2, d.alpha.a3, d.alpha.a4,
                             d.delta.d1, d.delta.d2, d.delta.d3,
                             d.probs.p1, d.probs.p2, d.probs.p3};
    for (double v : vals) {
      std::snprintf(buf, sizeof(buf), ",%.17g", v);
      out << buf;
    }
    out << '\n';
  }
}

Chain run_gibbs(const TrsCounts& counts, const PriorSpec& prior,
                const GibbsConfig& config) {
  counts.validate();
  prior.validate();
  config.validate();

  Rng rng(config.seed);
  auto [latent, effects] = initialize_state(counts, prior, rng, config.dispersed_init);
  AlphaVector alpha{config.pin_alpha[0] ? 0.0 : 0.1, config.pin_alpha[1] ? 0.0 : 0.1,
                    config.pin_alpha[2] ? 0.0 : 0.1, config.pin_alpha[3] ? 0.0 : 0.1};
  DeltaVector delta{1.0, 1.0, 1.0};
  std::int64_t n = counts.observed_total() + latent.unobserved_total();

  Chain chain(counts.observed_total());
  chain.reserve(static_cast<std::size_t>(config.retained()));

  for (std::int64_t t = 0; t < config.iterations; ++t) {
    alpha = sample_alpha(latent, counts, n, prior, rng, config.pin_alpha);
    delta = sample_delta(effects, prior, rng);

    const CaptureProbs p = effects.capture_probs();
    if (config.pin_alpha[3]) {
      // With alpha4 pinned its unobserved-cell component is degenerate at
      // zero and N would freeze; the independent regime carries the tail
      // instead. The same joint (N, y000_u*) derivation applies to any regime
      // with positive 000-cell mass.
      const double mass = alpha.independent_mass() * (1.0 - p.p1) *
                          (1.0 - p.p2) * (1.0 - p.p3);
      const std::int64_t fixed =
          latent.y000[1] + latent.y000[2] + latent.y000[3] + latent.y000[4];
      latent.y000[0] = draw_population(counts, mass, fixed, rng) -
                       counts.observed_total() - fixed;
      n = counts.observed_total() + latent.unobserved_total();
    } else {
      n = sample_population_size(latent, counts, alpha.a4, p.p1, rng);
      latent.y000[4] = n - counts.observed_total() -
                       (latent.y000[0] + latent.y000[1] + latent.y000[2] +
                        latent.y000[3]);
    }

    latent = sample_latent(counts, n, alpha, effects, rng);
    effects = sample_effects(latent, counts, n, delta, rng);

    if (t >= config.burn_in && (t - config.burn_in + 1) % config.thin == 0) {
      chain.push_back({n, alpha, delta, effects, effects.capture_probs()});
    }
  }
  return chain;
}

}  // namespace trs
