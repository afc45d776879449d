#include "trs/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <mutex>
#include <sstream>
#include <stdexcept>

#include "trs/estimators.hpp"
#include "trs/parallel.hpp"
#include "trs/posterior.hpp"

namespace trs {

double EffectFamily::draw(Rng& rng) const {
  switch (kind) {
    case Kind::generalized_logistic:
      return generalized_logistic_draw(p1, rng);
    case Kind::normal:
      return rng.normal(p1, p2);
    case Kind::gamma:
      return rng.gamma(p1, p2);
    case Kind::degenerate:
      return p1;
  }
  throw std::logic_error("unknown effect family");
}

double ar_next_prob(double prev_prob, bool prev_captured) {
  return std::min(prev_captured ? 1.2 : prev_prob, 0.99);
}

void Scenario::validate() const {
  if (true_n < 1) throw std::invalid_argument("scenario true_n must be >= 1");
  if (replications < 1) throw std::invalid_argument("replications must be >= 1");
  if (estimators.empty()) throw std::invalid_argument("no estimators requested");
  if (!effects.has_value() && !ar_family.has_value()) {
    throw std::invalid_argument("scenario needs an effect spec or an AR family");
  }
  alpha.validate();
  gibbs.validate();
  prior.validate();
  for (const auto& m : estimators) {
    if (m != "thbm" &&
        std::find(estimator_names().begin(), estimator_names().end(), m) ==
            estimator_names().end()) {
      throw std::invalid_argument("unknown estimator '" + m + "' in scenario");
    }
  }
}

TrsCounts gen_thbm(std::int64_t true_n, const AlphaVector& alpha,
                   const EffectSpec& effects, Rng& rng) {
  alpha.validate();
  if (true_n < 1) throw std::invalid_argument("true_n must be >= 1");
  const double a0 = alpha.sum();

  std::array<double, 3> p{};
  const bool shared = effects.granularity == EffectSpec::Granularity::per_dataset;
  if (shared) {
    for (int l = 0; l < 3; ++l) {
      p[l] = clamp_prob(1.0 / (1.0 + std::exp(-effects.family[l].draw(rng))));
    }
  }

  std::array<std::int64_t, 8> cells{};
  for (std::int64_t h = 0; h < true_n; ++h) {
    if (!shared) {
      for (int l = 0; l < 3; ++l) {
        p[l] = clamp_prob(1.0 / (1.0 + std::exp(-effects.family[l].draw(rng))));
      }
    }
    int x1 = rng.bernoulli(p[0]) ? 1 : 0;
    int x2 = rng.bernoulli(p[1]) ? 1 : 0;
    int x3 = rng.bernoulli(p[2]) ? 1 : 0;

    const double u = rng.uniform();
    int z1 = x1, z2 = x2, z3 = x3;
    double edge = 1.0 - a0;
    if (u < edge) {
      // independent
    } else if (u < (edge += alpha.a1)) {
      z2 = z1;
    } else if (u < (edge += alpha.a2)) {
      z3 = z2;
    } else if (u < (edge += alpha.a3)) {
      z3 = z1;
    } else {
      z2 = z1;
      z3 = z1;
    }
    ++cells[static_cast<std::size_t>(z1 * 4 + z2 * 2 + z3)];
  }
  return TrsCounts{cells[7], cells[6], cells[5], cells[3],
                   cells[4], cells[2], cells[1]};
}

TrsCounts gen_ar_misspec(std::int64_t true_n, ArP1Family family, Rng& rng) {
  if (true_n < 1) throw std::invalid_argument("true_n must be >= 1");
  std::array<std::int64_t, 8> cells{};
  for (std::int64_t h = 0; h < true_n; ++h) {
    double p;
    switch (family) {
      case ArP1Family::uniform: p = rng.uniform(); break;
      case ArP1Family::beta42: p = rng.beta(4.0, 2.0); break;
      case ArP1Family::beta22: p = rng.beta(2.0, 2.0); break;
      default: throw std::logic_error("unknown AR family");
    }
    int z[3];
    z[0] = rng.bernoulli(p) ? 1 : 0;
    for (int j = 1; j < 3; ++j) {
      p = ar_next_prob(p, z[j - 1] == 1);
      z[j] = rng.bernoulli(p) ? 1 : 0;
    }
    ++cells[static_cast<std::size_t>(z[0] * 4 + z[1] * 2 + z[2])];
  }
  return TrsCounts{cells[7], cells[6], cells[5], cells[3],
                   cells[4], cells[2], cells[1]};
}

namespace {

struct ReplicateOutcome {
  double estimate = std::numeric_limits<double>::quiet_NaN();
  double ci_low = 0.0;
  double ci_high = 0.0;
  bool failed = true;
  bool infeasible = false;
};

}  // namespace

SimReport run_replications(const Scenario& scenario, std::uint64_t seed) {
  scenario.validate();
  const int reps = scenario.replications;
  const std::size_t n_methods = scenario.estimators.size();

  std::vector<std::vector<ReplicateOutcome>> outcomes(
      n_methods, std::vector<ReplicateOutcome>(static_cast<std::size_t>(reps)));

  parallel_for(static_cast<std::size_t>(reps), [&](std::size_t rep) {
    Rng data_rng(seed, rep);
    TrsCounts counts;
    if (scenario.effects.has_value()) {
      counts = gen_thbm(scenario.true_n, scenario.alpha, *scenario.effects, data_rng);
    } else {
      counts = gen_ar_misspec(scenario.true_n, *scenario.ar_family, data_rng);
    }
    if (counts.observed_total() < 1) return;  // empty table: every method fails

    for (std::size_t mi = 0; mi < n_methods; ++mi) {
      const std::string& method = scenario.estimators[mi];
      ReplicateOutcome& out = outcomes[mi][rep];
      const std::uint64_t method_seed =
          mix64(seed ^ mix64(0x1000 + mi)) + 7919u * (rep + 1);
      try {
        if (method == "thbm") {
          GibbsConfig cfg = scenario.gibbs;
          cfg.seed = method_seed;
          const Chain chain = run_gibbs(counts, scenario.prior, cfg);
          const auto draws = chain.scalar("N");
          const auto [lo, hi] = hpd_interval(draws, scenario.ci_level);
          out.estimate = median_of(draws);
          out.ci_low = lo;
          out.ci_high = hi;
          out.failed = false;
        } else {
          const EstimateResult est = run_estimator(method, counts);
          if (!std::isfinite(est.n_hat)) {
            out.failed = true;
            return;
          }
          // Bootstrap runs inline: the replicate loop already owns the
          // worker thread, so nesting another pool would oversubscribe.
          const auto ci = bootstrap_ci(
              [&method](const TrsCounts& c) { return run_estimator(method, c); },
              est.n_hat, counts, scenario.bootstrap_replicates, scenario.ci_level,
              method_seed);
          out.estimate = est.n_hat;
          out.ci_low = ci.ci_low;
          out.ci_high = ci.ci_high;
          out.failed = false;
          out.infeasible = !est.feasible;
        }
      } catch (const std::exception&) {
        out.failed = true;
      }
    }
  });

  SimReport report;
  report.scenario_name = scenario.name;
  report.true_n = scenario.true_n;
  report.replications = reps;
  report.seed = seed;
  report.bootstrap_replicates = scenario.bootstrap_replicates;
  report.granularity =
      !scenario.effects.has_value() ? "ar"
      : scenario.effects->granularity == EffectSpec::Granularity::per_individual
          ? "per_individual"
          : "per_dataset";

  for (std::size_t mi = 0; mi < n_methods; ++mi) {
    EstimatorReport er;
    er.method = scenario.estimators[mi];
    er.attempted = reps;
    std::vector<std::pair<double, double>> intervals;
    double ci_lo_acc = 0.0, ci_hi_acc = 0.0, est_acc = 0.0;
    for (const ReplicateOutcome& out : outcomes[mi]) {
      if (out.failed) {
        ++er.failures;
        continue;
      }
      if (out.infeasible) {
        ++er.infeasible;
        continue;
      }
      er.estimates.push_back(out.estimate);
      intervals.emplace_back(out.ci_low, out.ci_high);
      est_acc += out.estimate;
      ci_lo_acc += out.ci_low;
      ci_hi_acc += out.ci_high;
    }
    const double kept = static_cast<double>(er.estimates.size());
    if (kept > 0) {
      er.mean_estimate = est_acc / kept;
      er.rmae = rmae(er.estimates, static_cast<double>(scenario.true_n));
      er.coverage_percent =
          coverage_rate(intervals, static_cast<double>(scenario.true_n));
      er.mean_ci_low = ci_lo_acc / kept;
      er.mean_ci_high = ci_hi_acc / kept;
    }
    report.estimators.push_back(std::move(er));
  }
  return report;
}

nlohmann::ordered_json SimReport::to_json() const {
  nlohmann::ordered_json j;
  j["scenario"] = scenario_name;
  j["true_n"] = true_n;
  j["replications"] = replications;
  j["granularity"] = granularity;
  j["bootstrap_replicates"] = bootstrap_replicates;
  j["seed"] = seed;
  j["estimators"] = nlohmann::ordered_json::array();
  for (const auto& er : estimators) {
    nlohmann::ordered_json e;
    e["method"] = er.method;
    e["attempted"] = er.attempted;
    e["failures"] = er.failures;
    e["infeasible"] = er.infeasible;
    e["mean_estimate"] = er.mean_estimate;
    e["rmae"] = er.rmae;
    e["coverage_percent"] = er.coverage_percent;
    e["mean_ci_low"] = er.mean_ci_low;
    e["mean_ci_high"] = er.mean_ci_high;
    j["estimators"].push_back(std::move(e));
  }
  return j;
}

std::string SimReport::to_csv() const {
  std::ostringstream out;
  out << "method,mean_estimate,rmae,mean_ci_low,mean_ci_high,coverage_percent,"
         "attempted,failures,infeasible\n";
  char buf[256];
  for (const auto& er : estimators) {
    std::snprintf(buf, sizeof(buf), "%s,%.6g,%.4f,%.6g,%.6g,%.1f,%d,%d,%d\n",
                  er.method.c_str(), er.mean_estimate, er.rmae, er.mean_ci_low,
                  er.mean_ci_high, er.coverage_percent, er.attempted, er.failures,
                  er.infeasible);
    out << buf;
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Scenario serialization
// ---------------------------------------------------------------------------

namespace {

const char* family_name(EffectFamily::Kind k) {
  switch (k) {
    case EffectFamily::Kind::generalized_logistic: return "generalized_logistic";
    case EffectFamily::Kind::normal: return "normal";
    case EffectFamily::Kind::gamma: return "gamma";
    case EffectFamily::Kind::degenerate: return "degenerate";
  }
  return "?";
}

EffectFamily::Kind family_from_name(const std::string& s) {
  if (s == "generalized_logistic") return EffectFamily::Kind::generalized_logistic;
  if (s == "normal") return EffectFamily::Kind::normal;
  if (s == "gamma") return EffectFamily::Kind::gamma;
  if (s == "degenerate") return EffectFamily::Kind::degenerate;
  throw std::invalid_argument("unknown effect family '" + s + "'");
}

const char* ar_name(ArP1Family f) {
  switch (f) {
    case ArP1Family::uniform: return "uniform";
    case ArP1Family::beta42: return "beta42";
    case ArP1Family::beta22: return "beta22";
  }
  return "?";
}

ArP1Family ar_from_name(const std::string& s) {
  if (s == "uniform") return ArP1Family::uniform;
  if (s == "beta42") return ArP1Family::beta42;
  if (s == "beta22") return ArP1Family::beta22;
  throw std::invalid_argument("unknown AR family '" + s + "'");
}

}  // namespace

nlohmann::ordered_json Scenario::to_json() const {
  nlohmann::ordered_json j;
  j["name"] = name;
  j["true_n"] = true_n;
  j["alpha"] = {alpha.a1, alpha.a2, alpha.a3, alpha.a4};
  if (effects.has_value()) {
    nlohmann::ordered_json fams = nlohmann::ordered_json::array();
    for (const auto& f : effects->family) {
      fams.push_back({{"family", family_name(f.kind)}, {"p1", f.p1}, {"p2", f.p2}});
    }
    j["effects"] = {{"granularity",
                     effects->granularity == EffectSpec::Granularity::per_individual
                         ? "per_individual"
                         : "per_dataset"},
                    {"lists", fams}};
  }
  if (ar_family.has_value()) j["ar_family"] = ar_name(*ar_family);
  j["replications"] = replications;
  j["estimators"] = estimators;
  j["gibbs"] = {{"iterations", gibbs.iterations},
                {"burn_in", gibbs.burn_in},
                {"thin", gibbs.thin},
                {"pin_alpha", gibbs.pin_alpha}};
  j["prior"] = {{"regime", prior.regime == PriorSpec::Regime::jeffreys
                               ? "jeffreys"
                               : "informative"},
                {"alpha_conc", prior.alpha_conc},
                {"delta_shape", prior.delta_shape},
                {"delta_scale", prior.delta_scale}};
  j["bootstrap_replicates"] = bootstrap_replicates;
  j["ci_level"] = ci_level;
  return j;
}

Scenario Scenario::from_json(const nlohmann::json& j) {
  Scenario s;
  s.name = j.value("name", "scenario");
  s.true_n = j.at("true_n").get<std::int64_t>();
  if (j.contains("alpha")) {
    const auto a = j.at("alpha");
    s.alpha = AlphaVector{a.at(0), a.at(1), a.at(2), a.at(3)};
  }
  if (j.contains("effects")) {
    EffectSpec spec;
    const auto& je = j.at("effects");
    spec.granularity = je.value("granularity", "per_individual") == "per_dataset"
                           ? EffectSpec::Granularity::per_dataset
                           : EffectSpec::Granularity::per_individual;
    const auto& lists = je.at("lists");
    for (int l = 0; l < 3; ++l) {
      spec.family[l].kind = family_from_name(lists.at(l).at("family"));
      spec.family[l].p1 = lists.at(l).at("p1");
      spec.family[l].p2 = lists.at(l).value("p2", 0.0);
    }
    s.effects = spec;
  }
  if (j.contains("ar_family")) s.ar_family = ar_from_name(j.at("ar_family"));
  s.replications = j.value("replications", 100);
  if (j.contains("estimators")) {
    s.estimators = j.at("estimators").get<std::vector<std::string>>();
  }
  if (j.contains("gibbs")) {
    const auto& jg = j.at("gibbs");
    s.gibbs.iterations = jg.value("iterations", s.gibbs.iterations);
    s.gibbs.burn_in = jg.value("burn_in", s.gibbs.burn_in);
    s.gibbs.thin = jg.value("thin", s.gibbs.thin);
    if (jg.contains("pin_alpha")) {
      const auto& pins = jg.at("pin_alpha");
      for (int i = 0; i < 4; ++i) s.gibbs.pin_alpha[i] = pins.at(i).get<bool>();
    }
  }
  if (j.contains("prior")) {
    const auto& jp = j.at("prior");
    if (jp.value("regime", "jeffreys") == "informative") {
      std::array<double, 5> conc{};
      std::array<double, 3> shape{}, scale{};
      for (int i = 0; i < 5; ++i) conc[i] = jp.at("alpha_conc").at(i);
      for (int i = 0; i < 3; ++i) {
        shape[i] = jp.at("delta_shape").at(i);
        scale[i] = jp.at("delta_scale").at(i);
      }
      s.prior = PriorSpec::informative(conc, shape, scale);
    }
  }
  s.bootstrap_replicates = j.value("bootstrap_replicates", 200);
  s.ci_level = j.value("ci_level", 0.95);
  s.validate();
  return s;
}

// ---------------------------------------------------------------------------
// Standard scenario catalog
// ---------------------------------------------------------------------------

namespace {

struct Population {
  const char* name;
  AlphaVector alpha;
};

constexpr std::array<Population, 6> kPopulations = {{
    {"P1", {0.35, 0.15, 0.25, 0.10}},
    {"P2", {0.30, 0.30, 0.15, 0.10}},
    {"P3", {0.20, 0.10, 0.20, 0.10}},
    {"P4", {0.10, 0.20, 0.30, 0.20}},
    {"P5", {0.20, 0.20, 0.20, 0.20}},
    {"P6", {0.25, 0.15, 0.35, 0.10}},
}};

constexpr std::array<std::array<double, 3>, 5> kDeltaGrid = {{
    {1.6, 1.2, 0.8},
    {1.3, 1.7, 0.9},
    {1.0, 1.4, 1.8},
    {0.8, 0.8, 0.8},
    {1.6, 1.6, 1.6},
}};

EffectSpec gl_effects(const std::array<double, 3>& delta) {
  EffectSpec spec;
  for (int l = 0; l < 3; ++l) {
    spec.family[l] = {EffectFamily::Kind::generalized_logistic, delta[l], 0.0};
  }
  return spec;
}

EffectSpec misspec_effects(int r) {
  using K = EffectFamily::Kind;
  EffectSpec spec;
  switch (r) {
    case 1: spec = gl_effects({1.6, 1.6, 1.6}); break;
    case 2: spec = gl_effects({1.6, 1.2, 0.8}); break;
    case 3:
      spec.family = {{{K::normal, 0.5, 1.0}, {K::normal, 0.5, 1.0}, {K::normal, 0.5, 1.0}}};
      break;
    case 4:
      spec.family = {{{K::normal, 0.5, 1.0}, {K::normal, 0.0, 1.0}, {K::normal, -0.5, 1.0}}};
      break;
    case 5:
      spec.family = {{{K::gamma, 2.0, 0.5}, {K::gamma, 2.0, 0.5}, {K::gamma, 2.0, 0.5}}};
      break;
    case 6:
      spec.family = {{{K::gamma, 2.0, 0.5}, {K::gamma, 1.0, 0.5}, {K::gamma, 0.5, 0.5}}};
      break;
    default:
      throw std::logic_error("misspecification row out of range");
  }
  return spec;
}

// Informative-prior rule: Dirichlet concentration 8 * (alpha, 1 - alpha0) and
// a gamma prior on delta_l with mean delta_l and variance 100.
PriorSpec informative_for(const AlphaVector& alpha, const std::array<double, 3>& delta) {
  std::array<double, 5> conc{8.0 * alpha.a1, 8.0 * alpha.a2, 8.0 * alpha.a3,
                             8.0 * alpha.a4, 8.0 * alpha.independent_mass()};
  std::array<double, 3> shape{}, scale{};
  for (int l = 0; l < 3; ++l) {
    shape[l] = delta[l] * delta[l] / 100.0;
    scale[l] = 100.0 / delta[l];
  }
  return PriorSpec::informative(conc, shape, scale);
}

std::vector<Scenario> build_catalog() {
  std::vector<Scenario> all;
  for (const auto& pop : kPopulations) {
    for (std::size_t dg = 0; dg < kDeltaGrid.size(); ++dg) {
      for (std::int64_t n : {200, 500}) {
        for (bool informative : {false, true}) {
          Scenario s;
          s.name = std::string(pop.name) + ":delta" + std::to_string(dg + 1) +
                   ":N" + std::to_string(n) + (informative ? ":II" : "");
          s.true_n = n;
          s.alpha = pop.alpha;
          s.effects = gl_effects(kDeltaGrid[dg]);
          if (informative) s.prior = informative_for(pop.alpha, kDeltaGrid[dg]);
          all.push_back(std::move(s));
        }
      }
    }
    for (int r = 1; r <= 6; ++r) {
      for (std::int64_t n : {200, 500}) {
        Scenario s;
        s.name = std::string(pop.name) + ":R" + std::to_string(r) + ":N" +
                 std::to_string(n);
        s.true_n = n;
        s.alpha = pop.alpha;
        s.effects = misspec_effects(r);
        all.push_back(std::move(s));
      }
    }
  }
  for (ArP1Family f : {ArP1Family::uniform, ArP1Family::beta42, ArP1Family::beta22}) {
    Scenario s;
    s.name = std::string("AR:") + ar_name(f);
    s.true_n = 500;
    s.ar_family = f;
    all.push_back(std::move(s));
  }
  return all;
}

}  // namespace

const std::vector<Scenario>& standard_scenarios() {
  static const std::vector<Scenario> catalog = build_catalog();
  return catalog;
}

Scenario scenario_by_name(std::string_view name) {
  for (const auto& s : standard_scenarios()) {
    if (s.name == name) return s;
  }
  throw std::invalid_argument("unknown scenario preset '" + std::string(name) +
                              "' (try e.g. P3:delta5:N500, P1:R4:N200, AR:uniform)");
}

}  // namespace trs
