#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "trs/counts.hpp"
#include "trs/gibbs.hpp"
#include "trs/model.hpp"
#include "trs/rng.hpp"

#include "json.hpp"

namespace trs {

// Distribution of one list's random effect b on the logit scale.
struct EffectFamily {
  enum class Kind { generalized_logistic, normal, gamma, degenerate };
  Kind kind = Kind::generalized_logistic;
  double p1 = 1.0;  // shape / mean / shape / value
  double p2 = 0.0;  // unused / sd / scale / unused

  double draw(Rng& rng) const;
};

struct EffectSpec {
  enum class Granularity { per_individual, per_dataset };
  std::array<EffectFamily, 3> family;
  Granularity granularity = Granularity::per_individual;
};

// First-list capture probability law for the autoregressive misspecification
// generator.
enum class ArP1Family { uniform, beta42, beta22 };

// Capture-probability recursion of the AR-style generator. A hit on the
// previous occasion raises the next probability to 0.99; a miss carries the
// previous probability forward.
double ar_next_prob(double prev_prob, bool prev_captured);

struct Scenario {
  std::string name;
  std::int64_t true_n = 500;
  AlphaVector alpha;
  std::optional<EffectSpec> effects;  // empty => AR misspecification generator
  std::optional<ArP1Family> ar_family;
  int replications = 100;
  std::vector<std::string> estimators = {"thbm", "sc", "llm", "independent", "mtb"};
  GibbsConfig gibbs{50000, 25000, 10, 0, {}};
  PriorSpec prior = PriorSpec::jeffreys();
  int bootstrap_replicates = 200;
  double ci_level = 0.95;

  void validate() const;
  nlohmann::ordered_json to_json() const;
  static Scenario from_json(const nlohmann::json& j);
};

struct EstimatorReport {
  std::string method;
  int attempted = 0;
  int failures = 0;    // exceptions / non-finite estimates
  int infeasible = 0;  // finite but flagged estimates, excluded like failures
  double mean_estimate = 0.0;
  double rmae = 0.0;
  double coverage_percent = 0.0;
  double mean_ci_low = 0.0;
  double mean_ci_high = 0.0;
  std::vector<double> estimates;  // retained replicate estimates
};

struct SimReport {
  std::string scenario_name;
  std::int64_t true_n = 0;
  int replications = 0;
  std::string granularity;  // generator metadata
  int bootstrap_replicates = 0;
  std::uint64_t seed = 0;
  std::vector<EstimatorReport> estimators;

  nlohmann::ordered_json to_json() const;
  std::string to_csv() const;
};

// Draws one TRS dataset from the dependence-mixture model: per-individual (or
// per-dataset) effects, latent Bernoulli captures, regime selection and the
// copy rule; individuals invisible on all lists vanish into the unobserved
// cell.
TrsCounts gen_thbm(std::int64_t true_n, const AlphaVector& alpha,
                   const EffectSpec& effects, Rng& rng);

TrsCounts gen_ar_misspec(std::int64_t true_n, ArP1Family family, Rng& rng);

SimReport run_replications(const Scenario& scenario, std::uint64_t seed);

// The named experiment catalog: populations P1-P6 crossed with the five-delta
// grid and N in {200, 500} under both prior regimes, the R1-R6 effect
// misspecification grid, and the three AR variants.
const std::vector<Scenario>& standard_scenarios();
Scenario scenario_by_name(std::string_view name);

}  // namespace trs
