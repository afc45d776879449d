#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "trs/counts.hpp"

namespace trs {

struct EstimateResult {
  std::string method;
  double n_hat = 0.0;
  bool feasible = true;  // n_hat >= x0 and the fit is usable
  std::optional<double> ci_low;
  std::optional<double> ci_high;
  std::optional<double> mae;
  std::vector<std::pair<std::string, double>> extras;

  double extra(std::string_view key) const;
  bool has_extra(std::string_view key) const;
};

// The six competitor estimators. Closed forms are pure; iterative fits throw
// std::runtime_error on non-convergence.
EstimateResult llm_estimate(const TrsCounts& counts);
EstimateResult independent_estimate(const TrsCounts& counts);
EstimateResult qsm_estimate(const TrsCounts& counts);
EstimateResult pqsm_estimate(const TrsCounts& counts);
EstimateResult mtb_estimate(const TrsCounts& counts);
EstimateResult sc_estimate(const TrsCounts& counts);

const std::vector<std::string>& estimator_names();
EstimateResult run_estimator(std::string_view method, const TrsCounts& counts);

struct BootstrapCi {
  double ci_low = 0.0;
  double ci_high = 0.0;
  double mae = 0.0;
  int failures = 0;
  int kept = 0;
};

// Conditional nonparametric bootstrap: resamples x0 individuals from the
// multinomial over the seven observed cells, re-runs the estimator and takes
// the level-quantile interval. Replicates run in parallel on seeded streams;
// failed replicates are dropped and counted. Throws when more than half fail.
BootstrapCi bootstrap_ci(std::string_view method, const TrsCounts& counts,
                         int replicates, double level, std::uint64_t seed);

BootstrapCi bootstrap_ci(const std::function<EstimateResult(const TrsCounts&)>& estimator,
                         double point_estimate, const TrsCounts& counts,
                         int replicates, double level, std::uint64_t seed);

}  // namespace trs
