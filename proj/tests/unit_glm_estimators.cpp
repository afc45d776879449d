#include "doctest.h"

#include <cmath>

#include "trs/counts.hpp"
#include "trs/estimators.hpp"
#include "trs/glm.hpp"
#include "trs/rng.hpp"

using namespace trs;

namespace {

constexpr int kI[7] = {1, 1, 1, 0, 1, 0, 0};
constexpr int kJ[7] = {1, 1, 0, 1, 0, 1, 0};
constexpr int kK[7] = {1, 0, 1, 1, 0, 0, 1};

std::vector<std::vector<double>> main_effects_design() {
  std::vector<std::vector<double>> design(7);
  for (int r = 0; r < 7; ++r) {
    design[r] = {1.0, double(kI[r]), double(kJ[r]), double(kK[r])};
  }
  return design;
}

}  // namespace

TEST_CASE("IRLS: intercept-only model fits the mean") {
  const std::vector<std::vector<double>> design(7, std::vector<double>{1.0});
  const GlmFit fit = poisson_irls(design, {1, 1, 1, 1, 1, 1, 1});
  CHECK(fit.converged);
  for (double m : fit.fitted_means) CHECK(m == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("IRLS: saturated design reproduces the observed cells") {
  std::vector<std::vector<double>> design(7, std::vector<double>(7, 0.0));
  for (int r = 0; r < 7; ++r) design[r][r] = 1.0;
  const std::array<double, 7> y = {155, 31, 131, 45, 56, 30, 332};
  const GlmFit fit = poisson_irls(design, y);
  CHECK(fit.converged);
  for (int r = 0; r < 7; ++r) {
    CHECK(fit.fitted_means[r] == doctest::Approx(y[r]).epsilon(1e-8));
  }
}

TEST_CASE("IRLS: main-effects fit matches the observed list margins") {
  const auto& ld = builtin_dataset("ld_all").counts;
  const auto cells = ld.cells();
  std::array<double, 7> y{};
  for (int r = 0; r < 7; ++r) y[r] = double(cells[r]);
  const GlmFit fit = poisson_irls(main_effects_design(), y);
  CHECK(fit.converged);
  double n1 = 0, n2 = 0, n3 = 0, total = 0;
  for (int r = 0; r < 7; ++r) {
    n1 += kI[r] * fit.fitted_means[r];
    n2 += kJ[r] * fit.fitted_means[r];
    n3 += kK[r] * fit.fitted_means[r];
    total += fit.fitted_means[r];
  }
  CHECK(std::fabs(n1 - 373.0) < 1e-6);
  CHECK(std::fabs(n2 - 261.0) < 1e-6);
  CHECK(std::fabs(n3 - 663.0) < 1e-6);
  CHECK(std::fabs(total - 780.0) < 1e-6);
}

TEST_CASE("IRLS rejects rank-deficient designs") {
  std::vector<std::vector<double>> design(7);
  for (int r = 0; r < 7; ++r) {
    design[r] = {1.0, double(kI[r]), 2.0 * kI[r]};  // collinear
  }
  CHECK_THROWS_AS(poisson_irls(design, {1, 1, 1, 1, 1, 1, 1}),
                  std::invalid_argument);
}

TEST_CASE("LLM closed form on the case-study tables") {
  const auto ld = llm_estimate(builtin_dataset("ld_all").counts);
  CHECK(ld.n_hat == doctest::Approx(1253.08).epsilon(1e-4));
  CHECK(ld.feasible);

  const auto hav = llm_estimate(builtin_dataset("hav").counts);
  CHECK(hav.n_hat == doctest::Approx(1312.76).epsilon(1e-3));

  const auto ones = llm_estimate(TrsCounts{1, 1, 1, 1, 1, 1, 1});
  CHECK(ones.n_hat == doctest::Approx(8.0).epsilon(1e-12));
}

TEST_CASE("LLM flags a zero denominator cell as infeasible") {
  const auto r = llm_estimate(TrsCounts{5, 0, 3, 2, 4, 1, 6});
  CHECK_FALSE(r.feasible);
  CHECK(std::isnan(r.n_hat));
}

TEST_CASE("independent estimate on the case-study tables") {
  const auto ld = independent_estimate(builtin_dataset("ld_all").counts);
  CHECK(std::round(ld.n_hat) == 855.0);
  CHECK(ld.n_hat == doctest::Approx(855.39).epsilon(2e-3));

  const auto hav = independent_estimate(builtin_dataset("hav").counts);
  CHECK(std::round(hav.n_hat) == 388.0);
}

TEST_CASE("independent estimate is exact for exactly independent counts") {
  // p = 0.5 per list and N = 800 makes every expected cell equal to 100.
  const auto r = independent_estimate(TrsCounts{100, 100, 100, 100, 100, 100, 100});
  CHECK(r.n_hat == doctest::Approx(800.0).epsilon(1e-9));
  CHECK(r.extra("m000") == doctest::Approx(100.0).epsilon(1e-9));
}

TEST_CASE("QSM on the case-study tables") {
  const auto ld = qsm_estimate(builtin_dataset("ld_all").counts);
  CHECK(ld.n_hat == doctest::Approx(1803.09).epsilon(0.01));
  const auto hav = qsm_estimate(builtin_dataset("hav").counts);
  CHECK(hav.n_hat == doctest::Approx(1313.47).epsilon(0.01));
}

TEST_CASE("QSM fits quasi-symmetric tables exactly") {
  // x011*x100 = x101*x010 = x110*x001 = 6.
  const TrsCounts c{4, 6, 3, 2, 3, 2, 1};
  const auto r = qsm_estimate(c);
  const auto cells = c.cells();
  // The fitted table reproducing the observed one forces the extrapolation
  // x000 = x111*x100*x010*x001 / (x110*x101*x011).
  const double x000 = 4.0 * 3 * 2 * 1 / (6.0 * 3 * 2);
  CHECK(r.n_hat == doctest::Approx(double(c.observed_total()) + x000).epsilon(1e-6));
  (void)cells;
}

TEST_CASE("PQSM on the case-study tables") {
  const auto ld = pqsm_estimate(builtin_dataset("ld_all").counts);
  CHECK(ld.n_hat == doctest::Approx(1176.35).epsilon(0.01));
  const auto hav = pqsm_estimate(builtin_dataset("hav").counts);
  CHECK(hav.n_hat == doctest::Approx(1325.35).epsilon(0.01));
}

TEST_CASE("PQSM fits pairwise-constrained tables that QSM cannot") {
  // x011*x100 = x101*x010 = 6 but x110*x001 = 1 != 6.
  const TrsCounts c{5, 1, 3, 2, 3, 2, 1};
  const auto pq = pqsm_estimate(c);
  const auto cells = c.cells();

  // PQSM (6 parameters, constraint satisfied) reproduces the table.
  const double expected_x000 = 5.0 * 3 * 2 * 1 / (1.0 * 3 * 2);
  CHECK(pq.n_hat ==
        doctest::Approx(double(c.observed_total()) + expected_x000).epsilon(1e-6));

  // QSM must distort at least one cell to satisfy its extra constraint.
  const auto q = qsm_estimate(c);
  CHECK(std::fabs(q.extra("x000") - expected_x000) > 0.05);
  (void)cells;
}

TEST_CASE("sample coverage on the case-study tables") {
  const auto ld = sc_estimate(builtin_dataset("ld_all").counts);
  CHECK(std::round(ld.n_hat) == 992.0);
  CHECK(ld.extra("coverage") == doctest::Approx(0.744723).epsilon(1e-5));
  CHECK(ld.feasible);

  const auto hav = sc_estimate(builtin_dataset("hav").counts);
  CHECK(std::round(hav.n_hat) == 971.0);
  CHECK(hav.extra("coverage") == doctest::Approx(0.512690).epsilon(1e-5));
}

TEST_CASE("sample coverage with no singletons is complete") {
  const auto r = sc_estimate(TrsCounts{30, 0, 0, 0, 0, 0, 0});
  CHECK(r.extra("coverage") == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.n_hat == doctest::Approx(30.0).epsilon(1e-9));
  CHECK(r.feasible);
}

TEST_CASE("sample coverage feasibility flag is n_hat >= x0") {
  Rng rng(77);
  int infeasible_seen = 0;
  for (int rep = 0; rep < 400; ++rep) {
    TrsCounts c;
    c.x111 = rng.binomial(60, 0.5);
    c.x110 = rng.binomial(10, 0.3);
    c.x101 = rng.binomial(10, 0.3);
    c.x011 = rng.binomial(10, 0.3);
    c.x100 = rng.binomial(80, 0.5);
    c.x010 = rng.binomial(80, 0.5);
    c.x001 = rng.binomial(80, 0.5);
    if (c.list1_total() == 0 || c.list2_total() == 0 || c.list3_total() == 0) continue;
    const auto r = sc_estimate(c);
    if (!std::isfinite(r.n_hat)) continue;
    CHECK(r.feasible == (r.n_hat >= double(c.observed_total())));
    infeasible_seen += !r.feasible;
  }
  CHECK(infeasible_seen > 0);  // the sparse-overlap regime must trigger some
}

TEST_CASE("sc and llm are pure closed forms without iteration counters") {
  const auto& ld = builtin_dataset("ld_all").counts;
  const auto sc1 = sc_estimate(ld), sc2 = sc_estimate(ld);
  CHECK(sc1.n_hat == sc2.n_hat);
  CHECK_FALSE(sc1.has_extra("iterations"));
  const auto llm1 = llm_estimate(ld);
  CHECK_FALSE(llm1.has_extra("iterations"));
}

TEST_CASE("Mtb flags the boundary ridge on the LD table") {
  // For this dataset the likelihood increases in N along a phi-ridge; the
  // profile maximizer sits at the grid ceiling and must be flagged.
  const auto r = mtb_estimate(builtin_dataset("ld_all").counts);
  CHECK(r.extra("boundary") == 1.0);
  CHECK_FALSE(r.feasible);
}

TEST_CASE("Mtb recovers N on synthetic behavioral data") {
  // N = 5000, f = (0.35, 0.30, 0.25), recapture probability = phi * f with
  // phi = 1 (no behavioral response).
  Rng rng(9091);
  const std::int64_t n = 5000;
  std::array<std::int64_t, 8> cells{};
  for (std::int64_t h = 0; h < n; ++h) {
    const int z1 = rng.bernoulli(0.35);
    const int z2 = rng.bernoulli(0.30);
    const int z3 = rng.bernoulli(0.25);
    ++cells[std::size_t(z1 * 4 + z2 * 2 + z3)];
  }
  const TrsCounts c{cells[7], cells[6], cells[5], cells[3],
                    cells[4], cells[2], cells[1]};
  const auto r = mtb_estimate(c);
  CHECK(r.feasible);
  CHECK(std::fabs(r.n_hat - 5000.0) < 350.0);
  CHECK(r.extra("phi") == doctest::Approx(1.0).epsilon(0.15));
}

TEST_CASE("Mtb requires recaptures") {
  CHECK_THROWS_AS(mtb_estimate(TrsCounts{0, 0, 0, 0, 5, 5, 5}), std::runtime_error);
}

TEST_CASE("bootstrap of a constant estimator degenerates to a point") {
  const auto& counts = builtin_dataset("hav").counts;
  const auto ci = bootstrap_ci(
      [](const TrsCounts&) {
        EstimateResult r;
        r.method = "const";
        r.n_hat = 321.0;
        return r;
      },
      321.0, counts, 200, 0.95, 1);
  CHECK(ci.ci_low == 321.0);
  CHECK(ci.ci_high == 321.0);
  CHECK(ci.mae == 0.0);
  CHECK(ci.failures == 0);
}

TEST_CASE("bootstrap intervals are monotone in level") {
  const auto& counts = builtin_dataset("ld_all").counts;
  const auto narrow = bootstrap_ci("sc", counts, 500, 0.95, 99);
  const auto wide = bootstrap_ci("sc", counts, 500, 0.99, 99);
  CHECK(wide.ci_low <= narrow.ci_low);
  CHECK(wide.ci_high >= narrow.ci_high);
}

TEST_CASE("bootstrap of the independent fit brackets the published interval") {
  const auto ci = bootstrap_ci("independent", builtin_dataset("ld_all").counts,
                               2000, 0.95, 4242);
  CHECK(ci.ci_low > 815.0);
  CHECK(ci.ci_low < 860.0);
  CHECK(ci.ci_high > 855.0);
  CHECK(ci.ci_high < 900.0);
  CHECK(ci.failures == 0);
}

TEST_CASE("bootstrap validates its inputs") {
  const auto& counts = builtin_dataset("hav").counts;
  CHECK_THROWS_AS(bootstrap_ci("sc", counts, 50, 0.95, 1), std::invalid_argument);
  CHECK_THROWS_AS(bootstrap_ci("nope", counts, 200, 0.95, 1), std::invalid_argument);
}

TEST_CASE("estimator registry") {
  CHECK(estimator_names().size() == 6);
  CHECK(run_estimator("sc", builtin_dataset("hav").counts).method == "sc");
  CHECK_THROWS_AS(run_estimator("thbm2", builtin_dataset("hav").counts),
                  std::invalid_argument);
}
