#include "doctest.h"

#include <cmath>

#include "trs/counts.hpp"
#include "trs/model.hpp"
#include "trs/rng.hpp"
#include "trs/simulation.hpp"

using namespace trs;

namespace {

// Random valid parameter point with alpha on the interior of the simplex.
std::pair<AlphaVector, CaptureProbs> random_point(Rng& rng) {
  const std::array<double, 5> conc = {1.0, 1.0, 1.0, 1.0, 1.0};
  const auto a = rng.dirichlet(conc);
  AlphaVector alpha{a[0], a[1], a[2], a[3]};
  CaptureProbs p{rng.uniform(0.05, 0.95), rng.uniform(0.05, 0.95),
                 rng.uniform(0.05, 0.95)};
  return {alpha, p};
}

}  // namespace

TEST_CASE("cell probabilities: symmetric independent case") {
  const CellProbs c = cell_probabilities({0, 0, 0, 0}, {0.5, 0.5, 0.5});
  for (double v : c.observed()) CHECK(v == doctest::Approx(0.125).epsilon(1e-14));
  CHECK(c.p000 == doctest::Approx(0.125).epsilon(1e-14));
}

TEST_CASE("cell probabilities: full three-list dependence collapses to one coin") {
  const CellProbs c = cell_probabilities({0, 0, 0, 1}, {0.6, 0.3, 0.8});
  CHECK(c.p111 == doctest::Approx(0.6).epsilon(1e-14));
  CHECK(c.p000 == doctest::Approx(0.4).epsilon(1e-14));
  CHECK(c.p110 == 0.0);
  CHECK(c.p101 == 0.0);
  CHECK(c.p011 == 0.0);
  CHECK(c.p100 == 0.0);
  CHECK(c.p010 == 0.0);
  CHECK(c.p001 == 0.0);
}

TEST_CASE("cell probabilities: mixed dependence point") {
  const CellProbs c = cell_probabilities({0.2, 0.2, 0.2, 0.2}, {0.5, 0.5, 0.5});
  CHECK(c.p111 == doctest::Approx(0.275).epsilon(1e-14));
  CHECK(c.sum() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("cell probabilities sum to one across random points") {
  Rng rng(101);
  for (int rep = 0; rep < 10000; ++rep) {
    const auto [alpha, p] = random_point(rng);
    const CellProbs c = cell_probabilities(alpha, p);
    CHECK(std::fabs(c.sum() - 1.0) < 1e-12);
  }
}

TEST_CASE("cell probabilities validate their inputs") {
  CHECK_THROWS_AS(cell_probabilities({0.5, 0.5, 0.5, 0.5}, {0.5, 0.5, 0.5}),
                  std::invalid_argument);  // alpha0 > 1
  CHECK_THROWS_AS(cell_probabilities({0, 0, 0, 0}, {0.0, 0.5, 0.5}),
                  std::invalid_argument);
  CHECK_THROWS_AS(cell_probabilities({-0.1, 0, 0, 0}, {0.5, 0.5, 0.5}),
                  std::invalid_argument);
}

TEST_CASE("latent split probabilities: no dependence mass") {
  const SplitProbs s = latent_split_probabilities({0, 0, 0, 0}, {0.4, 0.5, 0.6});
  CHECK(s.q111[0] == 1.0);
  for (int u = 1; u < 5; ++u) CHECK(s.q111[u] == 0.0);
  CHECK(s.q110_1 == 1.0);
  CHECK(s.q001_1 == 1.0);
}

TEST_CASE("latent split probabilities: all mass on the full-copy regime") {
  const SplitProbs s = latent_split_probabilities({0, 0, 0, 1}, {0.4, 0.5, 0.6});
  CHECK(s.q111[4] == 1.0);
  CHECK(s.q000[4] == 1.0);
  CHECK(s.q110_1 == 0.0);  // empty cell
}

TEST_CASE("latent split probabilities: mixed point matches the term ratios") {
  const SplitProbs s =
      latent_split_probabilities({0.2, 0.2, 0.2, 0.2}, {0.5, 0.5, 0.5});
  CHECK(s.q111[0] == doctest::Approx(0.025 / 0.275).epsilon(1e-13));
  CHECK(s.q111[1] == doctest::Approx(0.05 / 0.275).epsilon(1e-13));
  CHECK(s.q111[2] == doctest::Approx(0.05 / 0.275).epsilon(1e-13));
  CHECK(s.q111[3] == doctest::Approx(0.05 / 0.275).epsilon(1e-13));
  CHECK(s.q111[4] == doctest::Approx(0.10 / 0.275).epsilon(1e-13));
  double total = 0.0;
  for (double q : s.q000) total += q;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("generator frequencies match the cell formulas at a fixed effect") {
  // Degenerate per-dataset effects tie the generative mechanism to the
  // closed-form cell probabilities.
  const AlphaVector alpha{0.2, 0.1, 0.2, 0.1};
  EffectSpec spec;
  spec.granularity = EffectSpec::Granularity::per_dataset;
  for (int l = 0; l < 3; ++l) {
    spec.family[l] = {EffectFamily::Kind::degenerate, 0.3 * (l + 1) - 0.5, 0.0};
  }
  RandomEffects b{spec.family[0].p1, spec.family[1].p1, spec.family[2].p1};
  const CellProbs expect = cell_probabilities(alpha, b.capture_probs());

  Rng rng(555);
  const std::int64_t n = 1000000;
  const TrsCounts got = gen_thbm(n, alpha, spec, rng);
  const auto cells = got.cells();
  const auto probs = expect.observed();
  for (int i = 0; i < 7; ++i) {
    const double freq = static_cast<double>(cells[i]) / static_cast<double>(n);
    const double se = std::sqrt(probs[i] * (1.0 - probs[i]) / static_cast<double>(n));
    CHECK(std::fabs(freq - probs[i]) < 3.0 * se);
  }
  const double p000_freq =
      static_cast<double>(n - got.observed_total()) / static_cast<double>(n);
  const double se000 =
      std::sqrt(expect.p000 * (1.0 - expect.p000) / static_cast<double>(n));
  CHECK(std::fabs(p000_freq - expect.p000) < 3.0 * se000);
}

TEST_CASE("generalized logistic draw has Beta(shape,1) capture probability") {
  Rng rng(31);
  const double shape = 1.6;
  const int n = 200000;
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const double b = generalized_logistic_draw(shape, rng);
    acc += 1.0 / (1.0 + std::exp(-b));
  }
  CHECK(acc / n == doctest::Approx(shape / (shape + 1.0)).epsilon(0.005));
}

TEST_CASE("marginal likelihood MC agrees with the independent closed form") {
  // With alpha = 0 the integral factorizes into
  //   prod_l delta_l * B(n_l + delta_l, N - n_l + 1)
  // times the multinomial coefficient.
  const TrsCounts counts{20, 10, 8, 6, 12, 9, 11};
  const std::int64_t n = 150;
  const DeltaVector delta{1.2, 0.9, 1.5};
  const Margins m = margins(counts);

  double expected = std::lgamma(n + 1.0) - std::lgamma(n - m.x0 + 1.0);
  for (auto cell : counts.cells()) expected -= std::lgamma(cell + 1.0);
  const double nl[3] = {static_cast<double>(m.n1), static_cast<double>(m.n2),
                        static_cast<double>(m.n3)};
  const double dl[3] = {delta.d1, delta.d2, delta.d3};
  for (int l = 0; l < 3; ++l) {
    expected += std::log(dl[l]) + std::lgamma(nl[l] + dl[l]) +
                std::lgamma(n - nl[l] + 1.0) - std::lgamma(n + dl[l] + 1.0);
  }

  Rng rng(211);
  const double got = marginal_loglik_mc(counts, n, {0, 0, 0, 0}, delta, 200000, rng);
  CHECK(got == doctest::Approx(expected).epsilon(0.002));
}

TEST_CASE("marginal likelihood MC is stable in the number of draws") {
  const TrsCounts counts{9, 7, 5, 4, 6, 3, 8};
  Rng rng(313);
  const double small = marginal_loglik_mc(counts, 80, {0.1, 0.1, 0.1, 0.1},
                                          {1.0, 1.0, 1.0}, 20000, rng);
  const double large = marginal_loglik_mc(counts, 80, {0.1, 0.1, 0.1, 0.1},
                                          {1.0, 1.0, 1.0}, 400000, rng);
  CHECK(small == doctest::Approx(large).epsilon(0.01));
}

TEST_CASE("marginal likelihood MC validates inputs") {
  const TrsCounts counts{1, 1, 1, 1, 1, 1, 1};
  Rng rng(1);
  CHECK_THROWS_AS(marginal_loglik_mc(counts, 5, {0, 0, 0, 0}, {1, 1, 1}, 10, rng),
                  std::invalid_argument);  // n < x0
  CHECK_THROWS_AS(marginal_loglik_mc(counts, 10, {0, 0, 0, 0}, {1, 1, 1}, 0, rng),
                  std::invalid_argument);  // draws < 1
}
