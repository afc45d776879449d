#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "trs/posterior.hpp"
#include "trs/rng.hpp"

using namespace trs;

TEST_CASE("hpd of constant draws is a point") {
  const std::vector<double> draws(200, 3.5);
  const auto [lo, hi] = hpd_interval(draws, 0.95);
  CHECK(lo == 3.5);
  CHECK(hi == 3.5);
}

TEST_CASE("hpd of uniform draws has width ~ level") {
  Rng rng(5);
  std::vector<double> draws(1000000);
  for (auto& d : draws) d = rng.uniform();
  const auto [lo, hi] = hpd_interval(draws, 0.95);
  CHECK(hi - lo == doctest::Approx(0.95).epsilon(0.011));
}

TEST_CASE("hpd of exponential draws hugs zero") {
  Rng rng(6);
  std::vector<double> draws(1000000);
  for (auto& d : draws) d = rng.exponential(1.0);
  const auto [lo, hi] = hpd_interval(draws, 0.95);
  CHECK(lo < 0.01);
  CHECK(hi == doctest::Approx(-std::log(0.05)).epsilon(0.02));
}

TEST_CASE("hpd nests across levels and beats the central interval") {
  Rng rng(7);
  std::vector<double> draws(20000);
  for (auto& d : draws) d = std::exp(rng.normal(0.0, 0.7));  // right-skewed
  const auto [lo95, hi95] = hpd_interval(draws, 0.95);
  const auto [lo99, hi99] = hpd_interval(draws, 0.99);
  CHECK(lo99 <= lo95);
  CHECK(hi99 >= hi95);

  std::sort(draws.begin(), draws.end());
  const double central =
      quantile_sorted(draws, 0.975) - quantile_sorted(draws, 0.025);
  CHECK(hi95 - lo95 <= central + 1e-12);
}

TEST_CASE("hpd validates input") {
  const std::vector<double> few(50, 1.0);
  CHECK_THROWS_AS(hpd_interval(few, 0.95), std::invalid_argument);
  const std::vector<double> enough(200, 1.0);
  CHECK_THROWS_AS(hpd_interval(enough, 1.5), std::invalid_argument);
}

TEST_CASE("geweke z is small for iid draws and large under drift") {
  int ok = 0;
  for (int seed = 0; seed < 50; ++seed) {
    Rng rng(seed);
    std::vector<double> draws(10000);
    for (auto& d : draws) d = rng.normal(0.0, 1.0);
    if (std::fabs(geweke_z(draws)) < 3.0) ++ok;
  }
  CHECK(ok >= 49);

  std::vector<double> trend(10000);
  for (std::size_t i = 0; i < trend.size(); ++i) {
    trend[i] = static_cast<double>(i) / trend.size();
  }
  CHECK(std::fabs(geweke_z(trend)) > 5.0);
}

TEST_CASE("geweke on constant draws reports zero variance") {
  const std::vector<double> flat(5000, 2.0);
  CHECK_THROWS_AS(geweke_z(flat), std::runtime_error);
  const std::vector<double> few(100, 2.0);
  CHECK_THROWS_AS(geweke_z(few), std::invalid_argument);
}

TEST_CASE("rmae basics and scale consistency") {
  const std::vector<double> exact(5, 200.0);
  CHECK(rmae(exact, 200.0) == 0.0);

  const std::vector<double> pair = {180.0, 220.0};
  CHECK(rmae(pair, 200.0) == doctest::Approx(0.10).epsilon(1e-14));

  Rng rng(8);
  std::vector<double> est(100);
  for (auto& e : est) e = rng.uniform(150.0, 250.0);
  std::vector<double> scaled(est);
  for (auto& e : scaled) e *= 7.5;
  CHECK(rmae(est, 200.0) == doctest::Approx(rmae(scaled, 1500.0)).epsilon(1e-12));
}

TEST_CASE("coverage rate counts containing intervals") {
  using I = std::pair<double, double>;
  const std::vector<I> all = {{0.0, 1e9}, {0.0, 1e9}};
  CHECK(coverage_rate(all, 500.0) == 100.0);
  const std::vector<I> none = {{0.0, 1.0}, {2.0, 3.0}};
  CHECK(coverage_rate(none, 500.0) == 0.0);
  const std::vector<I> half = {{400.0, 600.0}, {0.0, 1.0}};
  CHECK(coverage_rate(half, 500.0) == 50.0);
}

TEST_CASE("under-reporting and incidence rates") {
  CHECK(ur_rate(633.0, 271) == doctest::Approx(57.19).epsilon(1e-3));
  CHECK(ur_rate(780.0, 780) == 0.0);
  CHECK_THROWS_AS(ur_rate(700.0, 780), std::invalid_argument);

  CHECK(ir_rate(308.0, 3892715) == doctest::Approx(7.912).epsilon(1e-3));
  CHECK_THROWS_AS(ir_rate(100.0, 0), std::invalid_argument);

  Rng rng(9);
  for (int rep = 0; rep < 200; ++rep) {
    const double x0 = rng.uniform(10.0, 500.0);
    const double n_hat = x0 + rng.uniform(0.0, 2000.0);
    const double ur = ur_rate(n_hat, static_cast<std::int64_t>(x0));
    CHECK(ur >= 0.0);
    CHECK(ur < 100.0);
  }
}

TEST_CASE("summary is internally ordered on unimodal draws") {
  Rng rng(10);
  std::vector<double> draws(5000);
  for (auto& d : draws) d = rng.normal(100.0, 9.0);
  const PosteriorSummary s = summarize(draws);
  CHECK(s.hpd_low <= s.median);
  CHECK(s.median <= s.hpd_high);
  CHECK(s.median_inside_hpd);
  CHECK(s.mean == doctest::Approx(100.0).epsilon(0.01));
  CHECK(s.mae == doctest::Approx(9.0 * std::sqrt(2.0 / 3.14159265)).epsilon(0.05));
}

TEST_CASE("median handles even and odd lengths") {
  const std::vector<double> odd = {3.0, 1.0, 2.0};
  CHECK(median_of(odd) == 2.0);
  const std::vector<double> even = {4.0, 1.0, 3.0, 2.0};
  CHECK(median_of(even) == 2.5);
}

TEST_CASE("freedman-diaconis histogram covers the sample") {
  Rng rng(11);
  std::vector<double> values(20000);
  for (auto& v : values) v = rng.normal(0.0, 1.0);
  const Histogram h = freedman_diaconis_histogram(values);
  CHECK(h.counts.size() + 1 == h.edges.size());
  std::int64_t total = 0;
  for (auto c : h.counts) total += c;
  CHECK(total == 20000);
  CHECK(h.edges.front() == *std::min_element(values.begin(), values.end()));
  CHECK(h.edges.back() == *std::max_element(values.begin(), values.end()));
  CHECK(h.counts.size() > 10);

  const std::string csv = histogram_csv(h);
  CHECK(csv.rfind("bin_low,bin_high,count\n", 0) == 0);
  const std::string svg = histogram_svg(h, "draws");
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);
}

TEST_CASE("histogram of near-constant data falls back gracefully") {
  std::vector<double> values(500, 2.0);
  values[0] = 2.0;
  const Histogram h = freedman_diaconis_histogram(values);
  std::int64_t total = 0;
  for (auto c : h.counts) total += c;
  CHECK(total == 500);
}
