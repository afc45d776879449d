#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace trs {

// Interpolated quantile (type 7) of an ascending-sorted sample.
double quantile_sorted(std::span<const double> sorted, double q);

// Narrowest contiguous interval holding ceil(level * n) of the sorted draws.
// Requires at least 100 draws.
std::pair<double, double> hpd_interval(std::span<const double> draws, double level);

// Geweke convergence score: standardized difference between the means of the
// first frac_a and last frac_b segments, with batch-means variance estimates
// (floor(sqrt(segment length)) batches). Requires >= 1000 draws; throws on a
// zero-variance segment.
double geweke_z(std::span<const double> draws, double frac_a = 0.1,
                double frac_b = 0.5);

// Mean of |estimate - true_n| / true_n across the sequence.
double rmae(std::span<const double> estimates, double true_n);

// Percentage of intervals that contain true_n.
double coverage_rate(std::span<const std::pair<double, double>> intervals,
                     double true_n);

// Under-reporting rate (N-x0)/N in percent; requires n_hat >= x0.
double ur_rate(double n_hat, std::int64_t x0);

// Incidence per 100,000 inhabitants.
double ir_rate(double n_hat, std::int64_t inhabitants);

struct PosteriorSummary {
  double median = 0.0;
  double mean = 0.0;
  double mae = 0.0;  // mean absolute deviation of the draws about the median
  double hpd_low = 0.0;
  double hpd_high = 0.0;
  bool median_inside_hpd = true;  // false hints at multimodality; warning only
};

PosteriorSummary summarize(std::span<const double> draws, double level = 0.95);

double median_of(std::span<const double> values);

struct Histogram {
  std::vector<double> edges;        // size bins + 1
  std::vector<std::int64_t> counts; // size bins
};

// Equal-width histogram with Freedman-Diaconis bin width (Scott fallback when
// the IQR collapses).
Histogram freedman_diaconis_histogram(std::span<const double> values);

std::string histogram_csv(const Histogram& hist);
std::string histogram_svg(const Histogram& hist, std::string_view title);

}  // namespace trs
