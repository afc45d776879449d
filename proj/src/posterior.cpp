#include "trs/posterior.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace trs {

double quantile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw std::invalid_argument("quantile of empty sample");
  if (q <= 0.0) return sorted.front();
  if (q >= 1.0) return sorted.back();
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const double frac = pos - static_cast<double>(lo);
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac;
}

double median_of(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("median of empty sample");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  if (n % 2 == 1) return sorted[n / 2];
  return 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
}

std::pair<double, double> hpd_interval(std::span<const double> draws, double level) {
  if (draws.size() < 100) throw std::invalid_argument("hpd_interval needs >= 100 draws");
  if (!(level > 0.0 && level < 1.0)) {
    throw std::invalid_argument("level must lie in (0,1)");
  }
  std::vector<double> sorted(draws.begin(), draws.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  std::size_t window = static_cast<std::size_t>(
      std::ceil(level * static_cast<double>(n)));
  window = std::min(std::max<std::size_t>(window, 1), n);

  std::size_t best = 0;
  double best_width = sorted[window - 1] - sorted[0];
  for (std::size_t i = 1; i + window <= n; ++i) {
    const double width = sorted[i + window - 1] - sorted[i];
    if (width < best_width) {
      best_width = width;
      best = i;
    }
  }
  return {sorted[best], sorted[best + window - 1]};
}

namespace {

struct SegmentStats {
  double mean = 0.0;
  double var_of_mean = 0.0;
};

SegmentStats batch_means(std::span<const double> segment) {
  const std::size_t n = segment.size();
  SegmentStats s;
  for (double v : segment) s.mean += v;
  s.mean /= static_cast<double>(n);

  const std::size_t batches = std::max<std::size_t>(
      2, static_cast<std::size_t>(std::sqrt(static_cast<double>(n))));
  const std::size_t batch_len = n / batches;
  if (batch_len == 0) throw std::invalid_argument("segment too short for batch means");

  double acc = 0.0;
  double mean_of_batches = 0.0;
  std::vector<double> bm(batches);
  for (std::size_t b = 0; b < batches; ++b) {
    double m = 0.0;
    for (std::size_t i = b * batch_len; i < (b + 1) * batch_len; ++i) m += segment[i];
    bm[b] = m / static_cast<double>(batch_len);
    mean_of_batches += bm[b];
  }
  mean_of_batches /= static_cast<double>(batches);
  for (double m : bm) acc += (m - mean_of_batches) * (m - mean_of_batches);
  const double sample_var = acc / static_cast<double>(batches - 1);
  s.var_of_mean = sample_var / static_cast<double>(batches);
  return s;
}

}  // namespace

double geweke_z(std::span<const double> draws, double frac_a, double frac_b) {
  if (draws.size() < 1000) throw std::invalid_argument("geweke_z needs >= 1000 draws");
  if (!(frac_a > 0.0 && frac_b > 0.0 && frac_a + frac_b <= 1.0)) {
    throw std::invalid_argument("invalid geweke segment fractions");
  }
  const std::size_t n = draws.size();
  const std::size_t na = static_cast<std::size_t>(frac_a * static_cast<double>(n));
  const std::size_t nb = static_cast<std::size_t>(frac_b * static_cast<double>(n));
  const SegmentStats a = batch_means(draws.subspan(0, na));
  const SegmentStats b = batch_means(draws.subspan(n - nb, nb));
  const double denom = a.var_of_mean + b.var_of_mean;
  if (denom <= 0.0) throw std::runtime_error("geweke_z: zero variance segment");
  return (a.mean - b.mean) / std::sqrt(denom);
}

double rmae(std::span<const double> estimates, double true_n) {
  if (estimates.empty()) throw std::invalid_argument("rmae of empty sequence");
  if (!(true_n > 0.0)) throw std::invalid_argument("true_n must be > 0");
  double acc = 0.0;
  for (double v : estimates) acc += std::fabs(v - true_n) / true_n;
  return acc / static_cast<double>(estimates.size());
}

double coverage_rate(std::span<const std::pair<double, double>> intervals,
                     double true_n) {
  if (intervals.empty()) throw std::invalid_argument("coverage of empty sequence");
  std::size_t hits = 0;
  for (const auto& [lo, hi] : intervals) {
    if (lo <= true_n && true_n <= hi) ++hits;
  }
  return 100.0 * static_cast<double>(hits) / static_cast<double>(intervals.size());
}

double ur_rate(double n_hat, std::int64_t x0) {
  if (!(n_hat > 0.0)) throw std::invalid_argument("n_hat must be > 0");
  if (n_hat < static_cast<double>(x0)) {
    throw std::invalid_argument("UR undefined: n_hat < x0");
  }
  return (n_hat - static_cast<double>(x0)) / n_hat * 100.0;
}

double ir_rate(double n_hat, std::int64_t inhabitants) {
  if (inhabitants <= 0) throw std::invalid_argument("inhabitants must be > 0");
  return n_hat / static_cast<double>(inhabitants) * 100000.0;
}

PosteriorSummary summarize(std::span<const double> draws, double level) {
  PosteriorSummary s;
  s.median = median_of(draws);
  double acc = 0.0, dev = 0.0;
  for (double v : draws) {
    acc += v;
    dev += std::fabs(v - s.median);
  }
  s.mean = acc / static_cast<double>(draws.size());
  s.mae = dev / static_cast<double>(draws.size());
  const auto [lo, hi] = hpd_interval(draws, level);
  s.hpd_low = lo;
  s.hpd_high = hi;
  s.median_inside_hpd = lo <= s.median && s.median <= hi;
  return s;
}

Histogram freedman_diaconis_histogram(std::span<const double> values) {
  if (values.size() < 2) throw std::invalid_argument("histogram needs >= 2 values");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double lo = sorted.front();
  const double hi = sorted.back();
  const double n = static_cast<double>(sorted.size());

  const double iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
  double width = 2.0 * iqr / std::cbrt(n);
  if (width <= 0.0) {
    double mean = 0.0, ss = 0.0;
    for (double v : sorted) mean += v;
    mean /= n;
    for (double v : sorted) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / std::max(n - 1.0, 1.0));
    width = 3.49 * sd / std::cbrt(n);
  }

  std::size_t bins = 1;
  if (width > 0.0 && hi > lo) {
    bins = static_cast<std::size_t>(std::ceil((hi - lo) / width));
    bins = std::min<std::size_t>(std::max<std::size_t>(bins, 1), 10000);
  }

  Histogram h;
  h.edges.resize(bins + 1);
  h.counts.assign(bins, 0);
  const double span = hi > lo ? hi - lo : 1.0;
  for (std::size_t b = 0; b <= bins; ++b) {
    h.edges[b] = lo + span * static_cast<double>(b) / static_cast<double>(bins);
  }
  for (double v : sorted) {
    std::size_t b = static_cast<std::size_t>((v - lo) / span * static_cast<double>(bins));
    if (b >= bins) b = bins - 1;
    ++h.counts[b];
  }
  return h;
}

std::string histogram_csv(const Histogram& hist) {
  std::ostringstream out;
  out << "bin_low,bin_high,count\n";
  char buf[80];
  for (std::size_t b = 0; b < hist.counts.size(); ++b) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%lld\n", hist.edges[b],
                  hist.edges[b + 1], static_cast<long long>(hist.counts[b]));
    out << buf;
  }
  return out.str();
}

std::string histogram_svg(const Histogram& hist, std::string_view title) {
  constexpr int kWidth = 640, kHeight = 400, kPad = 40;
  std::int64_t peak = 1;
  for (auto c : hist.counts) peak = std::max(peak, c);
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\">\n";
  out << "<text x=\"" << kWidth / 2 << "\" y=\"20\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"14\">" << title << "</text>\n";
  const double plot_w = kWidth - 2.0 * kPad;
  const double plot_h = kHeight - 2.0 * kPad;
  const std::size_t bins = hist.counts.size();
  char buf[256];
  for (std::size_t b = 0; b < bins; ++b) {
    const double x = kPad + plot_w * static_cast<double>(b) / static_cast<double>(bins);
    const double w = plot_w / static_cast<double>(bins);
    const double h = plot_h * static_cast<double>(hist.counts[b]) /
                     static_cast<double>(peak);
    std::snprintf(buf, sizeof(buf),
                  "<rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"%.2f\" "
                  "fill=\"#4878a8\"/>\n",
                  x, kHeight - kPad - h, std::max(w - 1.0, 0.5), h);
    out << buf;
  }
  std::snprintf(buf, sizeof(buf),
                "<text x=\"%d\" y=\"%d\" font-family=\"sans-serif\" font-size=\"11\">"
                "%.6g</text>\n",
                kPad, kHeight - kPad + 16, hist.edges.front());
  out << buf;
  std::snprintf(buf, sizeof(buf),
                "<text x=\"%d\" y=\"%d\" text-anchor=\"end\" font-family=\"sans-serif\" "
                "font-size=\"11\">%.6g</text>\n",
                kWidth - kPad, kHeight - kPad + 16, hist.edges.back());
  out << buf;
  out << "</svg>\n";
  return out.str();
}

}  // namespace trs
