#include "trs/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "trs/glm.hpp"
#include "trs/parallel.hpp"
#include "trs/posterior.hpp"
#include "trs/rng.hpp"

namespace trs {

namespace {

// Row order everywhere: 111, 110, 101, 011, 100, 010, 001.
constexpr int kI[7] = {1, 1, 1, 0, 1, 0, 0};
constexpr int kJ[7] = {1, 1, 0, 1, 0, 1, 0};
constexpr int kK[7] = {1, 0, 1, 1, 0, 0, 1};

std::array<double, 7> cell_array(const TrsCounts& c) {
  std::array<double, 7> out{};
  const auto cells = c.cells();
  for (std::size_t i = 0; i < 7; ++i) out[i] = static_cast<double>(cells[i]);
  return out;
}

// x000 extrapolation shared by the no-second-order log-linear family:
// fitted 111 times the three singleton cells over the three doubleton cells.
double no_second_order_x000(const std::array<double, 7>& m) {
  const double denom = m[1] * m[2] * m[3];
  if (denom <= 0.0) return std::numeric_limits<double>::quiet_NaN();
  return m[0] * m[4] * m[5] * m[6] / denom;
}

}  // namespace

double EstimateResult::extra(std::string_view key) const {
  for (const auto& [k, v] : extras) {
    if (k == key) return v;
  }
  throw std::invalid_argument("no extra named '" + std::string(key) + "'");
}

bool EstimateResult::has_extra(std::string_view key) const {
  for (const auto& [k, v] : extras) {
    if (k == key) return true;
  }
  return false;
}

EstimateResult llm_estimate(const TrsCounts& counts) {
  counts.validate();
  EstimateResult r;
  r.method = "llm";
  // The all-two-way model is saturated on the seven observed cells, so the
  // fitted means are the observed counts themselves.
  const auto m = cell_array(counts);
  const double x000 = no_second_order_x000(m);
  if (!std::isfinite(x000)) {
    r.feasible = false;
    r.n_hat = std::numeric_limits<double>::quiet_NaN();
    return r;
  }
  r.n_hat = static_cast<double>(counts.observed_total()) + x000;
  r.extras.emplace_back("m000", x000);
  return r;
}

EstimateResult independent_estimate(const TrsCounts& counts) {
  counts.validate();
  std::vector<std::vector<double>> design(7);
  for (int rix = 0; rix < 7; ++rix) {
    design[rix] = {1.0, static_cast<double>(kI[rix]), static_cast<double>(kJ[rix]),
                   static_cast<double>(kK[rix])};
  }
  const GlmFit fit = poisson_irls(design, cell_array(counts));
  if (!fit.converged) throw std::runtime_error("independent model IRLS did not converge");
  EstimateResult r;
  r.method = "independent";
  const double m000 = std::exp(fit.coefficients[0]);
  r.n_hat = static_cast<double>(counts.observed_total()) + m000;
  r.extras.emplace_back("m000", m000);
  r.extras.emplace_back("iterations", fit.iterations);
  return r;
}

namespace {

EstimateResult rasch_family_estimate(const TrsCounts& counts,
                                     const std::vector<std::vector<double>>& design,
                                     std::string method) {
  const GlmFit fit = poisson_irls(design, cell_array(counts));
  if (!fit.converged) throw std::runtime_error(method + " IRLS did not converge");
  EstimateResult r;
  r.method = std::move(method);
  const double x000 = no_second_order_x000(fit.fitted_means);
  const double x0 = static_cast<double>(counts.observed_total());
  if (!std::isfinite(x000)) {
    r.feasible = false;
    r.n_hat = std::numeric_limits<double>::quiet_NaN();
    return r;
  }
  r.n_hat = x0 + x000;
  // Extrapolations orders of magnitude beyond the table are reported but
  // flagged; the simulation harness drops them like other failures.
  if (x000 > 1e4 * x0) r.feasible = false;
  r.extras.emplace_back("x000", x000);
  r.extras.emplace_back("iterations", fit.iterations);
  if (fit.ridged) r.extras.emplace_back("ridged", 1.0);
  return r;
}

}  // namespace

EstimateResult qsm_estimate(const TrsCounts& counts) {
  counts.validate();
  // Quasi-symmetry: log m = a + i s1 + j s2 + k s3 + g(i+j+k), g(0)=g(1)=0.
  // On the seven observed cells the I[i+j+k=2] column is a linear combination
  // of the others, so the fit uses the equivalent full-rank reduction with
  // the I[i+j+k=3] column only; fitted means are identical.
  std::vector<std::vector<double>> design(7);
  for (int rix = 0; rix < 7; ++rix) {
    const int t = kI[rix] + kJ[rix] + kK[rix];
    design[rix] = {1.0, static_cast<double>(kI[rix]), static_cast<double>(kJ[rix]),
                   static_cast<double>(kK[rix]), t == 3 ? 1.0 : 0.0};
  }
  return rasch_family_estimate(counts, design, "qsm");
}

EstimateResult pqsm_estimate(const TrsCounts& counts) {
  counts.validate();
  // Partial quasi-symmetry: log m = a + i s1 + j s2 + k s3 + g(i+j, k) with
  // g(0,.) = g(1,0) = 0, leaving I[i+j=2] and (i+j)k as free columns.
  std::vector<std::vector<double>> design(7);
  for (int rix = 0; rix < 7; ++rix) {
    const int ij = kI[rix] + kJ[rix];
    design[rix] = {1.0,
                   static_cast<double>(kI[rix]),
                   static_cast<double>(kJ[rix]),
                   static_cast<double>(kK[rix]),
                   ij == 2 ? 1.0 : 0.0,
                   static_cast<double>(ij * kK[rix])};
  }
  return rasch_family_estimate(counts, design, "pqsm");
}

EstimateResult sc_estimate(const TrsCounts& counts) {
  const Margins m = margins(counts);
  if (m.n1 == 0 || m.n2 == 0 || m.n3 == 0) {
    throw std::runtime_error("sample coverage requires every list margin > 0");
  }
  const double n1 = static_cast<double>(m.n1);
  const double n2 = static_cast<double>(m.n2);
  const double n3 = static_cast<double>(m.n3);
  const double coverage =
      1.0 - (static_cast<double>(counts.x100) / n1 +
             static_cast<double>(counts.x010) / n2 +
             static_cast<double>(counts.x001) / n3) / 3.0;

  EstimateResult r;
  r.method = "sc";
  r.extras.emplace_back("coverage", coverage);
  if (coverage <= 0.0) {
    r.feasible = false;
    r.n_hat = std::numeric_limits<double>::quiet_NaN();
    return r;
  }
  const double lead = static_cast<double>(m.xd11 + m.x1d1 + m.x11d) / (3.0 * coverage);
  const double remainder =
      (static_cast<double>(m.x1d0 + m.xd10) * static_cast<double>(m.x11d) / (n1 * n2) +
       static_cast<double>(m.x10d + m.xd01) * static_cast<double>(m.x1d1) / (n1 * n3) +
       static_cast<double>(m.x0d1 + m.x01d) * static_cast<double>(m.xd11) / (n2 * n3));
  const double bracket = 1.0 - remainder / (3.0 * coverage);
  if (bracket <= 0.0) {
    r.feasible = false;
    r.n_hat = std::numeric_limits<double>::quiet_NaN();
    return r;
  }
  r.n_hat = lead / bracket;
  r.feasible = r.n_hat >= static_cast<double>(m.x0);
  return r;
}

// ---------------------------------------------------------------------------
// Mtb: ordered-occasion likelihood with recapture probability phi * f_l.
// ---------------------------------------------------------------------------

namespace {

struct MtbData {
  double u1, u2, u3, m2, m3, M2, M3, M4;
};

double mtb_loglik(const MtbData& d, double n, double f1, double f2, double f3,
                  double phi) {
  if (f1 <= 0.0 || f1 >= 1.0 || f2 <= 0.0 || f2 >= 1.0 || f3 <= 0.0 || f3 >= 1.0 ||
      phi <= 0.0) {
    return -std::numeric_limits<double>::infinity();
  }
  const double c2 = phi * f2;
  const double c3 = phi * f3;
  if (c2 >= 1.0 || c3 >= 1.0) return -std::numeric_limits<double>::infinity();
  double ll = std::lgamma(n + 1.0) - std::lgamma(n - d.M4 + 1.0);
  ll += d.u1 * std::log(f1) + (n - d.u1) * std::log1p(-f1);
  ll += (d.u2 + d.m2) * std::log(f2) + (n - d.M3) * std::log1p(-f2);
  ll += (d.u3 + d.m3) * std::log(f3) + (n - d.M4) * std::log1p(-f3);
  ll += (d.m2 + d.m3) * std::log(phi);
  ll += (d.M2 - d.m2) * std::log1p(-c2) + (d.M3 - d.m3) * std::log1p(-c3);
  return ll;
}

// Minimal Nelder-Mead on R^dim; deterministic given the start simplex.
template <typename F>
std::pair<std::vector<double>, double> nelder_mead(const F& objective,
                                                   std::vector<double> start,
                                                   double step, int max_iter) {
  const std::size_t dim = start.size();
  std::vector<std::vector<double>> pts(dim + 1, start);
  std::vector<double> vals(dim + 1);
  for (std::size_t i = 0; i < dim; ++i) pts[i + 1][i] += step;
  for (std::size_t i = 0; i <= dim; ++i) vals[i] = objective(pts[i]);

  auto order = [&] {
    for (std::size_t i = 1; i <= dim; ++i) {
      for (std::size_t j = i; j > 0 && vals[j] < vals[j - 1]; --j) {
        std::swap(vals[j], vals[j - 1]);
        std::swap(pts[j], pts[j - 1]);
      }
    }
  };
  order();

  for (int it = 0; it < max_iter; ++it) {
    if (std::fabs(vals[dim] - vals[0]) < 1e-12 * (1.0 + std::fabs(vals[0]))) break;
    std::vector<double> centroid(dim, 0.0);
    for (std::size_t i = 0; i < dim; ++i) {
      for (std::size_t c = 0; c < dim; ++c) centroid[c] += pts[i][c];
    }
    for (double& c : centroid) c /= static_cast<double>(dim);

    auto blend = [&](double t) {
      std::vector<double> out(dim);
      for (std::size_t c = 0; c < dim; ++c) {
        out[c] = centroid[c] + t * (pts[dim][c] - centroid[c]);
      }
      return out;
    };

    const auto reflected = blend(-1.0);
    const double fr = objective(reflected);
    if (fr < vals[0]) {
      const auto expanded = blend(-2.0);
      const double fe = objective(expanded);
      if (fe < fr) {
        pts[dim] = expanded;
        vals[dim] = fe;
      } else {
        pts[dim] = reflected;
        vals[dim] = fr;
      }
    } else if (fr < vals[dim - 1]) {
      pts[dim] = reflected;
      vals[dim] = fr;
    } else {
      const auto contracted = blend(fr < vals[dim] ? -0.5 : 0.5);
      const double fc = objective(contracted);
      if (fc < std::min(fr, vals[dim])) {
        pts[dim] = contracted;
        vals[dim] = fc;
      } else {
        for (std::size_t i = 1; i <= dim; ++i) {
          for (std::size_t c = 0; c < dim; ++c) {
            pts[i][c] = pts[0][c] + 0.5 * (pts[i][c] - pts[0][c]);
          }
          vals[i] = objective(pts[i]);
        }
      }
    }
    order();
  }
  return {pts[0], vals[0]};
}

struct MtbProfilePoint {
  double loglik = -std::numeric_limits<double>::infinity();
  double f1 = 0, f2 = 0, f3 = 0, phi = 0;
};

// Inner maximization over (f2, f3, phi) in unconstrained coordinates;
// f1 is profiled in closed form as u1 / n.
MtbProfilePoint mtb_profile(const MtbData& d, double n) {
  const double f1 = d.u1 / n;
  const auto logistic = [](double x) { return 1.0 / (1.0 + std::exp(-x)); };
  const auto objective = [&](const std::vector<double>& z) {
    return -mtb_loglik(d, n, f1, logistic(z[0]), logistic(z[1]), std::exp(z[2]));
  };

  MtbProfilePoint best;
  Rng rng(0x6d7462u);  // fixed restart pattern keeps the estimator deterministic
  for (int restart = 0; restart < 5; ++restart) {
    std::vector<double> start(3);
    if (restart == 0) {
      const double f2n = std::clamp(d.u2 / std::max(n - d.M2, 1.0), 1e-4, 0.99);
      const double f3n = std::clamp(d.u3 / std::max(n - d.M3, 1.0), 1e-4, 0.99);
      start = {std::log(f2n / (1.0 - f2n)), std::log(f3n / (1.0 - f3n)), 0.0};
    } else {
      start = {rng.uniform(-4.0, 1.0), rng.uniform(-4.0, 1.0), rng.uniform(-1.0, 1.5)};
    }
    auto [z, negll] = nelder_mead(objective, start, 0.5, 2000);
    if (-negll > best.loglik) {
      best.loglik = -negll;
      best.f1 = f1;
      best.f2 = logistic(z[0]);
      best.f3 = logistic(z[1]);
      best.phi = std::exp(z[2]);
    }
  }
  return best;
}

}  // namespace

EstimateResult mtb_estimate(const TrsCounts& counts) {
  const Margins mg = margins(counts);
  if (mg.mtb.m2 + mg.mtb.m3 <= 0) {
    throw std::runtime_error("Mtb requires at least one recapture");
  }
  MtbData d{static_cast<double>(mg.mtb.u1), static_cast<double>(mg.mtb.u2),
            static_cast<double>(mg.mtb.u3), static_cast<double>(mg.mtb.m2),
            static_cast<double>(mg.mtb.m3), static_cast<double>(mg.mtb.M2),
            static_cast<double>(mg.mtb.M3), static_cast<double>(mg.x0)};
  const double x0 = static_cast<double>(mg.x0);

  // Profile over N on a log-spaced grid, then golden-section refinement
  // around the best bracket. A maximizer at the grid ceiling is reported but
  // flagged as a boundary solution.
  constexpr int kGridPoints = 48;
  constexpr double kCeilingFactor = 40.0;
  const double lo = x0 + 0.5;
  const double hi = kCeilingFactor * x0;
  std::vector<double> grid(kGridPoints);
  std::vector<double> profile(kGridPoints);
  for (int g = 0; g < kGridPoints; ++g) {
    const double t = static_cast<double>(g) / (kGridPoints - 1);
    grid[g] = lo * std::pow(hi / lo, t);
    profile[g] = mtb_profile(d, grid[g]).loglik;
  }
  int best = 0;
  for (int g = 1; g < kGridPoints; ++g) {
    if (profile[g] > profile[best]) best = g;
  }
  const bool boundary = best == kGridPoints - 1;

  double a = grid[std::max(best - 1, 0)];
  double b = grid[std::min(best + 1, kGridPoints - 1)];
  constexpr double kGolden = 0.6180339887498949;
  double c = b - kGolden * (b - a);
  double e = a + kGolden * (b - a);
  double fc = mtb_profile(d, c).loglik;
  double fe = mtb_profile(d, e).loglik;
  while (b - a > 0.25) {
    if (fc > fe) {
      b = e;
      e = c;
      fe = fc;
      c = b - kGolden * (b - a);
      fc = mtb_profile(d, c).loglik;
    } else {
      a = c;
      c = e;
      fc = fe;
      e = a + kGolden * (b - a);
      fe = mtb_profile(d, e).loglik;
    }
  }
  const double n_opt = 0.5 * (a + b);
  const MtbProfilePoint opt = mtb_profile(d, n_opt);
  if (!std::isfinite(opt.loglik)) throw std::runtime_error("Mtb optimization failed");

  EstimateResult r;
  r.method = "mtb";
  r.n_hat = std::round(n_opt);
  r.feasible = !boundary && r.n_hat >= x0;
  r.extras.emplace_back("phi", opt.phi);
  r.extras.emplace_back("loglik", opt.loglik);
  r.extras.emplace_back("boundary", boundary ? 1.0 : 0.0);
  return r;
}

const std::vector<std::string>& estimator_names() {
  static const std::vector<std::string> names = {"sc",   "llm", "independent",
                                                 "qsm",  "pqsm", "mtb"};
  return names;
}

EstimateResult run_estimator(std::string_view method, const TrsCounts& counts) {
  if (method == "sc") return sc_estimate(counts);
  if (method == "llm") return llm_estimate(counts);
  if (method == "independent") return independent_estimate(counts);
  if (method == "qsm") return qsm_estimate(counts);
  if (method == "pqsm") return pqsm_estimate(counts);
  if (method == "mtb") return mtb_estimate(counts);
  throw std::invalid_argument("unknown estimator '" + std::string(method) + "'");
}

BootstrapCi bootstrap_ci(const std::function<EstimateResult(const TrsCounts&)>& estimator,
                         double point_estimate, const TrsCounts& counts,
                         int replicates, double level, std::uint64_t seed) {
  counts.validate();
  if (replicates < 100) throw std::invalid_argument("bootstrap needs >= 100 replicates");
  if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("level must be in (0,1)");

  const std::int64_t x0 = counts.observed_total();
  const auto cells = counts.cells();
  std::array<double, 7> probs{};
  for (std::size_t i = 0; i < 7; ++i) {
    probs[i] = static_cast<double>(cells[i]) / static_cast<double>(x0);
  }

  std::vector<double> values(static_cast<std::size_t>(replicates),
                             std::numeric_limits<double>::quiet_NaN());
  parallel_for(static_cast<std::size_t>(replicates), [&](std::size_t b) {
    Rng rng(seed, b);
    const auto draw = rng.multinomial(x0, probs);
    const TrsCounts resampled{draw[0], draw[1], draw[2], draw[3],
                              draw[4], draw[5], draw[6]};
    try {
      const EstimateResult est = estimator(resampled);
      if (std::isfinite(est.n_hat)) values[b] = est.n_hat;
    } catch (const std::exception&) {
      // failure recorded as NaN
    }
  });

  std::vector<double> kept;
  kept.reserve(values.size());
  for (double v : values) {
    if (std::isfinite(v)) kept.push_back(v);
  }
  BootstrapCi out;
  out.kept = static_cast<int>(kept.size());
  out.failures = replicates - out.kept;
  if (out.failures * 2 > replicates) {
    throw std::runtime_error("bootstrap failure rate exceeded 50%");
  }
  std::sort(kept.begin(), kept.end());
  out.ci_low = quantile_sorted(kept, (1.0 - level) / 2.0);
  out.ci_high = quantile_sorted(kept, 1.0 - (1.0 - level) / 2.0);
  double acc = 0.0;
  for (double v : kept) acc += std::fabs(v - point_estimate);
  out.mae = acc / static_cast<double>(kept.size());
  return out;
}

BootstrapCi bootstrap_ci(std::string_view method, const TrsCounts& counts,
                         int replicates, double level, std::uint64_t seed) {
  const EstimateResult point = run_estimator(method, counts);
  const std::string name(method);
  return bootstrap_ci(
      [name](const TrsCounts& c) { return run_estimator(name, c); },
      point.n_hat, counts, replicates, level, seed);
}

}  // namespace trs
