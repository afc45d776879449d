#include "trs/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace trs {

void AlphaVector::validate() const {
  for (double a : {a1, a2, a3, a4}) {
    if (!(a >= 0.0 && a <= 1.0)) {
      throw std::invalid_argument("alpha components must lie in [0,1]");
    }
  }
  if (sum() > 1.0 + 1e-12) {
    throw std::invalid_argument("alpha0 = a1+a2+a3+a4 exceeds 1");
  }
}

void DeltaVector::validate() const {
  for (double d : {d1, d2, d3}) {
    if (!(d > 0.0)) throw std::invalid_argument("delta components must be > 0");
  }
}

double DeltaVector::operator[](int l) const {
  switch (l) {
    case 0: return d1;
    case 1: return d2;
    case 2: return d3;
  }
  throw std::out_of_range("DeltaVector index");
}

void CaptureProbs::validate() const {
  for (double p : {p1, p2, p3}) {
    if (!(p > 0.0 && p < 1.0)) {
      throw std::invalid_argument("capture probabilities must lie in (0,1)");
    }
  }
}

double CaptureProbs::operator[](int l) const {
  switch (l) {
    case 0: return p1;
    case 1: return p2;
    case 2: return p3;
  }
  throw std::out_of_range("CaptureProbs index");
}

CaptureProbs RandomEffects::capture_probs() const {
  const auto logistic = [](double b) {
    return clamp_prob(1.0 / (1.0 + std::exp(-b)));
  };
  return {logistic(b1), logistic(b2), logistic(b3)};
}

CellProbs cell_probabilities(const AlphaVector& alpha, const CaptureProbs& p) {
  alpha.validate();
  p.validate();
  const double a0 = alpha.sum();
  const double ind = 1.0 - a0;
  const double p1 = p.p1, p2 = p.p2, p3 = p.p3;
  const double q1 = 1.0 - p1, q2 = 1.0 - p2, q3 = 1.0 - p3;

  CellProbs c{};
  c.p111 = ind * p1 * p2 * p3 + alpha.a1 * p1 * p3 + alpha.a2 * p1 * p2 +
           alpha.a3 * p1 * p2 + alpha.a4 * p1;
  c.p110 = ind * p1 * p2 * q3 + alpha.a1 * p1 * q3;
  c.p011 = ind * q1 * p2 * p3 + alpha.a2 * q1 * p2;
  c.p100 = ind * p1 * q2 * q3 + alpha.a2 * p1 * q2;
  c.p101 = ind * p1 * q2 * p3 + alpha.a3 * p1 * q2;
  c.p010 = ind * q1 * p2 * q3 + alpha.a3 * q1 * p2;
  c.p001 = ind * q1 * q2 * p3 + alpha.a1 * q1 * p3;
  c.p000 = ind * q1 * q2 * q3 + alpha.a1 * q1 * q3 + alpha.a2 * q1 * q2 +
           alpha.a3 * q1 * q2 + alpha.a4 * q1;
  return c;
}

namespace {

std::array<double, 5> normalized(const std::array<double, 5>& terms) {
  double total = 0.0;
  for (double t : terms) total += t;
  std::array<double, 5> out{};
  if (total <= 0.0) return out;
  for (std::size_t i = 0; i < 5; ++i) out[i] = terms[i] / total;
  return out;
}

double first_share(double independent_term, double alt_term) {
  const double total = independent_term + alt_term;
  if (total <= 0.0) return 0.0;
  return independent_term / total;
}

}  // namespace

SplitProbs latent_split_probabilities(const AlphaVector& alpha, const CaptureProbs& p) {
  alpha.validate();
  p.validate();
  const double a0 = alpha.sum();
  const double ind = 1.0 - a0;
  const double p1 = p.p1, p2 = p.p2, p3 = p.p3;
  const double q1 = 1.0 - p1, q2 = 1.0 - p2, q3 = 1.0 - p3;

  SplitProbs s;
  s.q111 = normalized({ind * p1 * p2 * p3, alpha.a1 * p1 * p3, alpha.a2 * p1 * p2,
                       alpha.a3 * p1 * p2, alpha.a4 * p1});
  s.q000 = normalized({ind * q1 * q2 * q3, alpha.a1 * q1 * q3, alpha.a2 * q1 * q2,
                       alpha.a3 * q1 * q2, alpha.a4 * q1});
  s.q110_1 = first_share(ind * p1 * p2 * q3, alpha.a1 * p1 * q3);
  s.q011_1 = first_share(ind * q1 * p2 * p3, alpha.a2 * q1 * p2);
  s.q100_1 = first_share(ind * p1 * q2 * q3, alpha.a2 * p1 * q2);
  s.q101_1 = first_share(ind * p1 * q2 * p3, alpha.a3 * p1 * q2);
  s.q010_1 = first_share(ind * q1 * p2 * q3, alpha.a3 * q1 * p2);
  s.q001_1 = first_share(ind * q1 * q2 * p3, alpha.a1 * q1 * p3);
  return s;
}

double generalized_logistic_draw(double shape, Rng& rng) {
  if (!(shape > 0.0)) throw std::invalid_argument("shape must be > 0");
  // P = U^{1/shape} ~ Beta(shape, 1); b = logit(P) then has the target law.
  double u = rng.uniform();
  while (u <= 0.0) u = rng.uniform();
  const double p = clamp_prob(std::exp(std::log(u) / shape));
  return std::log(p / (1.0 - p));
}

double marginal_loglik_mc(const TrsCounts& counts, std::int64_t n,
                          const AlphaVector& alpha, const DeltaVector& delta,
                          std::int64_t draws, Rng& rng) {
  counts.validate();
  alpha.validate();
  delta.validate();
  if (draws < 1) throw std::invalid_argument("draws must be >= 1");
  const std::int64_t x0 = counts.observed_total();
  if (n < x0) throw std::invalid_argument("n must be >= x0");

  double log_coef = std::lgamma(static_cast<double>(n) + 1.0) -
                    std::lgamma(static_cast<double>(n - x0) + 1.0);
  for (std::int64_t cell : counts.cells()) {
    log_coef -= std::lgamma(static_cast<double>(cell) + 1.0);
  }

  const auto cellv = counts.cells();
  std::vector<double> log_kernels;
  log_kernels.reserve(static_cast<std::size_t>(draws));
  for (std::int64_t m = 0; m < draws; ++m) {
    RandomEffects b{generalized_logistic_draw(delta.d1, rng),
                    generalized_logistic_draw(delta.d2, rng),
                    generalized_logistic_draw(delta.d3, rng)};
    const CellProbs cp = cell_probabilities(alpha, b.capture_probs());
    const auto pv = cp.observed();
    double lk = 0.0;
    for (std::size_t i = 0; i < 7; ++i) {
      if (cellv[i] > 0) lk += static_cast<double>(cellv[i]) * std::log(clamp_prob(pv[i]));
    }
    if (n > x0) lk += static_cast<double>(n - x0) * std::log(clamp_prob(cp.p000));
    log_kernels.push_back(lk);
  }

  const double peak = *std::max_element(log_kernels.begin(), log_kernels.end());
  double acc = 0.0;
  for (double lk : log_kernels) acc += std::exp(lk - peak);
  return log_coef + peak + std::log(acc / static_cast<double>(draws));
}

}  // namespace trs
