#pragma once

#include <array>
#include <cstdint>

#include "trs/counts.hpp"
#include "trs/rng.hpp"

namespace trs {

// Numerical guards: probabilities entering products/logits are kept inside
// [kProbFloor, kProbCeil] so extreme random effects cannot produce 0 * inf.
inline constexpr double kProbFloor = 1e-300;
inline constexpr double kProbCeil = 1.0 - 1e-15;

inline double clamp_prob(double p) {
  if (p < kProbFloor) return kProbFloor;
  if (p > kProbCeil) return kProbCeil;
  return p;
}

// Mixture weights of the dependence regimes. alpha1..alpha3 are the fractions
// whose capture status is copied between a list pair (L1->L2, L2->L3, L1->L3);
// alpha4 copies the first list's status to all three. The remaining
// 1 - alpha0 fraction behaves causally independently.
struct AlphaVector {
  double a1 = 0.0, a2 = 0.0, a3 = 0.0, a4 = 0.0;

  double sum() const { return a1 + a2 + a3 + a4; }  // alpha0
  double independent_mass() const { return 1.0 - sum(); }
  void validate() const;

  bool operator==(const AlphaVector&) const = default;
};

// Shape parameters of the generalized logistic type-I law of the list effects.
struct DeltaVector {
  double d1 = 1.0, d2 = 1.0, d3 = 1.0;
  void validate() const;
  double operator[](int l) const;  // 0-based
};

struct CaptureProbs {
  double p1 = 0.5, p2 = 0.5, p3 = 0.5;
  void validate() const;
  double operator[](int l) const;  // 0-based
};

// List-level random effects b_l on the logit scale; P_l = 1/(1+exp(-b_l)).
struct RandomEffects {
  double b1 = 0.0, b2 = 0.0, b3 = 0.0;
  CaptureProbs capture_probs() const;
};

struct ThbmParams {
  std::int64_t n = 0;
  AlphaVector alpha;
  DeltaVector delta;
};

struct CellProbs {
  double p111, p110, p101, p011, p100, p010, p001, p000;
  std::array<double, 7> observed() const {
    return {p111, p110, p101, p011, p100, p010, p001};
  }
  double sum() const {
    return p111 + p110 + p101 + p011 + p100 + p010 + p001 + p000;
  }
};

// The eight cell probabilities of the dependence mixture evaluated at fixed
// capture probabilities. Each cell sums its regime contributions; p000 is
// evaluated from its own terms, so sum() == 1 is a nontrivial invariant.
CellProbs cell_probabilities(const AlphaVector& alpha, const CaptureProbs& p);

// Conditional regime-split distributions for the latent cell decomposition.
// q111/q000 are simplices over (independent, a1, a2, a3, a4); the six binary
// fields give P(independent regime | cell). Components of empty cells
// (total mass zero) are all zero.
struct SplitProbs {
  std::array<double, 5> q111{};
  std::array<double, 5> q000{};
  double q110_1 = 0.0, q011_1 = 0.0, q100_1 = 0.0;
  double q101_1 = 0.0, q010_1 = 0.0, q001_1 = 0.0;
};

SplitProbs latent_split_probabilities(const AlphaVector& alpha, const CaptureProbs& p);

// One draw of the list effect b ~ generalized logistic type-I with the given
// shape: density shape * e^{-z} / (1+e^{-z})^{shape+1}. Sampled exactly as the
// logit of Beta(shape, 1).
double generalized_logistic_draw(double shape, Rng& rng);

// Monte-Carlo estimate of the log marginal likelihood of (n, alpha, delta):
// the multinomial likelihood at fixed effects averaged over `draws`
// independent effect triples. Test oracle only; fitting never calls this.
double marginal_loglik_mc(const TrsCounts& counts, std::int64_t n,
                          const AlphaVector& alpha, const DeltaVector& delta,
                          std::int64_t draws, Rng& rng);

}  // namespace trs
