#pragma once

#include <array>
#include <vector>

#include "trs/counts.hpp"

namespace trs {

struct GlmFit {
  std::vector<double> coefficients;
  std::array<double, 7> fitted_means{};
  bool converged = false;
  int iterations = 0;
  bool ridged = false;  // separation guard engaged
};

// Poisson log-linear fit of the seven observed cells by iteratively
// reweighted least squares. `design` holds 7 rows of p <= 7 columns and must
// have full column rank. Converges when the largest coefficient change drops
// below 1e-10 (at most 100 iterations); near-zero fitted means trigger a
// 1e-8 ridge on the normal equations.
GlmFit poisson_irls(const std::vector<std::vector<double>>& design,
                    const std::array<double, 7>& counts);

}  // namespace trs
