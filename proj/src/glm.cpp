#include "trs/glm.hpp"

#include <cmath>
#include <stdexcept>

namespace trs {

namespace {

// Solves A x = b in place for a small symmetric positive-definite system by
// Gaussian elimination with partial pivoting. Returns false when a pivot
// collapses.
bool solve_inplace(std::vector<std::vector<double>>& a, std::vector<double>& b) {
  const std::size_t p = b.size();
  double scale = 0.0;
  for (std::size_t i = 0; i < p; ++i) scale = std::max(scale, std::fabs(a[i][i]));
  if (scale <= 0.0) return false;
  for (std::size_t col = 0; col < p; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < p; ++r) {
      if (std::fabs(a[r][col]) > std::fabs(a[pivot][col])) pivot = r;
    }
    if (std::fabs(a[pivot][col]) < 1e-12 * scale) return false;
    std::swap(a[pivot], a[col]);
    std::swap(b[pivot], b[col]);
    for (std::size_t r = col + 1; r < p; ++r) {
      const double f = a[r][col] / a[col][col];
      for (std::size_t c = col; c < p; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  for (std::size_t i = p; i-- > 0;) {
    double acc = b[i];
    for (std::size_t c = i + 1; c < p; ++c) acc -= a[i][c] * b[c];
    b[i] = acc / a[i][i];
  }
  return true;
}

}  // namespace

GlmFit poisson_irls(const std::vector<std::vector<double>>& design,
                    const std::array<double, 7>& counts) {
  if (design.size() != 7) throw std::invalid_argument("design must have 7 rows");
  const std::size_t p = design.front().size();
  if (p == 0 || p > 7) throw std::invalid_argument("design must have 1..7 columns");
  for (const auto& row : design) {
    if (row.size() != p) throw std::invalid_argument("ragged design matrix");
  }
  for (double y : counts) {
    if (y < 0.0) throw std::invalid_argument("counts must be non-negative");
  }

  // Column-rank check on X'X before any reweighting.
  {
    std::vector<std::vector<double>> xtx(p, std::vector<double>(p, 0.0));
    std::vector<double> dummy(p, 0.0);
    for (std::size_t r = 0; r < 7; ++r) {
      for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = 0; j < p; ++j) xtx[i][j] += design[r][i] * design[r][j];
      }
    }
    if (!solve_inplace(xtx, dummy)) {
      throw std::invalid_argument("design matrix is not of full column rank");
    }
  }

  GlmFit fit;
  fit.coefficients.assign(p, 0.0);
  std::vector<double> eta(7, 0.0), mu(7, 1.0);

  for (int iter = 1; iter <= 100; ++iter) {
    fit.iterations = iter;
    for (std::size_t r = 0; r < 7; ++r) {
      double e = 0.0;
      for (std::size_t c = 0; c < p; ++c) e += design[r][c] * fit.coefficients[c];
      eta[r] = std::min(std::max(e, -300.0), 300.0);
      mu[r] = std::exp(eta[r]);
      if (mu[r] < 1e-10) fit.ridged = true;  // separation guard
    }

    std::vector<std::vector<double>> a(p, std::vector<double>(p, 0.0));
    std::vector<double> rhs(p, 0.0);
    for (std::size_t r = 0; r < 7; ++r) {
      const double w = mu[r];
      const double z = eta[r] + (counts[r] - mu[r]) / mu[r];
      for (std::size_t i = 0; i < p; ++i) {
        rhs[i] += design[r][i] * w * z;
        for (std::size_t j = 0; j < p; ++j) a[i][j] += design[r][i] * w * design[r][j];
      }
    }
    if (fit.ridged) {
      for (std::size_t i = 0; i < p; ++i) a[i][i] += 1e-8;
    }

    std::vector<double> next = rhs;
    if (!solve_inplace(a, next)) {
      if (!fit.ridged) {
        fit.ridged = true;
        continue;
      }
      throw std::runtime_error("IRLS normal equations are singular");
    }

    double delta = 0.0;
    bool finite = true;
    for (std::size_t c = 0; c < p; ++c) {
      if (!std::isfinite(next[c])) finite = false;
      delta = std::max(delta, std::fabs(next[c] - fit.coefficients[c]));
    }
    fit.coefficients = next;
    if (!finite) {
      fit.converged = false;
      break;
    }
    if (delta < 1e-10) {
      fit.converged = true;
      break;
    }
  }

  for (std::size_t r = 0; r < 7; ++r) {
    double e = 0.0;
    for (std::size_t c = 0; c < p; ++c) e += design[r][c] * fit.coefficients[c];
    fit.fitted_means[r] = std::exp(std::min(std::max(e, -300.0), 300.0));
  }
  return fit;
}

}  // namespace trs
