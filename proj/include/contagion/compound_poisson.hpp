#pragma once

// Law of S = sum_s s * X_s with independent X_s ~ Poi(x_s), s = 1..R, and the
// tail probabilities psi_l(x) = P(S >= l).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "contagion/error.hpp"
#include "contagion/model.hpp"

namespace contagion {

namespace detail {

inline void check_rates(std::span<const double> rates) {
  for (double x : rates)
    if (!(x >= 0.0) || !std::isfinite(x))
      throw ContagionError(ErrorCode::NegativeRate, "Poisson rates must be finite and nonnegative");
}

// Poisson pmf values p[0..jmax] for rate lambda.
inline std::vector<double> poisson_pmf(double lambda, std::size_t jmax) {
  std::vector<double> p(jmax + 1, 0.0);
  if (lambda == 0.0) {
    p[0] = 1.0;
    return p;
  }
  if (lambda < 600.0) {
    p[0] = std::exp(-lambda);
    for (std::size_t j = 1; j <= jmax; ++j) p[j] = p[j - 1] * lambda / static_cast<double>(j);
  } else {
    const double log_lambda = std::log(lambda);
    for (std::size_t j = 0; j <= jmax; ++j) {
      const double jd = static_cast<double>(j);
      p[j] = std::exp(-lambda + jd * log_lambda - std::lgamma(jd + 1.0));
    }
  }
  return p;
}

}  // namespace detail

/// p[k] = P(sum_s s X_s = k) for k = 0..kmax, by sequential convolution of
/// the lattice pmfs of s * Poi(x_s). Mass beyond kmax never feeds back into
/// smaller totals, so the truncation is exact.
inline std::vector<double> compound_poisson_pmf(std::span<const double> rates, std::size_t kmax) {
  detail::check_rates(rates);
  std::vector<double> p(kmax + 1, 0.0);
  p[0] = 1.0;
  std::vector<double> next(kmax + 1);
  for (std::size_t idx = 0; idx < rates.size(); ++idx) {
    const double lambda = rates[idx];
    if (lambda == 0.0) continue;
    const std::size_t step = idx + 1;
    const std::vector<double> q = detail::poisson_pmf(lambda, kmax / step);
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t k = 0; k <= kmax; ++k) {
      if (p[k] == 0.0) continue;
      for (std::size_t j = 0; k + j * step <= kmax; ++j) next[k + j * step] += p[k] * q[j];
    }
    p.swap(next);
  }
  return p;
}

/// psi_l(x) = P(sum_s s X_s >= l). psi_0 = 1 and psi_inf = 0.
inline double psi(const Capital& level, std::span<const double> rates) {
  detail::check_rates(rates);
  if (level.is_infinite()) return 0.0;
  const std::uint32_t ell = level.value();
  if (ell == 0) return 1.0;
  double total = 0.0;
  for (double x : rates) total += x;
  if (total == 0.0) return 0.0;
  // 1 - P(S = 0) via expm1 keeps absolute error proportional to the rates.
  const std::vector<double> p = compound_poisson_pmf(rates, ell - 1);
  double value = -std::expm1(-total);
  for (std::size_t k = 1; k < ell; ++k) value -= p[k];
  return std::clamp(value, 0.0, 1.0);
}

inline double psi(std::uint32_t level, std::span<const double> rates) {
  return psi(Capital(level), rates);
}

/// P(S in {lo, ..., hi}); empty when hi < lo.
inline double compound_poisson_window(std::span<const double> rates, long lo, long hi) {
  if (hi < 0 || hi < lo) return 0.0;
  if (lo < 0) lo = 0;
  const std::vector<double> p = compound_poisson_pmf(rates, static_cast<std::size_t>(hi));
  double s = 0.0;
  for (long k = lo; k <= hi; ++k) s += p[static_cast<std::size_t>(k)];
  return s;
}

}  // namespace contagion
