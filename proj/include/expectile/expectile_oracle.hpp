#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "expectile/distributions.hpp"
#include "expectile/quadrature.hpp"
#include "expectile/univariate_law.hpp"

namespace expectile {

namespace detail {

// Lower partial moment L(e) = int_{lo}^{e} (e - y) f(y) dy.
inline double lower_partial(const UnivariateLaw& law, double e, double tol) {
  if (e <= law.support_lo) return 0.0;
  const double hi = std::min(e, law.support_hi);
  return integrate([&](double y) { return (e - y) * law.pdf(y); }, law.support_lo, hi, tol);
}

// Upper partial moment U(e) = int_{e}^{hi} (y - e) f(y) dy.
inline double upper_partial(const UnivariateLaw& law, double e, double tol) {
  if (e >= law.support_hi) return 0.0;
  const double lo = std::max(e, law.support_lo);
  return integrate([&](double y) { return (y - e) * law.pdf(y); }, lo, law.support_hi, tol);
}

}  // namespace detail

// Imbalance between the tails at e. The tau-expectile is the root of
//   g(e) = (1-tau) L(e) - tau U(e),
// which is the tail-expectation characterisation
//   tau = int_{-inf}^{e} |y-e| f dy / int |y-e| f dy
// cleared of its denominator; g is strictly increasing in e.
inline double expectile_imbalance(const UnivariateLaw& law, double e, const Asymmetry& asym,
                                  double tol = 1e-12) {
  return (1.0 - asym.tau()) * detail::lower_partial(law, e, tol) -
         asym.tau() * detail::upper_partial(law, e, tol);
}

// True tau-expectile of a law with finite first absolute moment, by a
// bracketing bisection/secant hybrid on the imbalance function; the returned
// root satisfies |g(e)| < tol.
inline double true_expectile(const UnivariateLaw& law, const Asymmetry& asym,
                             double tol = 1e-10) {
  const double inner_tol = std::min(tol, 1e-10) * 1e-2;
  auto g = [&](double e) { return expectile_imbalance(law, e, asym, inner_tol); };

  const double mean = law.exact_mean
                          ? *law.exact_mean
                          : integrate([&](double y) { return y * law.pdf(y); },
                                      law.support_lo, law.support_hi, inner_tol);
  // Spread proxy: the mean absolute deviation, finite whenever E|Y| is.
  double spread = integrate([&](double y) { return std::abs(y - mean) * law.pdf(y); },
                            law.support_lo, law.support_hi, inner_tol);
  if (!(spread > 0.0)) spread = 1.0;

  double lo = mean - 10.0 * spread, hi = mean + 10.0 * spread;
  if (std::isfinite(law.support_lo)) lo = std::max(lo, law.support_lo);
  if (std::isfinite(law.support_hi)) hi = std::min(hi, law.support_hi);
  double g_lo = g(lo), g_hi = g(hi);
  for (int k = 0; k < 60 && g_lo > 0.0; ++k) {
    hi = lo;
    g_hi = g_lo;
    lo = mean - 2.0 * (mean - hi) - spread;
    if (std::isfinite(law.support_lo)) lo = std::max(lo, law.support_lo);
    g_lo = g(lo);
  }
  for (int k = 0; k < 60 && g_hi < 0.0; ++k) {
    lo = hi;
    g_lo = g_hi;
    hi = mean + (hi - mean) * 2.0 + spread;
    if (std::isfinite(law.support_hi)) hi = std::min(hi, law.support_hi);
    g_hi = g(hi);
  }
  if (!(g_lo <= 0.0 && g_hi >= 0.0)) {
    throw std::runtime_error("true_expectile: root bracketing failed");
  }

  double e = 0.5 * (lo + hi), g_e = g(e);
  for (int it = 0; it < 200; ++it) {
    if (std::abs(g_e) < tol) return e;
    if (g_e > 0.0) {
      hi = e;
      g_hi = g_e;
    } else {
      lo = e;
      g_lo = g_e;
    }
    // Secant step off the bracket endpoints, bisection when it falls outside.
    double cand = (g_hi != g_lo) ? lo - g_lo * (hi - lo) / (g_hi - g_lo) : 0.5 * (lo + hi);
    if (!(cand > lo && cand < hi)) cand = 0.5 * (lo + hi);
    if (hi - lo < 1e-15 * (std::abs(lo) + std::abs(hi) + 1.0)) return cand;
    e = cand;
    g_e = g(e);
  }
  if (std::abs(g_e) < tol) return e;
  throw std::runtime_error("true_expectile: root search did not converge");
}

// Sample tau-expectile: the minimizer of the empirical asymmetric squared
// loss. Stationarity makes it the asymmetric weighted mean
//   e = [(1-tau) sum_{y<=e} y + tau sum_{y>e} y] / [(1-tau) #{y<=e} + tau #{y>e}],
// iterated to a fixed point over the sorted sample.
inline double empirical_expectile(std::vector<double> values, const Asymmetry& asym) {
  if (values.empty()) throw std::invalid_argument("empirical_expectile: empty sample");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + values[i];
  const double tau = asym.tau();
  double e = prefix[n] / static_cast<double>(n);
  for (int it = 0; it < 200; ++it) {
    const std::size_t k =
        std::upper_bound(values.begin(), values.end(), e) - values.begin();
    const double num = (1.0 - tau) * prefix[k] + tau * (prefix[n] - prefix[k]);
    const double den = (1.0 - tau) * static_cast<double>(k) +
                       tau * static_cast<double>(n - k);
    const double e_new = num / den;
    if (std::abs(e_new - e) <= 1e-15 * (std::abs(e) + 1.0)) return e_new;
    e = e_new;
  }
  return e;
}

}  // namespace expectile
