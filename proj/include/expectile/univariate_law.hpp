#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>

#include "expectile/distributions.hpp"
#include "expectile/quadrature.hpp"

namespace expectile {

// A univariate continuous law given by its log-density and support; the
// common currency between the error laws of the simulation scenarios and
// the true-expectile oracle.
struct UnivariateLaw {
  std::string name;
  std::function<double(double)> log_pdf;
  double support_lo = kNegInf;
  double support_hi = kPosInf;
  std::optional<double> exact_mean;

  double pdf(double y) const {
    if (y < support_lo || y > support_hi) return 0.0;
    return std::exp(log_pdf(y));
  }
};

inline UnivariateLaw normal_law(double mu, double scale2) {
  if (!(scale2 > 0.0)) throw std::invalid_argument("normal_law: scale2 must be positive");
  UnivariateLaw law;
  law.name = "normal";
  law.log_pdf = [mu, scale2](double y) {
    const double d = y - mu;
    return -0.5 * std::log(2.0 * M_PI * scale2) - d * d / (2.0 * scale2);
  };
  law.exact_mean = mu;
  return law;
}

inline UnivariateLaw exponential_law(double rate) {
  if (!(rate > 0.0)) throw std::invalid_argument("exponential_law: rate must be positive");
  UnivariateLaw law;
  law.name = "exponential";
  law.log_pdf = [rate](double y) { return std::log(rate) - rate * y; };
  law.support_lo = 0.0;
  law.exact_mean = 1.0 / rate;
  return law;
}

inline UnivariateLaw student_t_law(double df) {
  if (!(df > 1.0)) {
    throw std::invalid_argument("student_t_law: df must exceed 1 for a finite mean");
  }
  UnivariateLaw law;
  law.name = "t";
  const double log_norm = std::lgamma(0.5 * (df + 1.0)) - std::lgamma(0.5 * df) -
                          0.5 * std::log(df * M_PI);
  law.log_pdf = [df, log_norm](double y) {
    return log_norm - 0.5 * (df + 1.0) * std::log1p(y * y / df);
  };
  law.exact_mean = 0.0;
  return law;
}

inline UnivariateLaw uniform_law(double a, double b) {
  if (!(a < b)) throw std::invalid_argument("uniform_law: requires a < b");
  UnivariateLaw law;
  law.name = "uniform";
  const double log_dens = -std::log(b - a);
  law.log_pdf = [log_dens](double) { return log_dens; };
  law.support_lo = a;
  law.support_hi = b;
  law.exact_mean = 0.5 * (a + b);
  return law;
}

inline UnivariateLaw asym_normal_law(const AsymNormalParams& p) {
  UnivariateLaw law;
  law.name = "asymmetric-normal";
  law.log_pdf = [p](double y) { return asym_normal_log_pdf(y, p); };
  law.exact_mean = asym_normal_moments(p).mean;
  return law;
}

}  // namespace expectile
