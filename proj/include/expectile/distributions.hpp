#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "expectile/rng.hpp"

namespace expectile {

// Asymmetry level tau of an expectile; valid strictly inside (0,1).
class Asymmetry {
 public:
  explicit Asymmetry(double tau) : tau_(tau) {
    if (!(tau > 0.0 && tau < 1.0)) {
      throw std::invalid_argument("Asymmetry: tau must lie in the open interval (0,1)");
    }
  }
  double tau() const { return tau_; }

 private:
  double tau_;
};

// Weight of the asymmetric squared loss: 1-tau on {y <= eta}, tau on {y > eta}.
// The boundary y == eta takes the 1-tau branch.
inline double asymmetric_weight(double y, double eta, const Asymmetry& asym) {
  return (y <= eta) ? 1.0 - asym.tau() : asym.tau();
}

// Asymmetric squared loss sum_i w_tau(y_i, eta_i) (y_i - eta_i)^2 for scalars.
inline double asymmetric_loss_term(double y, double eta, const Asymmetry& asym) {
  const double d = y - eta;
  return asymmetric_weight(y, eta, asym) * d * d;
}

// Parameters of the asymmetric normal distribution: location eta (which is
// the tau-expectile of the distribution), squared scale sigma^2 > 0, and the
// asymmetry level.
struct AsymNormalParams {
  AsymNormalParams(double location_, double scale2_, Asymmetry asym_)
      : location(location_), scale2(scale2_), asym(asym_) {
    if (!(scale2 > 0.0)) {
      throw std::invalid_argument("AsymNormalParams: scale2 must be positive");
    }
  }
  double location;
  double scale2;
  Asymmetry asym;
};

// The density is c * exp(-w_tau(y,eta) (y-eta)^2 / (2 sigma^2)), two Gaussian
// halves with variances sigma^2/(1-tau) (left) and sigma^2/tau (right).
// Integrating the halves gives
//   1/c = sqrt(2 pi sigma^2)/2 * (1/sqrt(1-tau) + 1/sqrt(tau)),
// i.e. c = 2 sqrt(tau(1-tau)) / (sqrt(2 pi sigma^2) (sqrt(tau)+sqrt(1-tau))).
inline double asym_normal_log_const(double scale2, const Asymmetry& asym) {
  const double tau = asym.tau();
  const double st = std::sqrt(tau), so = std::sqrt(1.0 - tau);
  return std::log(2.0) + 0.5 * std::log(tau * (1.0 - tau)) -
         0.5 * std::log(2.0 * M_PI * scale2) - std::log(st + so);
}

inline double asym_normal_log_pdf(double y, const AsymNormalParams& p) {
  const double d = y - p.location;
  const double w = asymmetric_weight(y, p.location, p.asym);
  return asym_normal_log_const(p.scale2, p.asym) - w * d * d / (2.0 * p.scale2);
}

// P(Y <= eta) = sqrt(tau) / (sqrt(tau) + sqrt(1-tau)).
inline double asym_normal_left_mass(const Asymmetry& asym) {
  const double st = std::sqrt(asym.tau()), so = std::sqrt(1.0 - asym.tau());
  return st / (st + so);
}

struct MeanVariance {
  double mean;
  double variance;
};

// Exact moments from the half-Gaussian partial integrals:
//   E[Y-eta]   = sigma sqrt(2/pi) (1-2tau) / ((sqrt(tau)+sqrt(1-tau)) sqrt(tau(1-tau)))
//   E[(Y-eta)^2] = sigma^2 (tau^{-3/2} + (1-tau)^{-3/2}) / (tau^{-1/2} + (1-tau)^{-1/2})
inline MeanVariance asym_normal_moments(const AsymNormalParams& p) {
  const double tau = p.asym.tau();
  const double st = std::sqrt(tau), so = std::sqrt(1.0 - tau);
  const double sigma = std::sqrt(p.scale2);
  const double mean_shift =
      sigma * std::sqrt(2.0 / M_PI) * (1.0 - 2.0 * tau) / ((st + so) * st * so);
  const double second =
      p.scale2 * (1.0 / (tau * st) + 1.0 / ((1.0 - tau) * so)) / (1.0 / st + 1.0 / so);
  return {p.location + mean_shift, second - mean_shift * mean_shift};
}

// i.i.d. draws as a two-component mixture of half-Gaussians; the component
// probabilities are the two sides' probability masses.
inline std::vector<double> asym_normal_sample(const AsymNormalParams& p, std::size_t n,
                                              std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("asym_normal_sample: n must be at least 1");
  SplitMix64 rng(seed);
  const double tau = p.asym.tau();
  const double p_left = asym_normal_left_mass(p.asym);
  const double sd_left = std::sqrt(p.scale2 / (1.0 - tau));
  const double sd_right = std::sqrt(p.scale2 / tau);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double side = rng.next_double();
    const double z = std::abs(draw_normal(rng));
    out[i] = (side < p_left) ? p.location - sd_left * z : p.location + sd_right * z;
  }
  return out;
}

}  // namespace expectile
