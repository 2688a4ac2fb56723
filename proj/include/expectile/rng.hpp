#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

namespace expectile {

// Finalizer of the SplitMix64 generator (Steele, Lea & Flood 2014).
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// SplitMix64: a counter-based generator. The state is a Weyl sequence
// (counter advanced by the golden-ratio increment) and every output is the
// mix of the current counter value, so streams are identical on any platform
// with 64-bit integers. All randomness in this library flows through
// explicitly seeded instances of this class.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() { return mix64(state_ += 0x9e3779b97f4a7c15ull); }

  // Uniform on [0,1), 53-bit resolution.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on (0,1); never returns an endpoint, safe for quantile transforms.
  double next_open() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

 private:
  std::uint64_t state_;
};

// Deterministic sub-stream seeds: hash the base seed with up to three stream
// identifiers (replication index, tau index, block id, ...).
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a,
                                 std::uint64_t b = 0, std::uint64_t c = 0) {
  std::uint64_t h = base;
  h = mix64(h ^ (0x9e3779b97f4a7c15ull * (a + 1)));
  h = mix64(h ^ (0x9e3779b97f4a7c15ull * (b + 2)));
  h = mix64(h ^ (0x9e3779b97f4a7c15ull * (c + 3)));
  return h;
}

// Standard normal quantile, algorithm AS 241 (Wichura 1988), double precision.
inline double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("normal_quantile: p must lie in (0,1)");
  }
  const double q = p - 0.5;
  double r, num, den;
  if (std::abs(q) <= 0.425) {
    r = 0.180625 - q * q;
    num = (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
              1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
            1.3314166789178437745e2) * r + 3.3871328727963666080e0);
    den = (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
              5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
            4.2313330701600911252e1) * r + 1.0);
    return q * num / den;
  }
  r = (q < 0.0) ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  if (r <= 5.0) {
    r -= 1.6;
    num = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
              3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
            4.63033784615654529590e0) * r + 1.42343711074968357734e0);
    den = (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
              6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
            2.05319162663775882187e0) * r + 1.0);
  } else {
    r -= 5.0;
    num = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
              2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
            5.46378491116411436990e0) * r + 6.65790464350110377720e0);
    den = (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
              1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
            5.99832206555887937690e-1) * r + 1.0);
  }
  const double x = num / den;
  return (q < 0.0) ? -x : x;
}

// Standard normal draw by inversion, so the stream consumes exactly one
// uniform per variate on every platform.
inline double draw_normal(SplitMix64& rng) { return normal_quantile(rng.next_open()); }

inline double draw_uniform(SplitMix64& rng, double a, double b) {
  return a + (b - a) * rng.next_double();
}

// Exponential with the given rate (mean 1/rate), by inversion.
inline double draw_exponential(SplitMix64& rng, double rate) {
  if (!(rate > 0.0)) throw std::invalid_argument("draw_exponential: rate must be positive");
  return -std::log1p(-rng.next_double()) / rate;
}

// Student t with 2 degrees of freedom; the quantile has the closed form
// (2p-1)/sqrt(2p(1-p)).
inline double draw_student_t2(SplitMix64& rng) {
  const double u = rng.next_open();
  return (2.0 * u - 1.0) / std::sqrt(2.0 * u * (1.0 - u));
}

// Gamma(shape, scale 1), Marsaglia-Tsang squeeze; shapes below one use the
// boosting identity G(a) = G(a+1) * U^{1/a}.
inline double draw_gamma(SplitMix64& rng, double shape) {
  if (!(shape > 0.0)) throw std::invalid_argument("draw_gamma: shape must be positive");
  if (shape < 1.0) {
    const double u = rng.next_open();
    return draw_gamma(rng, shape + 1.0) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = draw_normal(rng);
    double v = 1.0 + c * x;
    if (v <= 0.0) continue;
    v = v * v * v;
    const double u = rng.next_open();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

// Inverse gamma IG(shape, rate): density rate^shape/Gamma(shape) *
// x^{-shape-1} exp(-rate/x), mean rate/(shape-1) for shape > 1.
inline double draw_inverse_gamma(SplitMix64& rng, double shape, double rate) {
  if (!(shape > 0.0) || !(rate > 0.0)) {
    throw std::invalid_argument("draw_inverse_gamma: shape and rate must be positive");
  }
  return rate / draw_gamma(rng, shape);
}

// One inverse-gamma draw from a throwaway stream.
inline double inverse_gamma_sample(double shape, double rate, std::uint64_t seed) {
  SplitMix64 rng(seed);
  return draw_inverse_gamma(rng, shape, rate);
}

}  // namespace expectile
