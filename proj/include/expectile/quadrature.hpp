#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace expectile {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kPosInf = std::numeric_limits<double>::infinity();

// Adaptive Gauss-Kronrod integration over (a, b); either bound may be
// infinite (the backend transforms infinite ranges onto a finite interval).
template <class F>
double integrate(F&& f, double a, double b, double tol = 1e-10) {
  if (!(a < b)) throw std::invalid_argument("integrate: empty interval");
  double error = 0.0;
  const double q = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      std::forward<F>(f), a, b, /*max_depth=*/15, tol, &error);
  return q;
}

}  // namespace expectile
