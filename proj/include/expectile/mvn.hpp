#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <stdexcept>

#include "expectile/rng.hpp"

namespace expectile {

// Draw from the Gaussian with precision Q and mean Q^{-1} b, using one
// Cholesky factorization Q = L L' (no explicit inverse): the mean solves
// Q mu = b and mu + L^{-T} z has covariance Q^{-1}.
inline Eigen::VectorXd gaussian_draw_from_precision(const Eigen::MatrixXd& Q,
                                                    const Eigen::VectorXd& b,
                                                    SplitMix64& rng) {
  if (Q.rows() != Q.cols() || Q.rows() != b.size()) {
    throw std::invalid_argument("gaussian_draw_from_precision: dimension mismatch");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(Q);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("gaussian_draw_from_precision: precision matrix is not positive definite");
  }
  Eigen::VectorXd z(b.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = draw_normal(rng);
  Eigen::VectorXd mu = llt.solve(b);
  return mu + llt.matrixU().solve(z);
}

}  // namespace expectile
