#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "expectile/distributions.hpp"
#include "expectile/model_terms.hpp"
#include "expectile/rng.hpp"

namespace expectile {

inline std::vector<double> default_lambda_grid() {
  std::vector<double> grid(10);
  for (int i = 0; i < 10; ++i) {
    grid[i] = std::pow(10.0, -4.0 + 8.0 * i / 9.0);
  }
  return grid;
}

struct LawsConfig {
  int max_backfit_iterations = 200;
  double convergence_tolerance = 1e-8;  // relative L2 change of the fitted predictor
  std::vector<std::vector<double>> lambda_grid;  // per penalized term; empty = default grid
  int cv_folds = 5;
  std::uint64_t cv_seed = 1;
  bool include_intercept = true;

  void validate() const {
    if (max_backfit_iterations < 1) {
      throw std::invalid_argument("LawsConfig: max_backfit_iterations must be >= 1");
    }
    if (!(convergence_tolerance > 0.0)) {
      throw std::invalid_argument("LawsConfig: convergence_tolerance must be positive");
    }
    if (cv_folds < 2) throw std::invalid_argument("LawsConfig: cv_folds must be >= 2");
    for (const auto& grid : lambda_grid) {
      if (grid.empty()) throw std::invalid_argument("LawsConfig: empty lambda grid");
    }
  }
};

struct LawsFit {
  std::vector<Eigen::VectorXd> coefficients;
  double intercept = 0.0;
  std::vector<double> lambdas;  // one per term, zero for unpenalized blocks
  Eigen::VectorXd fitted;
  Eigen::VectorXd weights;
  bool converged = false;
  int iterations = 0;
};

namespace detail {

inline Eigen::VectorXd loss_weights(const Eigen::VectorXd& y, const Eigen::VectorXd& eta,
                                    const Asymmetry& asym) {
  Eigen::VectorXd w(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) w[i] = asymmetric_weight(y[i], eta[i], asym);
  return w;
}

inline double asymmetric_loss(const Eigen::VectorXd& y, const Eigen::VectorXd& eta,
                              const Asymmetry& asym) {
  double loss = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) loss += asymmetric_loss_term(y[i], eta[i], asym);
  return loss;
}

// Expands the per-penalized-term lambdas to one entry per term.
inline std::vector<double> spread_lambdas(const std::vector<ModelTerm>& terms,
                                          const std::vector<double>& lambdas) {
  std::vector<double> full(terms.size(), 0.0);
  std::size_t used = 0;
  for (std::size_t j = 0; j < terms.size(); ++j) {
    if (terms[j].penalty_rank > 0) {
      if (used >= lambdas.size()) {
        throw std::invalid_argument("iwls_backfit: too few smoothing parameters");
      }
      if (!(lambdas[used] >= 0.0)) {
        throw std::invalid_argument("iwls_backfit: smoothing parameters must be >= 0");
      }
      full[j] = lambdas[used++];
    }
  }
  if (used != lambdas.size()) {
    throw std::invalid_argument("iwls_backfit: too many smoothing parameters");
  }
  return full;
}

}  // namespace detail

// Penalized IWLS backfitting. Each block solves
//   (B_j' W B_j + lambda_j K_j) beta_j = B_j' W (y - eta_{-j})
// with the weights refreshed after every block update; the intercept is the
// weighted mean of its partial residuals, refreshed once per sweep. A sweep
// that increases the asymmetric loss is step-halved back toward the previous
// state. Convergence is a relative L2 change of the predictor below the
// tolerance. `lambdas` holds one value per penalized term, in term order.
inline LawsFit iwls_backfit(const Eigen::VectorXd& y, const std::vector<ModelTerm>& terms,
                            const Asymmetry& asym, const std::vector<double>& lambdas,
                            const LawsConfig& config, const LawsFit* warm_start = nullptr) {
  config.validate();
  const Eigen::Index n = y.size();
  if (n < 1) throw std::invalid_argument("iwls_backfit: empty response");
  for (const ModelTerm& term : terms) {
    if (term.design.rows() != n) {
      throw std::invalid_argument("iwls_backfit: row mismatch for term " + term.name);
    }
  }

  LawsFit fit;
  fit.lambdas = detail::spread_lambdas(terms, lambdas);
  fit.coefficients.resize(terms.size());
  for (std::size_t j = 0; j < terms.size(); ++j) {
    fit.coefficients[j] = Eigen::VectorXd::Zero(terms[j].width());
  }
  fit.intercept = config.include_intercept ? y.mean() : 0.0;
  if (warm_start != nullptr) {
    if (warm_start->coefficients.size() != terms.size()) {
      throw std::invalid_argument("iwls_backfit: warm start shape mismatch");
    }
    fit.coefficients = warm_start->coefficients;
    fit.intercept = config.include_intercept ? warm_start->intercept : 0.0;
  }

  Eigen::VectorXd eta = Eigen::VectorXd::Constant(n, fit.intercept);
  for (std::size_t j = 0; j < terms.size(); ++j) {
    eta += terms[j].design * fit.coefficients[j];
  }
  double prev_loss = detail::asymmetric_loss(y, eta, asym);

  for (int iter = 1; iter <= config.max_backfit_iterations; ++iter) {
    const Eigen::VectorXd eta_old = eta;
    const std::vector<Eigen::VectorXd> coef_old = fit.coefficients;
    const double intercept_old = fit.intercept;

    for (std::size_t j = 0; j < terms.size(); ++j) {
      const Eigen::MatrixXd& b = terms[j].design;
      const Eigen::VectorXd w = detail::loss_weights(y, eta, asym);
      const Eigen::VectorXd partial = y - eta + b * fit.coefficients[j];
      Eigen::MatrixXd a = b.transpose() * w.asDiagonal() * b;
      if (fit.lambdas[j] > 0.0) a += fit.lambdas[j] * terms[j].penalty;
      const Eigen::LLT<Eigen::MatrixXd> llt(a);
      if (llt.info() != Eigen::Success) {
        throw std::runtime_error("iwls_backfit: singular system for term " + terms[j].name);
      }
      const Eigen::VectorXd beta = llt.solve(b.transpose() * w.cwiseProduct(partial));
      eta += b * (beta - fit.coefficients[j]);
      fit.coefficients[j] = beta;
    }

    if (config.include_intercept) {
      const Eigen::VectorXd w = detail::loss_weights(y, eta, asym);
      const Eigen::VectorXd partial = y - eta + Eigen::VectorXd::Constant(n, fit.intercept);
      const double updated = w.dot(partial) / w.sum();
      eta.array() += updated - fit.intercept;
      fit.intercept = updated;
    }

    double loss = detail::asymmetric_loss(y, eta, asym);
    for (int halve = 0; loss > prev_loss && halve < 30; ++halve) {
      for (std::size_t j = 0; j < terms.size(); ++j) {
        fit.coefficients[j] = 0.5 * (coef_old[j] + fit.coefficients[j]);
      }
      fit.intercept = 0.5 * (intercept_old + fit.intercept);
      eta = 0.5 * (eta_old + eta);
      loss = detail::asymmetric_loss(y, eta, asym);
    }
    prev_loss = loss;
    fit.iterations = iter;

    if ((eta - eta_old).norm() <= config.convergence_tolerance * (1.0 + eta_old.norm())) {
      fit.converged = true;
      break;
    }
  }

  fit.fitted = eta;
  fit.weights = detail::loss_weights(y, eta, asym);
  return fit;
}

struct CvResult {
  std::vector<double> chosen;                    // per penalized term
  std::vector<std::vector<double>> candidates;   // every evaluated assignment
  std::vector<double> scores;                    // held-out loss, +inf for failures
  std::vector<std::string> failures;             // empty string when the candidate fit
  int best_index = -1;
};

namespace detail {

inline std::vector<std::vector<int>> cv_folds(Eigen::Index n, int folds, std::uint64_t seed) {
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  SplitMix64 rng(seed);
  for (Eigen::Index i = n - 1; i > 0; --i) {
    const auto j = static_cast<Eigen::Index>(rng.next_u64() % static_cast<std::uint64_t>(i + 1));
    std::swap(order[i], order[j]);
  }
  std::vector<std::vector<int>> out(folds);
  for (int f = 0; f < folds; ++f) {
    const auto lo = static_cast<Eigen::Index>(f) * n / folds;
    const auto hi = static_cast<Eigen::Index>(f + 1) * n / folds;
    out[f].assign(order.begin() + lo, order.begin() + hi);
  }
  return out;
}

inline double cv_score(const Eigen::VectorXd& y, const std::vector<ModelTerm>& terms,
                       const Asymmetry& asym, const std::vector<double>& lambdas,
                       const LawsConfig& config, const std::vector<std::vector<int>>& folds) {
  double score = 0.0;
  std::vector<char> held(y.size(), 0);
  for (const std::vector<int>& test : folds) {
    if (test.empty()) continue;
    std::fill(held.begin(), held.end(), 0);
    for (int i : test) held[i] = 1;
    std::vector<int> train;
    train.reserve(y.size() - test.size());
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      if (!held[i]) train.push_back(static_cast<int>(i));
    }

    std::vector<ModelTerm> train_terms;
    train_terms.reserve(terms.size());
    for (const ModelTerm& term : terms) train_terms.push_back(subset_rows(term, train));
    Eigen::VectorXd y_train(train.size());
    for (std::size_t i = 0; i < train.size(); ++i) y_train[i] = y[train[i]];

    const LawsFit fit = iwls_backfit(y_train, train_terms, asym, lambdas, config);
    for (int i : test) {
      double eta = fit.intercept;
      for (std::size_t j = 0; j < terms.size(); ++j) {
        eta += terms[j].design.row(i).dot(fit.coefficients[j]);
      }
      score += asymmetric_loss_term(y[i], eta, asym);
    }
  }
  return score;
}

}  // namespace detail

// Smoothing-parameter selection by k-fold cross-validation on the held-out
// asymmetric loss. Folds are a seeded random partition. Up to two penalized
// terms are searched over the full grid product; more use coordinate descent
// over the per-term grids. Every evaluated candidate and score is returned.
inline CvResult select_lambda_cv(const Eigen::VectorXd& y, const std::vector<ModelTerm>& terms,
                                 const Asymmetry& asym, const LawsConfig& config) {
  config.validate();
  std::vector<int> penalized;
  for (std::size_t j = 0; j < terms.size(); ++j) {
    if (terms[j].penalty_rank > 0) penalized.push_back(static_cast<int>(j));
  }
  const std::size_t p = penalized.size();

  std::vector<std::vector<double>> grids = config.lambda_grid;
  if (grids.empty()) grids.assign(p, default_lambda_grid());
  if (grids.size() != p) {
    throw std::invalid_argument("select_lambda_cv: need one lambda grid per penalized term");
  }

  const std::vector<std::vector<int>> folds =
      detail::cv_folds(y.size(), config.cv_folds, config.cv_seed);

  CvResult result;
  auto evaluate = [&](const std::vector<double>& candidate) -> double {
    result.candidates.push_back(candidate);
    try {
      const double s = detail::cv_score(y, terms, asym, candidate, config, folds);
      result.scores.push_back(s);
      result.failures.emplace_back();
      return s;
    } catch (const std::exception& err) {
      result.scores.push_back(std::numeric_limits<double>::infinity());
      result.failures.emplace_back(err.what());
      return std::numeric_limits<double>::infinity();
    }
  };

  if (p <= 2) {
    std::vector<double> candidate(p, 0.0);
    if (p == 0) {
      evaluate(candidate);
    } else if (p == 1) {
      for (double l : grids[0]) {
        candidate[0] = l;
        evaluate(candidate);
      }
    } else {
      for (double l0 : grids[0]) {
        for (double l1 : grids[1]) {
          candidate = {l0, l1};
          evaluate(candidate);
        }
      }
    }
  } else {
    std::vector<std::size_t> index(p);
    for (std::size_t t = 0; t < p; ++t) index[t] = grids[t].size() / 2;
    for (int cycle = 0; cycle < 10; ++cycle) {
      bool moved = false;
      for (std::size_t t = 0; t < p; ++t) {
        std::vector<double> candidate(p);
        for (std::size_t u = 0; u < p; ++u) candidate[u] = grids[u][index[u]];
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_i = index[t];
        for (std::size_t i = 0; i < grids[t].size(); ++i) {
          candidate[t] = grids[t][i];
          const double s = evaluate(candidate);
          if (s < best) {
            best = s;
            best_i = i;
          }
        }
        if (best_i != index[t]) {
          index[t] = best_i;
          moved = true;
        }
      }
      if (!moved) break;
    }
  }

  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < result.scores.size(); ++i) {
    if (result.scores[i] < best) {
      best = result.scores[i];
      result.best_index = static_cast<int>(i);
    }
  }
  if (result.best_index < 0) {
    std::string detail = "select_lambda_cv: every candidate failed";
    for (std::size_t i = 0; i < result.failures.size() && i < 3; ++i) {
      detail += "; " + result.failures[i];
    }
    throw std::runtime_error(detail);
  }
  result.chosen = result.candidates[result.best_index];
  return result;
}

// Sandwich covariance of one coefficient block at the fit:
//   H^{-1} (B' W diag(r^2) W B) H^{-1},  H = B' W B + lambda K,
// with r the fitted residuals and W the final loss weights.
inline Eigen::MatrixXd sandwich_cov(const LawsFit& fit, const Eigen::VectorXd& y,
                                    const std::vector<ModelTerm>& terms, int term_index) {
  const ModelTerm& term = terms.at(static_cast<std::size_t>(term_index));
  const Eigen::MatrixXd& b = term.design;
  const Eigen::VectorXd& w = fit.weights;
  const Eigen::VectorXd r = y - fit.fitted;
  Eigen::MatrixXd h = b.transpose() * w.asDiagonal() * b;
  const double lambda = fit.lambdas.at(static_cast<std::size_t>(term_index));
  if (lambda > 0.0) h += lambda * term.penalty;
  const Eigen::LLT<Eigen::MatrixXd> llt(h);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("sandwich_cov: singular curvature for term " + term.name);
  }
  const Eigen::VectorXd meat_diag = w.array().square() * r.array().square();
  const Eigen::MatrixXd meat = b.transpose() * meat_diag.asDiagonal() * b;
  const Eigen::MatrixXd hinv_meat = llt.solve(meat);
  Eigen::MatrixXd cov = llt.solve(hinv_meat.transpose());
  return ((cov + cov.transpose()) / 2.0).eval();
}

struct TermBand {
  Eigen::VectorXd fit;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
};

// Pointwise band for one term evaluated on arbitrary design rows in the
// term's working basis.
inline TermBand band_at(const LawsFit& fit, const Eigen::VectorXd& y,
                        const std::vector<ModelTerm>& terms, int term_index,
                        const Eigen::MatrixXd& rows, double level) {
  if (!(level > 0.0 && level < 1.0)) {
    throw std::invalid_argument("band_at: level must lie in (0,1)");
  }
  const Eigen::MatrixXd cov = sandwich_cov(fit, y, terms, term_index);
  if (rows.cols() != cov.rows()) {
    throw std::invalid_argument("band_at: evaluation rows do not match the term width");
  }
  const double z = normal_quantile(0.5 + level / 2.0);
  TermBand band;
  band.fit = rows * fit.coefficients[static_cast<std::size_t>(term_index)];
  band.lower.resize(rows.rows());
  band.upper.resize(rows.rows());
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    const double quad = rows.row(i).dot(cov * rows.row(i).transpose());
    const double se = std::sqrt(std::max(0.0, quad));
    band.lower[i] = band.fit[i] - z * se;
    band.upper[i] = band.fit[i] + z * se;
  }
  return band;
}

// Bands for every term at its observed design rows. The fit must have
// converged for the asymptotic approximation to apply.
inline std::vector<TermBand> asymptotic_ci(const LawsFit& fit, const Eigen::VectorXd& y,
                                           const std::vector<ModelTerm>& terms, double level) {
  if (!fit.converged) {
    throw std::invalid_argument("asymptotic_ci: fit did not converge");
  }
  std::vector<TermBand> bands;
  bands.reserve(terms.size());
  for (std::size_t j = 0; j < terms.size(); ++j) {
    bands.push_back(band_at(fit, y, terms, static_cast<int>(j), terms[j].design, level));
  }
  return bands;
}

}  // namespace expectile
