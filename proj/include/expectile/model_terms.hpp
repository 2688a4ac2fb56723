#pragma once

#include <Eigen/Dense>

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace expectile {

// Equidistant B-spline basis: inner_knots interior knots on (lo, hi), the
// boundary knots repeated so the basis is clamped at the domain endpoints.
// The basis has inner_knots + degree + 1 functions.
struct SplineSpec {
  int degree = 3;
  int inner_knots = 20;
  int difference_order = 2;
  double domain_lo = 0.0;
  double domain_hi = 1.0;

  int basis_size() const { return inner_knots + degree + 1; }

  void validate() const {
    if (degree < 0) throw std::invalid_argument("SplineSpec: degree must be >= 0");
    if (inner_knots < 1) throw std::invalid_argument("SplineSpec: inner_knots must be >= 1");
    if (difference_order < 1) {
      throw std::invalid_argument("SplineSpec: difference_order must be >= 1");
    }
    if (!(domain_lo < domain_hi)) {
      throw std::invalid_argument("SplineSpec: degenerate domain");
    }
    if (basis_size() <= difference_order) {
      throw std::invalid_argument("SplineSpec: basis too small for the difference order");
    }
  }
};

namespace detail {

inline std::vector<double> extended_knots(const SplineSpec& spec) {
  const int d = spec.degree, m = spec.inner_knots;
  const double h = (spec.domain_hi - spec.domain_lo) / (m + 1);
  std::vector<double> t;
  t.reserve(m + 2 * (d + 1));
  for (int i = 0; i <= d; ++i) t.push_back(spec.domain_lo);
  for (int j = 1; j <= m; ++j) t.push_back(spec.domain_lo + h * j);
  for (int i = 0; i <= d; ++i) t.push_back(spec.domain_hi);
  return t;
}

}  // namespace detail

// Design matrix of the clamped B-spline basis, one row per evaluation point,
// by the Cox-de Boor recurrence (0/0 terms dropped). The right endpoint is
// closed so the basis sums to one on the whole domain.
inline Eigen::MatrixXd bspline_design(const Eigen::VectorXd& x, const SplineSpec& spec) {
  spec.validate();
  const std::vector<double> t = detail::extended_knots(spec);
  const int K = spec.basis_size();
  const int nk = static_cast<int>(t.size());
  Eigen::MatrixXd design(x.size(), K);
  std::vector<double> level(nk - 1), next(nk - 1);
  for (Eigen::Index r = 0; r < x.size(); ++r) {
    const double v = x[r];
    if (!(v >= spec.domain_lo && v <= spec.domain_hi)) {
      throw std::invalid_argument("bspline_design: value " + std::to_string(v) +
                                  " outside the spline domain");
    }
    for (int j = 0; j + 1 < nk; ++j) {
      const bool closes_domain = v == spec.domain_hi && t[j] < t[j + 1] && t[j + 1] == spec.domain_hi;
      level[j] = (t[j] <= v && v < t[j + 1]) || closes_domain ? 1.0 : 0.0;
    }
    for (int d = 1; d <= spec.degree; ++d) {
      for (int j = 0; j + d + 1 < nk; ++j) {
        double acc = 0.0;
        if (t[j + d] > t[j]) acc += (v - t[j]) / (t[j + d] - t[j]) * level[j];
        if (t[j + d + 1] > t[j + 1]) {
          acc += (t[j + d + 1] - v) / (t[j + d + 1] - t[j + 1]) * level[j + 1];
        }
        next[j] = acc;
      }
      std::swap(level, next);
    }
    for (int j = 0; j < K; ++j) design(r, j) = level[j];
  }
  return design;
}

// D_k' D_k for the k-th order difference operator D_k of shape (K-k) x K;
// its quadratic form is the sum of squared k-th differences, rank K - k.
inline Eigen::MatrixXd difference_penalty(int K, int order) {
  if (order < 1 || K <= order) {
    throw std::invalid_argument("difference_penalty: requires K > order >= 1");
  }
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(K - 1, K);
  for (int i = 0; i + 1 < K; ++i) {
    d(i, i) = -1.0;
    d(i, i + 1) = 1.0;
  }
  for (int k = 2; k <= order; ++k) {
    const int rows = K - k;
    Eigen::MatrixXd step = Eigen::MatrixXd::Zero(rows, d.rows());
    for (int i = 0; i < rows; ++i) {
      step(i, i) = -1.0;
      step(i, i + 1) = 1.0;
    }
    d = (step * d).eval();
  }
  return d.transpose() * d;
}

// Undirected region graph; labels are unique, edges are unordered pairs of
// distinct known labels, stored deduplicated with indices i < j.
class AdjacencyGraph {
 public:
  AdjacencyGraph(std::vector<std::string> labels,
                 const std::vector<std::pair<std::string, std::string>>& edges)
      : labels_(std::move(labels)) {
    if (labels_.empty()) throw std::invalid_argument("AdjacencyGraph: no regions");
    for (int i = 0; i < static_cast<int>(labels_.size()); ++i) {
      if (!index_.emplace(labels_[i], i).second) {
        throw std::invalid_argument("AdjacencyGraph: duplicate region label " + labels_[i]);
      }
    }
    std::set<std::pair<int, int>> seen;
    for (const auto& [a, b] : edges) {
      const int i = index_of(a), j = index_of(b);
      if (i < 0) throw std::invalid_argument("AdjacencyGraph: unknown region " + a);
      if (j < 0) throw std::invalid_argument("AdjacencyGraph: unknown region " + b);
      if (i == j) throw std::invalid_argument("AdjacencyGraph: self-loop at " + a);
      seen.emplace(std::min(i, j), std::max(i, j));
    }
    edges_.assign(seen.begin(), seen.end());
  }

  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }
  int size() const { return static_cast<int>(labels_.size()); }

  int index_of(const std::string& label) const {
    const auto it = index_.find(label);
    return it == index_.end() ? -1 : it->second;
  }

 private:
  std::vector<std::string> labels_;
  std::vector<std::pair<int, int>> edges_;
  std::map<std::string, int> index_;
};

// Graph Laplacian: neighbor counts on the diagonal, -1 per edge. Its
// quadratic form is the sum of squared differences across edges.
inline Eigen::MatrixXd mrf_precision(const AdjacencyGraph& graph) {
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(graph.size(), graph.size());
  for (const auto& [i, j] : graph.edges()) {
    q(i, i) += 1.0;
    q(j, j) += 1.0;
    q(i, j) -= 1.0;
    q(j, i) -= 1.0;
  }
  return q;
}

// Region incidence matrix: one row per observation, a single 1 in the column
// of the observation's region.
inline Eigen::MatrixXd mrf_design(const std::vector<std::string>& regions,
                                  const AdjacencyGraph& graph) {
  Eigen::MatrixXd design = Eigen::MatrixXd::Zero(regions.size(), graph.size());
  for (std::size_t r = 0; r < regions.size(); ++r) {
    const int j = graph.index_of(regions[r]);
    if (j < 0) {
      throw std::invalid_argument("mrf_design: unknown region " + regions[r]);
    }
    design(static_cast<Eigen::Index>(r), j) = 1.0;
  }
  return design;
}

// Rank of a symmetric PSD matrix: eigenvalues above 1e-10 times the largest.
inline int numerical_rank(const Eigen::MatrixXd& sym) {
  if (sym.size() == 0) return 0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
  const double largest = es.eigenvalues().cwiseAbs().maxCoeff();
  if (largest <= 0.0) return 0;
  return static_cast<int>((es.eigenvalues().array() > 1e-10 * largest).count());
}

// One additive predictor component in its working parametrization. The
// transform maps working coefficients back to the raw basis, so a design
// built at new covariate values is raw_design * transform.
struct ModelTerm {
  std::string name;
  Eigen::MatrixXd design;
  Eigen::MatrixXd penalty;
  int penalty_rank = 0;
  bool centered = false;
  Eigen::MatrixXd transform;

  int width() const { return static_cast<int>(design.cols()); }
};

// Reparametrizes a term so its fitted values sum to zero over the observed
// design: with c = 1'B and Z an orthonormal basis of the null space of c,
// the working design is BZ and the penalty Z'KZ. A term whose fitted values
// already sum to zero for every coefficient is returned unchanged, which
// makes the operation idempotent.
inline ModelTerm apply_centering(const ModelTerm& term) {
  const Eigen::RowVectorXd c = term.design.colwise().sum();
  const double scale = term.design.cwiseAbs().maxCoeff() * term.design.rows();
  if (c.norm() <= 1e-12 * (scale + 1.0)) {
    ModelTerm out = term;
    out.centered = true;
    return out;
  }
  const int k = term.width();
  if (k < 2) {
    throw std::invalid_argument("apply_centering: term " + term.name +
                                " has no free direction left after the constraint");
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(c.transpose());
  const Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd z = q.rightCols(k - 1);

  ModelTerm out;
  out.name = term.name;
  out.design = term.design * z;
  out.penalty = z.transpose() * term.penalty * z;
  out.penalty = ((out.penalty + out.penalty.transpose()) / 2.0).eval();
  out.penalty_rank = numerical_rank(out.penalty);
  out.centered = true;
  out.transform = term.transform * z;
  return out;
}

// Unpenalized linear block (a column per covariate).
inline ModelTerm linear_term(const std::string& name, const Eigen::MatrixXd& columns) {
  if (columns.cols() < 1 || columns.rows() < 1) {
    throw std::invalid_argument("linear_term: empty design");
  }
  ModelTerm term;
  term.name = name;
  term.design = columns;
  term.penalty = Eigen::MatrixXd::Zero(columns.cols(), columns.cols());
  term.penalty_rank = 0;
  term.transform = Eigen::MatrixXd::Identity(columns.cols(), columns.cols());
  return term;
}

// Penalized spline: B-spline design with a difference penalty, sum-to-zero
// centered by default for identifiability next to an intercept.
inline ModelTerm pspline_term(const std::string& name, const Eigen::VectorXd& x,
                              const SplineSpec& spec, bool center = true) {
  ModelTerm term;
  term.name = name;
  term.design = bspline_design(x, spec);
  term.penalty = difference_penalty(spec.basis_size(), spec.difference_order);
  term.penalty_rank = spec.basis_size() - spec.difference_order;
  term.transform = Eigen::MatrixXd::Identity(spec.basis_size(), spec.basis_size());
  return center ? apply_centering(term) : term;
}

// Spatial term: region indicators with the graph Laplacian as penalty,
// centered by default.
inline ModelTerm mrf_term(const std::string& name, const std::vector<std::string>& regions,
                          const AdjacencyGraph& graph, bool center = true) {
  ModelTerm term;
  term.name = name;
  term.design = mrf_design(regions, graph);
  term.penalty = mrf_precision(graph);
  term.penalty_rank = numerical_rank(term.penalty);
  term.transform = Eigen::MatrixXd::Identity(graph.size(), graph.size());
  return center ? apply_centering(term) : term;
}

inline Eigen::VectorXd assemble_predictor(const std::vector<ModelTerm>& terms,
                                          const std::vector<Eigen::VectorXd>& coefficients,
                                          double intercept) {
  if (terms.empty()) throw std::invalid_argument("assemble_predictor: no terms");
  if (coefficients.size() != terms.size()) {
    throw std::invalid_argument("assemble_predictor: coefficient block count mismatch");
  }
  Eigen::VectorXd eta = Eigen::VectorXd::Constant(terms.front().design.rows(), intercept);
  for (std::size_t j = 0; j < terms.size(); ++j) {
    if (coefficients[j].size() != terms[j].width()) {
      throw std::invalid_argument("assemble_predictor: coefficient length mismatch for term " +
                                  terms[j].name);
    }
    if (terms[j].design.rows() != eta.size()) {
      throw std::invalid_argument("assemble_predictor: row count mismatch for term " +
                                  terms[j].name);
    }
    eta += terms[j].design * coefficients[j];
  }
  return eta;
}

// Term restricted to a row subset (for cross-validation folds).
inline ModelTerm subset_rows(const ModelTerm& term, const std::vector<int>& rows) {
  ModelTerm out = term;
  out.design.resize(static_cast<Eigen::Index>(rows.size()), term.width());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.design.row(static_cast<Eigen::Index>(i)) = term.design.row(rows[i]);
  }
  return out;
}

}  // namespace expectile
