#include <catch2/catch_amalgamated.hpp>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include <expectile/distributions.hpp>
#include <expectile/expectile_oracle.hpp>
#include <expectile/mvn.hpp>
#include <expectile/quadrature.hpp>
#include <expectile/rng.hpp>
#include <expectile/univariate_law.hpp>

#include "support/oracles.hpp"

using namespace expectile;

namespace {

const std::vector<double> kTauGrid = {0.02, 0.05, 0.2, 0.5, 0.8, 0.95, 0.98};
const std::vector<double> kScale2Grid = {0.25, 1.0, 4.0};

double sample_mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_var(const std::vector<double>& v) {
  const double m = sample_mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

}  // namespace

TEST_CASE("asymmetric weight picks the branch by the sign of the residual", "[distributions]") {
  const Asymmetry a(0.3);
  REQUIRE(asymmetric_weight(1.0, 2.0, a) == 0.7);
  REQUIRE(asymmetric_weight(3.0, 2.0, a) == Catch::Approx(0.3));
  REQUIRE(asymmetric_weight(2.0, 2.0, a) == 0.7);  // boundary joins the lower branch
  const Asymmetry half(0.5);
  REQUIRE(asymmetric_weight(-1.0, 0.0, half) == 0.5);
  REQUIRE(asymmetric_weight(1.0, 0.0, half) == 0.5);
  REQUIRE(asymmetric_loss_term(3.0, 1.0, a) == Catch::Approx(0.3 * 4.0));
  REQUIRE(asymmetric_loss_term(0.0, 1.0, a) == Catch::Approx(0.7 * 1.0));
}

TEST_CASE("asymmetry level is validated", "[distributions]") {
  REQUIRE_THROWS_AS(Asymmetry(0.0), std::invalid_argument);
  REQUIRE_THROWS_AS(Asymmetry(1.0), std::invalid_argument);
  REQUIRE_THROWS_AS(Asymmetry(-0.2), std::invalid_argument);
  REQUIRE_THROWS_AS(Asymmetry(std::nan("")), std::invalid_argument);
  REQUIRE_THROWS_AS(AsymNormalParams(0.0, 0.0, Asymmetry(0.5)), std::invalid_argument);
  REQUIRE_THROWS_AS(AsymNormalParams(0.0, -1.0, Asymmetry(0.5)), std::invalid_argument);
}

TEST_CASE("asymmetric normal density integrates to one", "[distributions]") {
  for (double tau : kTauGrid) {
    for (double s2 : kScale2Grid) {
      for (double eta : {-1.0, 0.0, 2.5}) {
        const AsymNormalParams p(eta, s2, Asymmetry(tau));
        auto f = [&](double y) { return std::exp(asym_normal_log_pdf(y, p)); };
        const double mass = integrate(f, kNegInf, eta, 1e-12) + integrate(f, eta, kPosInf, 1e-12);
        REQUIRE(std::abs(mass - 1.0) < 1e-10);
      }
    }
  }
}

TEST_CASE("density at tau one half is a normal with doubled variance", "[distributions]") {
  const AsymNormalParams p(0.7, 1.3, Asymmetry(0.5));
  for (double x = -5.0; x <= 5.0; x += 0.25) {
    const double ref = oracle::norm_pdf((x - 0.7) / std::sqrt(2.0 * 1.3)) / std::sqrt(2.0 * 1.3);
    REQUIRE(std::exp(asym_normal_log_pdf(x, p)) == Catch::Approx(ref).epsilon(1e-12));
  }
}

TEST_CASE("density is continuous across the kink at the location", "[distributions]") {
  for (double tau : {0.05, 0.3, 0.9}) {
    const AsymNormalParams p(1.1, 0.6, Asymmetry(tau));
    const double at = std::exp(asym_normal_log_pdf(1.1, p));
    const double below = std::exp(asym_normal_log_pdf(1.1 - 1e-12, p));
    const double above = std::exp(asym_normal_log_pdf(1.1 + 1e-12, p));
    REQUIRE(std::abs(below - at) < 1e-10 * at);
    REQUIRE(std::abs(above - at) < 1e-10 * at);
  }
}

TEST_CASE("normalizing constant inverts the kernel integral", "[distributions]") {
  for (double tau : {0.02, 0.5, 0.95}) {
    for (double s2 : {0.25, 4.0}) {
      const Asymmetry a(tau);
      auto kernel = [&](double y) {
        return std::exp(-asymmetric_loss_term(y, 0.0, a) / (2.0 * s2));
      };
      const double z = integrate(kernel, kNegInf, 0.0, 1e-12) + integrate(kernel, 0.0, kPosInf, 1e-12);
      REQUIRE(std::exp(asym_normal_log_const(s2, a)) == Catch::Approx(1.0 / z).epsilon(1e-9));
    }
  }
}

TEST_CASE("closed form left mass and moments match quadrature", "[distributions]") {
  for (double tau : kTauGrid) {
    for (double s2 : kScale2Grid) {
      const double eta = 0.7;
      const AsymNormalParams p(eta, s2, Asymmetry(tau));
      auto f = [&](double y) { return std::exp(asym_normal_log_pdf(y, p)); };

      const double left = integrate(f, kNegInf, eta, 1e-12);
      REQUIRE(std::abs(left - asym_normal_left_mass(p.asym)) < 1e-8);

      const double mean = integrate([&](double y) { return y * f(y); }, kNegInf, eta, 1e-12) +
                          integrate([&](double y) { return y * f(y); }, eta, kPosInf, 1e-12);
      auto sq = [&](double y) { return (y - mean) * (y - mean) * f(y); };
      const double var = integrate(sq, kNegInf, eta, 1e-12) + integrate(sq, eta, kPosInf, 1e-12);

      const MeanVariance mv = asym_normal_moments(p);
      REQUIRE(std::abs(mv.mean - mean) < 1e-8);
      REQUIRE(std::abs(mv.variance - var) < 1e-8);
    }
  }
}

TEST_CASE("location is the stationary point of the expected asymmetric loss", "[distributions]") {
  // d/de E w_tau(Y,e)(Y-e)^2 = 0 at e = eta: (1-tau) L(eta) = tau U(eta).
  for (double tau : {0.05, 0.2, 0.8}) {
    const AsymNormalParams p(0.4, 1.7, Asymmetry(tau));
    const UnivariateLaw law = asym_normal_law(p);
    REQUIRE(std::abs(expectile_imbalance(law, p.location, p.asym)) < 1e-9);
  }
}

TEST_CASE("sampler reproduces moments, left mass and the location expectile", "[distributions]") {
  const std::size_t n = 1000000;
  for (double tau : {0.1, 0.5, 0.9}) {
    const AsymNormalParams p(0.9, 1.44, Asymmetry(tau));
    const std::vector<double> y = asym_normal_sample(p, n, 20240901 + static_cast<int>(tau * 100));
    const MeanVariance mv = asym_normal_moments(p);
    const double se_mean = std::sqrt(mv.variance / static_cast<double>(n));
    REQUIRE(std::abs(sample_mean(y) - mv.mean) < 4.5 * se_mean);
    REQUIRE(std::abs(sample_var(y) - mv.variance) / mv.variance < 0.02);

    const double p_left = asym_normal_left_mass(p.asym);
    const double frac =
        static_cast<double>(std::count_if(y.begin(), y.end(),
                                          [&](double v) { return v <= p.location; })) /
        static_cast<double>(n);
    REQUIRE(std::abs(frac - p_left) < 4.5 * std::sqrt(p_left * (1.0 - p_left) / n));

    REQUIRE(std::abs(empirical_expectile(y, p.asym) - p.location) < 6e-3);
  }
}

TEST_CASE("sampler at tau one half agrees with the doubled-variance normal", "[distributions]") {
  const AsymNormalParams p(0.0, 1.0, Asymmetry(0.5));
  const std::vector<double> y = asym_normal_sample(p, 100000, 77);
  auto cdf = [](double x) { return oracle::norm_cdf(x / std::sqrt(2.0)); };
  REQUIRE(oracle::sup_cdf_distance(y, cdf) < 0.008);
}

TEST_CASE("sampling is reproducible from the seed", "[distributions]") {
  const AsymNormalParams p(1.0, 2.0, Asymmetry(0.2));
  const auto a = asym_normal_sample(p, 1000, 42);
  const auto b = asym_normal_sample(p, 1000, 42);
  const auto c = asym_normal_sample(p, 1000, 43);
  REQUIRE(a == b);
  REQUIRE(a != c);
}

TEST_CASE("true expectile solves the analytic balance equations", "[expectile]") {
  const UnivariateLaw std_normal = normal_law(0.0, 1.0);
  REQUIRE(std::abs(true_expectile(std_normal, Asymmetry(0.5))) < 1e-9);
  REQUIRE(std::abs(true_expectile(uniform_law(0.0, 1.0), Asymmetry(0.5)) - 0.5) < 1e-9);

  // roots of (1-tau)(e Phi(e) + phi(e)) = tau (phi(e) - e (1 - Phi(e)))
  REQUIRE(std::abs(true_expectile(std_normal, Asymmetry(0.25)) - -0.43632656379365165) < 1e-8);
  REQUIRE(std::abs(true_expectile(std_normal, Asymmetry(0.9)) - 0.86159211241582867) < 1e-8);
  REQUIRE(std::abs(true_expectile(std_normal, Asymmetry(0.98)) - 1.4781831001042913) < 1e-8);

  // unit exponential: L(e) = e - 1 + exp(-e), U(e) = exp(-e)
  const UnivariateLaw ex = exponential_law(1.0);
  for (double tau : {0.1, 0.5, 0.9}) {
    const double e = true_expectile(ex, Asymmetry(tau));
    const double L = e - 1.0 + std::exp(-e);
    const double U = std::exp(-e);
    REQUIRE(std::abs((1.0 - tau) * L - tau * U) < 1e-9);
  }
  REQUIRE(std::abs(true_expectile(ex, Asymmetry(0.5)) - 1.0) < 1e-9);
}

TEST_CASE("true expectile respects location and scale maps", "[expectile]") {
  const double base = true_expectile(normal_law(0.0, 1.0), Asymmetry(0.9));
  REQUIRE(std::abs(true_expectile(normal_law(0.0, 6.25), Asymmetry(0.9)) - 2.5 * base) < 1e-7);
  REQUIRE(std::abs(true_expectile(normal_law(3.0, 1.0), Asymmetry(0.9)) - (3.0 + base)) < 1e-8);
}

TEST_CASE("true expectile of the asymmetric normal is its location", "[expectile]") {
  const AsymNormalParams p(1.3, 2.25, Asymmetry(0.8));
  REQUIRE(std::abs(true_expectile(asym_normal_law(p), p.asym) - 1.3) < 1e-8);
}

TEST_CASE("expectile curve is strictly increasing in the asymmetry", "[expectile]") {
  const std::vector<double> taus = {0.02, 0.05, 0.1, 0.2, 0.5, 0.8, 0.9, 0.95, 0.98};
  for (const UnivariateLaw& law : {normal_law(0.0, 1.0), exponential_law(1.0)}) {
    double prev = -std::numeric_limits<double>::infinity();
    for (double tau : taus) {
      const double e = true_expectile(law, Asymmetry(tau));
      REQUIRE(e > prev);
      prev = e;
    }
  }
}

TEST_CASE("heavy tailed symmetric law has antisymmetric expectiles", "[expectile]") {
  const UnivariateLaw t2 = student_t_law(2.0);
  REQUIRE(std::abs(true_expectile(t2, Asymmetry(0.5))) < 1e-8);
  const double hi = true_expectile(t2, Asymmetry(0.9));
  const double lo = true_expectile(t2, Asymmetry(0.1));
  REQUIRE(hi > 0.0);
  REQUIRE(std::abs(hi + lo) < 1e-7);
}

TEST_CASE("imbalance function brackets the root with the right signs", "[expectile]") {
  const UnivariateLaw law = normal_law(0.0, 1.0);
  const Asymmetry a(0.7);
  const double e = true_expectile(law, a);
  REQUIRE(expectile_imbalance(law, e - 1.0, a) < 0.0);
  REQUIRE(expectile_imbalance(law, e + 1.0, a) > 0.0);
}

TEST_CASE("empirical expectile minimizes the sample loss", "[expectile]") {
  SplitMix64 rng(555);
  std::vector<double> y(4096);
  for (double& v : y) v = 0.3 * draw_student_t2(rng) + draw_normal(rng);

  const oracle::SortedSample sample(y);
  for (double tau : {0.1, 0.5, 0.9}) {
    const double direct = oracle::golden_section_min(
        [&](double e) { return sample.asymmetric_loss(e, tau); }, sample.min(), sample.max(), 1e-13);
    const double fixed_point = empirical_expectile(y, Asymmetry(tau));
    // value-based search localizes a quadratic minimum to about sqrt(eps)
    REQUIRE(std::abs(direct - fixed_point) < 5e-8);
  }

  // tau one half is the sample mean
  REQUIRE(empirical_expectile(y, Asymmetry(0.5)) ==
          Catch::Approx(sample_mean(y)).epsilon(1e-12));

  // stationarity: the asymmetric residual sum vanishes at the fixed point
  const Asymmetry a(0.8);
  const double e = empirical_expectile(y, a);
  double grad = 0.0;
  for (double v : y) grad += asymmetric_weight(v, e, a) * (v - e);
  REQUIRE(std::abs(grad) < 1e-8 * static_cast<double>(y.size()));
}

TEST_CASE("empirical expectile of a large sample approaches the true one", "[expectile]") {
  SplitMix64 rng(99);
  std::vector<double> y(1000000);
  for (double& v : y) v = draw_normal(rng);
  REQUIRE(std::abs(empirical_expectile(y, Asymmetry(0.9)) - 0.86159211241582867) < 6e-3);
}

TEST_CASE("quadrature integrates finite and infinite ranges", "[quadrature]") {
  REQUIRE(integrate([](double x) { return oracle::norm_pdf(x); }, kNegInf, kPosInf) ==
          Catch::Approx(1.0).epsilon(1e-12));
  REQUIRE(integrate([](double x) { return std::exp(-x); }, 0.0, kPosInf) ==
          Catch::Approx(1.0).epsilon(1e-12));
  REQUIRE(integrate([](double x) { return x * x; }, 0.0, 1.0) ==
          Catch::Approx(1.0 / 3.0).epsilon(1e-13));
  REQUIRE_THROWS_AS(integrate([](double x) { return x; }, 1.0, 1.0), std::invalid_argument);
  REQUIRE_THROWS_AS(integrate([](double x) { return x; }, 2.0, 1.0), std::invalid_argument);
}

TEST_CASE("law factories validate parameters and expose support", "[distributions]") {
  REQUIRE_THROWS_AS(normal_law(0.0, 0.0), std::invalid_argument);
  REQUIRE_THROWS_AS(exponential_law(0.0), std::invalid_argument);
  REQUIRE_THROWS_AS(student_t_law(1.0), std::invalid_argument);
  REQUIRE_THROWS_AS(uniform_law(1.0, 1.0), std::invalid_argument);

  REQUIRE(exponential_law(2.0).pdf(-0.5) == 0.0);
  REQUIRE(exponential_law(2.0).pdf(0.0) == Catch::Approx(2.0));
  const UnivariateLaw u = uniform_law(-1.0, 3.0);
  REQUIRE(u.pdf(0.0) == Catch::Approx(0.25));
  REQUIRE(u.pdf(3.5) == 0.0);
  REQUIRE(normal_law(0.0, 1.0).pdf(0.3) == Catch::Approx(oracle::norm_pdf(0.3)).epsilon(1e-14));
  boost::math::students_t tdist(2.0);
  REQUIRE(student_t_law(2.0).pdf(1.7) == Catch::Approx(boost::math::pdf(tdist, 1.7)).epsilon(1e-12));
}

TEST_CASE("normal quantile matches the reference inverse cdf", "[rng]") {
  boost::math::normal ref(0.0, 1.0);
  for (double p : {1e-300, 1e-12, 1e-9, 1e-4, 0.01, 0.1, 0.3, 0.5, 0.7, 0.9,
                   0.975, 0.99, 0.9999, 1.0 - 1e-9, 1.0 - 1e-12}) {
    const double want = boost::math::quantile(ref, p);
    const double got = normal_quantile(p);
    REQUIRE(std::abs(got - want) <= 1e-12 + 1e-12 * std::abs(want));
  }
  REQUIRE_THROWS_AS(normal_quantile(0.0), std::invalid_argument);
  REQUIRE_THROWS_AS(normal_quantile(1.0), std::invalid_argument);
}

TEST_CASE("generator matches its reference output sequence", "[rng]") {
  SplitMix64 r(0);
  const std::uint64_t a = r.next_u64();
  const std::uint64_t b = r.next_u64();
  const std::uint64_t c = r.next_u64();
  REQUIRE(a == 0xe220a8397b1dcdafull);
  REQUIRE(b == 0x6e789e6aa1b965f4ull);
  REQUIRE(c == 0x06c45d188009454full);
}

TEST_CASE("uniform outputs stay inside their intervals", "[rng]") {
  SplitMix64 r(7);
  for (int i = 0; i < 100000; ++i) {
    const double u = r.next_double();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    const double v = r.next_open();
    REQUIRE(v > 0.0);
    REQUIRE(v < 1.0);
  }
  SplitMix64 r2(8);
  double lo = std::numeric_limits<double>::infinity(), hi = -lo, acc = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double x = draw_uniform(r2, 2.0, 5.0);
    lo = std::min(lo, x);
    hi = std::max(hi, x);
    acc += x;
  }
  REQUIRE(lo >= 2.0);
  REQUIRE(hi < 5.0);
  REQUIRE(std::abs(acc / 100000.0 - 3.5) < 0.02);
}

TEST_CASE("derived seeds separate neighbouring streams", "[rng]") {
  const std::uint64_t base = 12345;
  std::vector<std::uint64_t> seeds = {
      derive_seed(base, 0), derive_seed(base, 1), derive_seed(base, 0, 1),
      derive_seed(base, 0, 0, 1), derive_seed(base + 1, 0), derive_seed(base, 2)};
  std::sort(seeds.begin(), seeds.end());
  REQUIRE(std::adjacent_find(seeds.begin(), seeds.end()) == seeds.end());
  REQUIRE(derive_seed(base, 3, 4, 5) == derive_seed(base, 3, 4, 5));
}

TEST_CASE("exponential and t draws match their laws", "[rng]") {
  SplitMix64 r(31);
  const int n = 200000;
  double acc = 0.0;
  for (int i = 0; i < n; ++i) acc += draw_exponential(r, 2.0);
  REQUIRE(std::abs(acc / n - 0.5) < 4.5 * 0.5 / std::sqrt(static_cast<double>(n)));
  REQUIRE_THROWS_AS(draw_exponential(r, 0.0), std::invalid_argument);

  std::vector<double> t(n);
  for (double& v : t) v = draw_student_t2(r);
  std::sort(t.begin(), t.end());
  const double med = 0.5 * (t[n / 2 - 1] + t[n / 2]);
  REQUIRE(std::abs(med) < 0.01);
  boost::math::students_t tdist(2.0);
  REQUIRE(oracle::sup_cdf_distance(t, [&](double x) { return boost::math::cdf(tdist, x); }) <
          0.006);
}

TEST_CASE("gamma draws pass moment and goodness of fit checks", "[rng]") {
  SplitMix64 r(101);
  const int n = 200000;
  std::vector<double> g(n);
  for (double& v : g) v = draw_gamma(r, 2.5);
  REQUIRE(std::abs(sample_mean(g) - 2.5) < 4.5 * std::sqrt(2.5 / n));
  REQUIRE(std::abs(sample_var(g) - 2.5) / 2.5 < 0.03);

  // shape below one exercises the boosting branch; 20 equiprobable bins
  SplitMix64 r2(102);
  const int m = 100000;
  const int bins = 20;
  std::vector<double> edges(bins - 1);
  for (int k = 1; k < bins; ++k) {
    edges[k - 1] = boost::math::gamma_p_inv(0.5, static_cast<double>(k) / bins);
  }
  std::vector<int> count(bins, 0);
  for (int i = 0; i < m; ++i) {
    const double x = draw_gamma(r2, 0.5);
    const int k = std::upper_bound(edges.begin(), edges.end(), x) - edges.begin();
    ++count[k];
  }
  const double expected = static_cast<double>(m) / bins;
  double chi2 = 0.0;
  for (int k = 0; k < bins; ++k) {
    chi2 += (count[k] - expected) * (count[k] - expected) / expected;
  }
  boost::math::chi_squared chi(bins - 1);
  REQUIRE(chi2 < boost::math::quantile(chi, 0.999));
  REQUIRE_THROWS_AS(draw_gamma(r, 0.0), std::invalid_argument);
}

TEST_CASE("inverse gamma draws match closed form moments", "[rng]") {
  SplitMix64 r(202);
  const int n = 200000;
  std::vector<double> v(n);
  for (double& x : v) x = draw_inverse_gamma(r, 3.0, 2.0);
  // mean rate/(shape-1) = 1, variance rate^2/((shape-1)^2 (shape-2)) = 1
  REQUIRE(std::abs(sample_mean(v) - 1.0) < 4.5 / std::sqrt(static_cast<double>(n)));
  REQUIRE(std::abs(sample_var(v) - 1.0) < 0.15);
  REQUIRE(inverse_gamma_sample(3.0, 2.0, 9) == inverse_gamma_sample(3.0, 2.0, 9));
  REQUIRE(inverse_gamma_sample(3.0, 2.0, 9) != inverse_gamma_sample(3.0, 2.0, 10));
  REQUIRE_THROWS_AS(draw_inverse_gamma(r, 0.0, 1.0), std::invalid_argument);
  REQUIRE_THROWS_AS(draw_inverse_gamma(r, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("precision based gaussian draws have the right mean and covariance", "[mvn]") {
  SplitMix64 r(3030);

  Eigen::MatrixXd q = Eigen::MatrixXd::Identity(2, 2);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(2);
  const int n = 100000;
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(2);
  Eigen::MatrixXd second = Eigen::MatrixXd::Zero(2, 2);
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd x = gaussian_draw_from_precision(q, b, r);
    mean += x;
    second += x * x.transpose();
  }
  mean /= n;
  second /= n;
  REQUIRE(mean.cwiseAbs().maxCoeff() < 4.5 / std::sqrt(static_cast<double>(n)));
  REQUIRE(std::abs(second(0, 0) - 1.0) < 0.03);
  REQUIRE(std::abs(second(1, 1) - 1.0) < 0.03);
  REQUIRE(std::abs(second(0, 1)) < 0.03);

  // precision 4 I, b = (8,8): mean 2, variance 1/4
  q = 4.0 * Eigen::MatrixXd::Identity(2, 2);
  b = Eigen::VectorXd::Constant(2, 8.0);
  mean.setZero();
  double var0 = 0.0;
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd x = gaussian_draw_from_precision(q, b, r);
    mean += x;
    var0 += (x[0] - 2.0) * (x[0] - 2.0);
  }
  mean /= n;
  var0 /= n;
  REQUIRE((mean - Eigen::VectorXd::Constant(2, 2.0)).cwiseAbs().maxCoeff() <
          4.5 * 0.5 / std::sqrt(static_cast<double>(n)));
  REQUIRE(std::abs(var0 - 0.25) < 0.01);
}

TEST_CASE("precision based gaussian draws center on the solved mean", "[mvn]") {
  SplitMix64 seeder(404);
  Eigen::MatrixXd m(5, 5);
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) m(i, j) = draw_normal(seeder);
  }
  const Eigen::MatrixXd q = m.transpose() * m + Eigen::MatrixXd::Identity(5, 5);
  Eigen::VectorXd b(5);
  for (int i = 0; i < 5; ++i) b[i] = draw_normal(seeder);
  const Eigen::VectorXd mu = Eigen::LLT<Eigen::MatrixXd>(q).solve(b);
  const Eigen::MatrixXd cov = q.inverse();

  SplitMix64 r(505);
  const int n = 20000;
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(5);
  for (int i = 0; i < n; ++i) mean += gaussian_draw_from_precision(q, b, r);
  mean /= n;
  for (int i = 0; i < 5; ++i) {
    REQUIRE(std::abs(mean[i] - mu[i]) < 4.5 * std::sqrt(cov(i, i) / n));
  }
}

TEST_CASE("precision based gaussian draws reject invalid inputs", "[mvn]") {
  SplitMix64 r(1);
  Eigen::MatrixXd indef(2, 2);
  indef << 1.0, 2.0, 2.0, 1.0;
  REQUIRE_THROWS_AS(gaussian_draw_from_precision(indef, Eigen::VectorXd::Zero(2), r),
                    std::runtime_error);
  REQUIRE_THROWS_AS(gaussian_draw_from_precision(Eigen::MatrixXd::Identity(2, 2),
                                                 Eigen::VectorXd::Zero(3), r),
                    std::invalid_argument);
}
