#include <doctest.h>

#include <cmath>
#include <random>

#include "ddscope/errors.hpp"
#include "ddscope/least_squares.hpp"

using namespace ddscope;

TEST_SUITE("least_squares") {

TEST_CASE("linear model is recovered exactly") {
  const std::vector<double> xs = {0.0, 1.0, 2.0, 3.0, 4.0};
  auto residuals = [&](const Eigen::VectorXd& p) {
    Eigen::VectorXd r(5);
    for (int i = 0; i < 5; ++i) r[i] = p[0] * xs[static_cast<std::size_t>(i)] - 3.0 * xs[static_cast<std::size_t>(i)];
    return r;
  };
  Eigen::VectorXd init(1);
  init << 0.5;
  const auto fit = lm_least_squares(residuals, init, {"p"});
  CHECK(fit.converged);
  CHECK(fit.param("p") == doctest::Approx(3.0).epsilon(1e-10));
  CHECK(fit.residual_norm < 1e-10);
}

TEST_CASE("rosenbrock-style ill-conditioned residuals converge to the known minimum") {
  auto residuals = [](const Eigen::VectorXd& p) {
    Eigen::VectorXd r(2);
    r[0] = 10.0 * (p[1] - p[0] * p[0]);
    r[1] = 1.0 - p[0];
    return r;
  };
  Eigen::VectorXd init(2);
  init << -1.2, 1.0;
  const auto fit = lm_least_squares(residuals, init, {"x", "y"});
  CHECK(fit.converged);
  CHECK(fit.params[0] == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(fit.params[1] == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(fit.residual_norm < 1e-7);
}

TEST_CASE("iteration budget exhaustion clears the converged flag") {
  auto residuals = [](const Eigen::VectorXd& p) {
    Eigen::VectorXd r(2);
    r[0] = 10.0 * (p[1] - p[0] * p[0]);
    r[1] = 1.0 - p[0];
    return r;
  };
  Eigen::VectorXd init(2);
  init << -1.2, 1.0;
  LmOptions opt;
  opt.max_iterations = 2;
  const auto fit = lm_least_squares(residuals, init, {"x", "y"}, opt);
  CHECK_FALSE(fit.converged);
}

TEST_CASE("a parameter with no effect raises a degenerate-fit error") {
  auto residuals = [](const Eigen::VectorXd& p) {
    Eigen::VectorXd r(3);
    r[0] = p[0] - 1.0;
    r[1] = p[0] - 2.0;
    r[2] = p[0];
    return r;
  };
  Eigen::VectorXd init(2);
  init << 0.0, 0.0;
  CHECK_THROWS_AS(lm_least_squares(residuals, init, {"used", "unused"}),
                  degenerate_fit_error);
}

TEST_CASE("bounds clamp the solution") {
  auto residuals = [](const Eigen::VectorXd& p) {
    Eigen::VectorXd r(1);
    r[0] = p[0] + 5.0;  // unconstrained minimum at -5
    return r;
  };
  Eigen::VectorXd init(1), lo(1), hi(1);
  init << 1.0;
  lo << 0.0;
  hi << 10.0;
  const auto fit = lm_least_squares(residuals, init, lo, hi, {"p"});
  CHECK(fit.params[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(fit.converged);  // projected gradient vanishes at the active bound
}

TEST_CASE("init outside bounds is rejected") {
  auto residuals = [](const Eigen::VectorXd& p) { return p; };
  Eigen::VectorXd init(1), lo(1), hi(1);
  init << -1.0;
  lo << 0.0;
  hi << 1.0;
  CHECK_THROWS_AS(lm_least_squares(residuals, init, lo, hi, {"p"}), std::invalid_argument);
}

TEST_CASE("covariance scales with the residual scatter") {
  // straight line with noise: the 1-sigma band should match the textbook
  // least-squares estimate to within a factor
  std::mt19937_64 rng(3);
  std::normal_distribution<double> gauss(0.0, 0.1);
  std::vector<double> xs, ys;
  for (int i = 0; i < 50; ++i) {
    xs.push_back(i * 0.1);
    ys.push_back(2.0 * xs.back() + gauss(rng));
  }
  auto residuals = [&](const Eigen::VectorXd& p) {
    Eigen::VectorXd r(static_cast<Eigen::Index>(xs.size()));
    for (std::size_t i = 0; i < xs.size(); ++i) {
      r[static_cast<Eigen::Index>(i)] = p[0] * xs[i] - ys[i];
    }
    return r;
  };
  Eigen::VectorXd init(1);
  init << 1.0;
  const auto fit = lm_least_squares(residuals, init, {"slope"});
  CHECK(fit.converged);
  double sxx = 0.0;
  for (double x : xs) sxx += x * x;
  const double expected_sigma = 0.1 / std::sqrt(sxx);
  CHECK(fit.sigma("slope") == doctest::Approx(expected_sigma).epsilon(0.5));
}

}  // TEST_SUITE
