#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

namespace ddscope {

struct FitResult {
  std::vector<std::string> names;
  Eigen::VectorXd params;
  Eigen::MatrixXd covariance;
  double residual_norm = 0.0;  // sqrt(sum of squared weighted residuals)
  int n_iterations = 0;
  bool converged = false;

  double param(const std::string& name) const;
  // 1-sigma uncertainty: sqrt of the covariance diagonal.
  double sigma(const std::string& name) const;
  std::size_t index(const std::string& name) const;
};

struct LmOptions {
  int max_iterations = 500;
  double step_tol = 1e-8;        // relative step size
  double cost_tol = 1e-10;       // relative cost change
  double fd_step = 1e-4;         // relative central-difference step
  double lambda_init = 1e-3;
  double lambda_max = 1e14;
};

// Residual map: params -> weighted residuals r_i = (model_i - y_i)/sigma_i.
using ResidualFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

// Damped Gauss-Newton (Levenberg-Marquardt) minimizer of |r(p)|^2 with box
// bounds enforced by step clamping.  The covariance is the inverse normal
// matrix at the optimum scaled by residual_norm^2/(m - n) (zero when m <= n).
// Throws degenerate_fit_error when a parameter has no effect on the
// residuals at the start point; returns converged = false when the iteration
// or damping budget runs out.
FitResult lm_least_squares(const ResidualFn& residuals, Eigen::VectorXd init,
                           Eigen::VectorXd lower, Eigen::VectorXd upper,
                           std::vector<std::string> names, const LmOptions& options = {});

// Convenience overload without bounds.
FitResult lm_least_squares(const ResidualFn& residuals, Eigen::VectorXd init,
                           std::vector<std::string> names, const LmOptions& options = {});

}  // namespace ddscope
