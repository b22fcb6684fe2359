#include "ddscope/least_squares.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ddscope/errors.hpp"

namespace ddscope {

std::size_t FitResult::index(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return i;
  }
  throw std::invalid_argument("FitResult: unknown parameter '" + name + "'");
}

double FitResult::param(const std::string& name) const {
  return params[static_cast<Eigen::Index>(index(name))];
}

double FitResult::sigma(const std::string& name) const {
  const auto i = static_cast<Eigen::Index>(index(name));
  const double v = covariance(i, i);
  return v > 0.0 ? std::sqrt(v) : 0.0;
}

namespace {

Eigen::VectorXd clamp_to_box(Eigen::VectorXd p, const Eigen::VectorXd& lo,
                             const Eigen::VectorXd& hi) {
  for (Eigen::Index i = 0; i < p.size(); ++i) p[i] = std::clamp(p[i], lo[i], hi[i]);
  return p;
}

// Central-difference Jacobian; steps shrink one-sided at active bounds.
Eigen::MatrixXd jacobian(const ResidualFn& f, const Eigen::VectorXd& p,
                         const Eigen::VectorXd& r0, const Eigen::VectorXd& lo,
                         const Eigen::VectorXd& hi, double rel_step) {
  const Eigen::Index m = r0.size();
  const Eigen::Index n = p.size();
  Eigen::MatrixXd J(m, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double h = rel_step * std::max(std::abs(p[j]), 1e-8);
    const double up = std::min(p[j] + h, hi[j]);
    const double dn = std::max(p[j] - h, lo[j]);
    Eigen::VectorXd pj = p;
    if (up > dn) {
      pj[j] = up;
      const Eigen::VectorXd r_up = f(pj);
      pj[j] = dn;
      const Eigen::VectorXd r_dn = f(pj);
      J.col(j) = (r_up - r_dn) / (up - dn);
    } else {
      J.col(j).setZero();
    }
  }
  return J;
}

}  // namespace

FitResult lm_least_squares(const ResidualFn& residuals, Eigen::VectorXd init,
                           Eigen::VectorXd lower, Eigen::VectorXd upper,
                           std::vector<std::string> names, const LmOptions& options) {
  const Eigen::Index n = init.size();
  if (lower.size() != n || upper.size() != n ||
      names.size() != static_cast<std::size_t>(n)) {
    throw std::invalid_argument("lm_least_squares: init/bounds/names size mismatch");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (init[i] < lower[i] || init[i] > upper[i]) {
      throw std::invalid_argument("lm_least_squares: init outside bounds for parameter '" +
                                  names[static_cast<std::size_t>(i)] + "'");
    }
  }

  Eigen::VectorXd p = init;
  Eigen::VectorXd r = residuals(p);
  if (!r.allFinite()) {
    throw std::invalid_argument("lm_least_squares: residuals not finite at the start point");
  }
  const Eigen::Index m = r.size();
  if (m < n) throw std::invalid_argument("lm_least_squares: fewer residuals than parameters");
  double cost = r.squaredNorm();

  Eigen::MatrixXd J = jacobian(residuals, p, r, lower, upper, options.fd_step);
  {
    const Eigen::VectorXd col_norms = J.colwise().norm();
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!(col_norms[j] > 0.0)) {
        throw degenerate_fit_error(
            "lm_least_squares: singular normal matrix; parameter '" +
            names[static_cast<std::size_t>(j)] + "' has no effect on the residuals");
      }
    }
  }

  double lambda = options.lambda_init;
  bool converged = false;
  int iter = 0;
  for (; iter < options.max_iterations; ++iter) {
    const Eigen::MatrixXd A = J.transpose() * J;
    const Eigen::VectorXd g = J.transpose() * r;

    bool stepped = false;
    while (lambda <= options.lambda_max) {
      Eigen::MatrixXd damped = A;
      damped.diagonal() += lambda * A.diagonal();
      const Eigen::VectorXd delta = damped.ldlt().solve(-g);
      const Eigen::VectorXd trial = clamp_to_box(p + delta, lower, upper);
      const Eigen::VectorXd r_trial = residuals(trial);
      const double cost_trial = r_trial.allFinite()
                                    ? r_trial.squaredNorm()
                                    : std::numeric_limits<double>::infinity();
      if (cost_trial < cost) {
        const double step_size = (trial - p).norm();
        const double cost_drop = cost - cost_trial;
        p = trial;
        r = r_trial;
        cost = cost_trial;
        lambda = std::max(lambda * 0.1, 1e-12);
        stepped = true;
        if (step_size <= options.step_tol * std::max(p.norm(), 1e-12) ||
            cost_drop <= options.cost_tol * std::max(cost, 1e-300)) {
          converged = true;
        }
        break;
      }
      lambda *= 10.0;
    }
    if (!stepped) {
      // damping exhausted: converged if the projected gradient vanishes,
      // i.e. every remaining descent direction is blocked by an active bound
      double proj_g = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        const bool at_lo = p[i] <= lower[i] + 1e-14 * std::max(std::abs(lower[i]), 1.0);
        const bool at_hi = p[i] >= upper[i] - 1e-14 * std::max(std::abs(upper[i]), 1.0);
        if ((at_lo && g[i] > 0.0) || (at_hi && g[i] < 0.0)) continue;
        proj_g = std::max(proj_g, std::abs(g[i]));
      }
      converged = proj_g <= 1e-8 * std::max(1.0, std::sqrt(cost) * J.norm());
      break;
    }
    if (converged) break;
    J = jacobian(residuals, p, r, lower, upper, options.fd_step);
  }

  J = jacobian(residuals, p, r, lower, upper, options.fd_step);
  const Eigen::MatrixXd A = J.transpose() * J;
  FitResult result;
  result.names = std::move(names);
  result.params = p;
  result.residual_norm = std::sqrt(cost);
  result.n_iterations = iter + 1;
  result.converged = converged;
  const double dof = static_cast<double>(m - n);
  const double scale = dof > 0.0 ? cost / dof : 0.0;
  Eigen::MatrixXd inv = A.ldlt().solve(Eigen::MatrixXd::Identity(n, n));
  if (!inv.allFinite()) inv = Eigen::MatrixXd::Zero(n, n);
  result.covariance = 0.5 * scale * (inv + inv.transpose());
  return result;
}

FitResult lm_least_squares(const ResidualFn& residuals, Eigen::VectorXd init,
                           std::vector<std::string> names, const LmOptions& options) {
  const Eigen::Index n = init.size();
  const double inf = std::numeric_limits<double>::infinity();
  return lm_least_squares(residuals, std::move(init), Eigen::VectorXd::Constant(n, -inf),
                          Eigen::VectorXd::Constant(n, inf), std::move(names), options);
}

}  // namespace ddscope
