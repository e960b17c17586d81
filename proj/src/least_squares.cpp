#include "least_squares.hpp"

#include <algorithm>
#include <cmath>

namespace etpsim {

Eigen::MatrixXd numeric_jacobian(const ResidualFunction& f, const Eigen::VectorXd& x) {
  const Eigen::VectorXd f0 = f(x);
  Eigen::MatrixXd jac(f0.size(), x.size());
  Eigen::VectorXd probe = x;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double h = 1e-6 * std::max(1.0, std::abs(x(j)));
    probe(j) = x(j) + h;
    const Eigen::VectorXd up = f(probe);
    probe(j) = x(j) - h;
    const Eigen::VectorXd down = f(probe);
    probe(j) = x(j);
    jac.col(j) = (up - down) / (2.0 * h);
  }
  return jac;
}

LeastSquaresResult levenberg_marquardt(const ResidualFunction& residuals, Eigen::VectorXd start,
                                       const LeastSquaresOptions& options) {
  LeastSquaresResult out;
  out.params = std::move(start);
  Eigen::VectorXd r = residuals(out.params);
  out.chi2 = r.squaredNorm();
  if (!std::isfinite(out.chi2)) return out;

  double damping = options.initial_damping;
  for (out.iterations = 0; out.iterations < options.max_iterations; ++out.iterations) {
    const Eigen::MatrixXd jac = numeric_jacobian(residuals, out.params);
    const Eigen::MatrixXd normal = jac.transpose() * jac;
    const Eigen::VectorXd gradient = jac.transpose() * r;
    if (gradient.lpNorm<Eigen::Infinity>() <= 1e-14 * std::max(1.0, out.chi2)) {
      out.converged = true;
      return out;
    }

    bool stepped = false;
    while (damping < 1e16) {
      Eigen::MatrixXd damped = normal;
      for (Eigen::Index k = 0; k < damped.rows(); ++k) {
        damped(k, k) += damping * std::max(normal(k, k), 1e-12);
      }
      const Eigen::VectorXd step = damped.ldlt().solve(-gradient);
      if (!step.allFinite()) {
        damping *= 10.0;
        continue;
      }
      const Eigen::VectorXd trial = out.params + step;
      const Eigen::VectorXd trial_r = residuals(trial);
      const double trial_chi2 = trial_r.squaredNorm();
      if (std::isfinite(trial_chi2) && trial_chi2 <= out.chi2) {
        const double decrease = out.chi2 - trial_chi2;
        const double step_size = step.norm() / (out.params.norm() + 1e-12);
        out.params = trial;
        r = trial_r;
        out.chi2 = trial_chi2;
        damping = std::max(damping / 10.0, 1e-12);
        stepped = true;
        if (decrease <= options.relative_tolerance * std::max(trial_chi2, 1e-300) ||
            step_size <= options.relative_tolerance || trial_chi2 <= 1e-28) {
          out.converged = true;
          ++out.iterations;
          return out;
        }
        break;
      }
      damping *= 10.0;
    }
    if (!stepped) {
      // No downhill step at any damping: a (numerically) stationary point.
      out.converged = true;
      return out;
    }
  }
  return out;
}

}  // namespace etpsim
