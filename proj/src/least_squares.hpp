#pragma once

#include <functional>

#include <Eigen/Dense>

namespace etpsim {

struct LeastSquaresOptions {
  int max_iterations = 200;
  double relative_tolerance = 1e-12;  // on chi-square decrease and step size
  double initial_damping = 1e-3;
};

struct LeastSquaresResult {
  Eigen::VectorXd params;
  double chi2 = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Weighted residual vector r(u) = (y - model(u)) / sigma.
using ResidualFunction = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// Levenberg-Marquardt with Marquardt's diagonal scaling and a central
/// difference Jacobian. Never throws; inspect `converged`.
LeastSquaresResult levenberg_marquardt(const ResidualFunction& residuals, Eigen::VectorXd start,
                                       const LeastSquaresOptions& options = {});

/// Central-difference Jacobian of `f` at `x`.
Eigen::MatrixXd numeric_jacobian(const ResidualFunction& f, const Eigen::VectorXd& x);

}  // namespace etpsim
