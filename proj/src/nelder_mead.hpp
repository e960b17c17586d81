#pragma once

#include <functional>

#include <Eigen/Dense>

namespace etpsim {

struct NelderMeadOptions {
  int max_evaluations = 20000;
  double initial_step = 0.5;
  double f_tolerance = 1e-12;  // spread of simplex values
  double x_tolerance = 1e-10;  // simplex diameter
  /// Re-seed the simplex around the incumbent up to this many times after
  /// convergence; stops early when a restart gains nothing.
  int reinitializations = 4;
};

struct NelderMeadResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int evaluations = 0;
  bool converged = false;
};

/// Minimizes `f` with dimension-adaptive reflection, expansion, contraction
/// and shrink coefficients.
NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                             const Eigen::VectorXd& start, const NelderMeadOptions& options = {});

}  // namespace etpsim
