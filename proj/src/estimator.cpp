#include "estimator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "errors.hpp"
#include "least_squares.hpp"

namespace etpsim {

namespace {

constexpr double kShapeTol = 1e-9;

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }
double logit(double p) { return std::log(p / (1.0 - p)); }

struct FitData {
  std::vector<double> angle;
  std::vector<double> shape;
  Eigen::VectorXd y;
  Eigen::VectorXd sigma;
};

// Maps optimizer coordinates u onto natural parameters and back, and gives
// the model's value and natural-parameter gradient at one point.
class FringeModel {
 public:
  explicit FringeModel(const FitSpec& spec) : spec_(spec) {}

  int free_params() const { return spec_.model == FitModel::mixture_gamma_fixed ? 2 : 3; }

  std::vector<std::string> names() const {
    if (spec_.model == FitModel::sinusoid) return {"offset", "cos_amplitude", "sin_amplitude"};
    return {"c0", "alpha", "beta", "gamma"};
  }

  // Natural free parameters from u.
  Eigen::VectorXd natural(const Eigen::VectorXd& u) const {
    switch (spec_.model) {
      case FitModel::mixture_gamma_fixed:
        return Eigen::Vector2d(std::exp(u(0)), (1.0 - spec_.gamma_fixed) * logistic(u(1)));
      case FitModel::mixture_free_gamma: {
        const double m = std::max({u(1), u(2), 0.0});
        const double ea = std::exp(u(1) - m), eb = std::exp(u(2) - m), eg = std::exp(-m);
        const double z = ea + eb + eg;
        return Eigen::Vector3d(std::exp(u(0)), ea / z, eb / z);
      }
      case FitModel::sinusoid:
        return u;
    }
    return u;
  }

  Eigen::VectorXd unconstrained(const Eigen::VectorXd& theta) const {
    switch (spec_.model) {
      case FitModel::mixture_gamma_fixed:
        return Eigen::Vector2d(std::log(theta(0)), logit(theta(1) / (1.0 - spec_.gamma_fixed)));
      case FitModel::mixture_free_gamma: {
        const double g = 1.0 - theta(1) - theta(2);
        return Eigen::Vector3d(std::log(theta(0)), std::log(theta(1) / g), std::log(theta(2) / g));
      }
      case FitModel::sinusoid:
        return theta;
    }
    return theta;
  }

  double value(const Eigen::VectorXd& theta, double angle, double f) const {
    switch (spec_.model) {
      case FitModel::mixture_gamma_fixed: {
        const double g = spec_.gamma_fixed;
        const double a = theta(1), b = 1.0 - g - a;
        return theta(0) * (a / 3.0 * f + b / 2.0 * (f + 1.0) / 2.0 + g / 4.0);
      }
      case FitModel::mixture_free_gamma: {
        const double a = theta(1), b = theta(2), g = 1.0 - a - b;
        return theta(0) * (a / 3.0 * f + b / 2.0 * (f + 1.0) / 2.0 + g / 4.0);
      }
      case FitModel::sinusoid:
        return theta(0) + theta(1) * std::cos(spec_.frequency * angle) +
               theta(2) * std::sin(spec_.frequency * angle);
    }
    return 0.0;
  }

  Eigen::VectorXd gradient(const Eigen::VectorXd& theta, double angle, double f) const {
    switch (spec_.model) {
      case FitModel::mixture_gamma_fixed: {
        const double g = spec_.gamma_fixed;
        const double base = (1.0 - g) * (f + 1.0) / 4.0 + g / 4.0;
        const double slope = f / 3.0 - (f + 1.0) / 4.0;
        return Eigen::Vector2d(base + theta(1) * slope, theta(0) * slope);
      }
      case FitModel::mixture_free_gamma: {
        const double da = f / 3.0 - 0.25, db = f / 4.0;
        return Eigen::Vector3d(0.25 + theta(1) * da + theta(2) * db, theta(0) * da, theta(0) * db);
      }
      case FitModel::sinusoid:
        return Eigen::Vector3d(1.0, std::cos(spec_.frequency * angle),
                               std::sin(spec_.frequency * angle));
    }
    return {};
  }

  // Natural free parameters -> reported parameter vector.
  Eigen::MatrixXd report_map() const {
    switch (spec_.model) {
      case FitModel::mixture_gamma_fixed: {
        Eigen::MatrixXd t = Eigen::MatrixXd::Zero(4, 2);
        t(0, 0) = 1.0;
        t(1, 1) = 1.0;
        t(2, 1) = -1.0;
        return t;
      }
      case FitModel::mixture_free_gamma: {
        Eigen::MatrixXd t = Eigen::MatrixXd::Zero(4, 3);
        t(0, 0) = t(1, 1) = t(2, 2) = 1.0;
        t(3, 1) = t(3, 2) = -1.0;
        return t;
      }
      case FitModel::sinusoid:
        return Eigen::MatrixXd::Identity(3, 3);
    }
    return {};
  }

  Eigen::VectorXd report_offset() const {
    switch (spec_.model) {
      case FitModel::mixture_gamma_fixed:
        return Eigen::Vector4d(0.0, 0.0, 1.0 - spec_.gamma_fixed, spec_.gamma_fixed);
      case FitModel::mixture_free_gamma:
        return Eigen::Vector4d(0.0, 0.0, 0.0, 1.0);
      case FitModel::sinusoid:
        return Eigen::Vector3d::Zero();
    }
    return {};
  }

  // Weighted linear least squares on the model's linear form; then pushed into
  // the interior of the constraint set.
  Eigen::VectorXd initial_guess(const FitData& d) const {
    const Eigen::Index n = d.y.size();
    const int k = free_params();
    Eigen::MatrixXd design(n, k);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double f = d.shape[static_cast<std::size_t>(i)];
      Eigen::VectorXd row(k);
      switch (spec_.model) {
        case FitModel::mixture_gamma_fixed: {
          const double g = spec_.gamma_fixed;
          row << (1.0 - g) * (f + 1.0) / 4.0 + g / 4.0, f / 3.0 - (f + 1.0) / 4.0;
          break;
        }
        case FitModel::mixture_free_gamma:
          row << 0.25, f / 3.0 - 0.25, f / 4.0;
          break;
        case FitModel::sinusoid:
          row = gradient(Eigen::Vector3d::Zero(), d.angle[static_cast<std::size_t>(i)], f);
          break;
      }
      design.row(i) = row.transpose() / d.sigma(i);
    }
    const Eigen::VectorXd rhs = d.y.cwiseQuotient(d.sigma);
    Eigen::VectorXd lin = design.colPivHouseholderQr().solve(rhs);
    if (spec_.model == FitModel::sinusoid) return lin;

    const double mean_y = d.y.mean();
    const double c0 = lin(0) > 0.0 && std::isfinite(lin(0)) ? lin(0) : std::max(mean_y * 3.0, 1e-3);
    constexpr double eps = 1e-4;
    if (spec_.model == FitModel::mixture_gamma_fixed) {
      const double span = 1.0 - spec_.gamma_fixed;
      const double a = std::clamp(lin(1) / c0, eps * span, (1.0 - eps) * span);
      return Eigen::Vector2d(c0, a);
    }
    double a = std::clamp(lin(1) / c0, eps, 1.0);
    double b = std::clamp(lin(2) / c0, eps, 1.0);
    double g = std::max(1.0 - a - b, eps);
    const double z = a + b + g;
    return Eigen::Vector3d(c0, a / z, b / z);
  }

  const FitSpec& spec() const { return spec_; }

 private:
  FitSpec spec_;
};

double curve_ratio(FitModel model, const Eigen::VectorXd& p) {
  if (model == FitModel::sinusoid) {
    const double amp = std::hypot(p(1), p(2));
    return (p(0) - amp) / (p(0) + amp);
  }
  const double hi = p(1) / 3.0 + p(2) / 2.0 + p(3) / 4.0;
  return (p(2) / 4.0 + p(3) / 4.0) / hi;
}

FitResult fit_data(const FitData& data, const FitSpec& spec) {
  if (spec.model == FitModel::mixture_gamma_fixed &&
      !(spec.gamma_fixed >= 0.0 && spec.gamma_fixed < 1.0)) {
    throw InputError("fixed gamma must lie in [0, 1)");
  }
  if (spec.model == FitModel::sinusoid && !(std::isfinite(spec.frequency) && spec.frequency > 0)) {
    throw InputError("sinusoid frequency must be positive");
  }
  if (spec.max_iterations < 1) throw InputError("iteration budget must be >= 1");
  const FringeModel model(spec);
  const Eigen::Index n = data.y.size();
  if (n < model.free_params() + 2) {
    throw InputError("fit needs at least " + std::to_string(model.free_params() + 2) + " points");
  }
  if (spec.model != FitModel::sinusoid && data.y.maxCoeff() <= 0.0) {
    throw DegeneracyError("no counts to fit");
  }

  const ResidualFunction residuals = [&](const Eigen::VectorXd& u) {
    const Eigen::VectorXd theta = model.natural(u);
    Eigen::VectorXd r(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto k = static_cast<std::size_t>(i);
      r(i) = (data.y(i) - model.value(theta, data.angle[k], data.shape[k])) / data.sigma(i);
    }
    return r;
  };

  const Eigen::VectorXd start = model.unconstrained(model.initial_guess(data));
  LeastSquaresOptions options;
  options.max_iterations = spec.max_iterations;
  const LeastSquaresResult ls = levenberg_marquardt(residuals, start, options);
  const Eigen::VectorXd theta = model.natural(ls.params);
  const Eigen::MatrixXd to_report = model.report_map();
  const Eigen::VectorXd reported = to_report * theta + model.report_offset();
  if (!ls.converged) {
    throw FitError("fit did not converge within " + std::to_string(spec.max_iterations) +
                       " iterations",
                   std::vector<double>(reported.data(), reported.data() + reported.size()));
  }

  // Covariance from the natural-parameter design at the optimum.
  const int k = model.free_params();
  Eigen::MatrixXd design(n, k);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    design.row(i) = model.gradient(theta, data.angle[idx], data.shape[idx]).transpose() / data.sigma(i);
  }
  Eigen::VectorXd col_norm = design.colwise().norm().transpose();
  if (col_norm.minCoeff() <= 0.0) throw DegeneracyError("rank-deficient design: zero column");
  const Eigen::MatrixXd scaled = design * col_norm.cwiseInverse().asDiagonal();
  const Eigen::MatrixXd info_scaled = scaled.transpose() * scaled;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(info_scaled);
  if (eig.eigenvalues().minCoeff() <= 1e-12 * eig.eigenvalues().maxCoeff()) {
    throw DegeneracyError("rank-deficient design: parameters not identifiable from these angles");
  }
  const Eigen::MatrixXd cov_scaled = info_scaled.inverse();
  const Eigen::MatrixXd cov_free =
      col_norm.cwiseInverse().asDiagonal() * cov_scaled * col_norm.cwiseInverse().asDiagonal();

  FitResult out;
  out.model = spec.model;
  out.names = model.names();
  out.params = reported;
  out.covariance = to_report * cov_free * to_report.transpose();
  out.std_errors = out.covariance.diagonal().cwiseMax(0.0).cwiseSqrt();
  out.chi2 = ls.chi2;
  out.dof = static_cast<int>(n) - k;
  out.reduced_chi2 = out.chi2 / out.dof;
  out.iterations = ls.iterations;
  out.frequency = spec.frequency;
  out.gamma_fixed = spec.gamma_fixed;

  out.r = curve_ratio(spec.model, reported);
  Eigen::VectorXd grad(reported.size());
  for (Eigen::Index j = 0; j < reported.size(); ++j) {
    Eigen::VectorXd up = reported, down = reported;
    const double h = 1e-7 * std::max(1.0, std::abs(reported(j)));
    up(j) += h;
    down(j) -= h;
    grad(j) = (curve_ratio(spec.model, up) - curve_ratio(spec.model, down)) / (2.0 * h);
  }
  out.sigma_r = std::sqrt(std::max(0.0, grad.dot(out.covariance * grad)));
  return out;
}

}  // namespace

RatioEstimate estimate_r(std::span<const CoincidenceSummary> experiments) {
  if (experiments.empty()) throw InputError("estimate_r needs at least one experiment");
  double par = 0.0, perp = 0.0, var_par = 0.0, var_perp = 0.0;
  for (const auto& e : experiments) {
    if (!(e.c_parallel >= 0.0 && e.c_perpendicular >= 0.0)) {
      throw InputError("coincidence counts must be non-negative");
    }
    par += e.c_parallel;
    perp += e.c_perpendicular;
    var_par += e.sigma_parallel * e.sigma_parallel;
    var_perp += e.sigma_perpendicular * e.sigma_perpendicular;
  }
  const double n = static_cast<double>(experiments.size());
  const double mean_par = par / n, mean_perp = perp / n;
  if (!(mean_par > 0.0)) throw InputError("C_parallel is zero: ratio r undefined");
  RatioEstimate out;
  out.n_experiments = static_cast<int>(experiments.size());
  out.r = mean_perp / mean_par;
  const double s_par = std::sqrt(var_par) / n, s_perp = std::sqrt(var_perp) / n;
  out.sigma_r = std::hypot(s_perp / mean_par, out.r * s_par / mean_par);
  return out;
}

std::string_view to_string(Verdict v) {
  return v == Verdict::etp_indicated ? "etp_indicated" : "not_indicated";
}

CriterionResult etp_criterion(const RatioEstimate& r) {
  CriterionResult out;
  out.verdict = r.r < 0.5 ? Verdict::etp_indicated : Verdict::not_indicated;
  out.conservative = r.r + 2.0 * r.sigma_r < 0.5;
  return out;
}

AlphaFromR alpha_from_r(double r) {
  if (!std::isfinite(r) || r < 0.0) throw InputError("r must be finite and non-negative");
  if (r > 0.5) return {0.0, true};
  return {(1.0 - 2.0 * r) / (1.0 - 2.0 * r / 3.0), false};
}

double alpha_sigma_from_r(double r, double sigma_r) {
  const double d = 1.0 - 2.0 * r / 3.0;
  return (4.0 / 3.0) / (d * d) * sigma_r;
}

std::pair<double, double> feasible_r_range(double gamma) {
  return {3.0 * gamma / (4.0 - gamma), 1.0 / (2.0 - gamma)};
}

FractionEstimate alpha_beta_with_noise(double r, double gamma, double sigma_r) {
  if (!(gamma >= 0.0 && gamma < 1.0)) throw InputError("gamma must lie in [0, 1)");
  if (!std::isfinite(r) || r < 0.0) throw InputError("r must be finite and non-negative");
  const auto [lo, hi] = feasible_r_range(gamma);
  constexpr double slack = 1e-12;
  if (r < lo - slack || r > hi + slack) {
    throw InfeasibleError("r = " + std::to_string(r) + " is not attainable with gamma = " +
                              std::to_string(gamma) + "; feasible r lies in [" +
                              std::to_string(lo) + ", " + std::to_string(hi) + "]",
                          lo, hi);
  }
  const double span = 1.0 - gamma;
  FractionEstimate out;
  out.gamma = gamma;
  out.alpha = std::clamp((3.0 - 6.0 * r + 3.0 * r * gamma) / (3.0 - 2.0 * r), 0.0, span);
  out.beta = span - out.alpha;
  const double d = 3.0 - 2.0 * r;
  out.sigma_alpha = std::abs(-12.0 + 9.0 * gamma) / (d * d) * sigma_r;
  return out;
}

std::vector<CoincidenceSummary> summaries_from_extrema(const CoincidenceDataset& d) {
  d.plan.validate();
  std::vector<CoincidenceSummary> out;
  for (int rep = 0; rep < d.plan.repetitions; ++rep) {
    double par = 0.0, perp = 0.0;
    int n_par = 0, n_perp = 0;
    for (const auto& rec : d.records) {
      if (rec.repetition != rep) continue;
      const double f = fringe_shape(d.plan.scan, rec.angle());
      if (std::abs(f - 1.0) <= kShapeTol) {
        par += static_cast<double>(rec.counts);
        ++n_par;
      } else if (std::abs(f) <= kShapeTol) {
        perp += static_cast<double>(rec.counts);
        ++n_perp;
      }
    }
    if (n_par == 0 || n_perp == 0) {
      throw InputError("angle grid must contain the fringe maxima and minima of " +
                       std::string(to_string(d.plan.scan)));
    }
    CoincidenceSummary s;
    s.c_parallel = par / n_par;
    s.c_perpendicular = perp / n_perp;
    s.sigma_parallel = std::sqrt(std::max(par, 1.0)) / n_par;
    s.sigma_perpendicular = std::sqrt(std::max(perp, 1.0)) / n_perp;
    out.push_back(s);
  }
  return out;
}

std::string_view to_string(FitModel m) {
  switch (m) {
    case FitModel::mixture_free_gamma: return "mixture_free_gamma";
    case FitModel::mixture_gamma_fixed: return "mixture_gamma_fixed";
    case FitModel::sinusoid: return "sinusoid";
  }
  return "?";
}

FitModel parse_fit_model(std::string_view name) {
  if (name == "mixture_free_gamma") return FitModel::mixture_free_gamma;
  if (name == "mixture_gamma_fixed") return FitModel::mixture_gamma_fixed;
  if (name == "sinusoid") return FitModel::sinusoid;
  throw InputError("unknown fit model '" + std::string(name) + "'");
}

std::optional<MixtureModel> FitResult::mixture() const {
  if (model == FitModel::sinusoid) return std::nullopt;
  // clamp rounding noise at the simplex faces
  const double a = std::clamp(params(1), 0.0, 1.0);
  const double g = std::clamp(params(3), 0.0, 1.0);
  const double b = std::clamp(1.0 - a - g, 0.0, 1.0);
  return MixtureModel(params(0), a, b, g);
}

double FitResult::param(std::string_view name) const {
  for (std::size_t k = 0; k < names.size(); ++k)
    if (names[k] == name) return params(static_cast<Eigen::Index>(k));
  throw InputError("fit has no parameter '" + std::string(name) + "'");
}

double FitResult::std_error(std::string_view name) const {
  for (std::size_t k = 0; k < names.size(); ++k)
    if (names[k] == name) return std_errors(static_cast<Eigen::Index>(k));
  throw InputError("fit has no parameter '" + std::string(name) + "'");
}

double FitResult::evaluate(Scan scan, double angle) const {
  if (model == FitModel::sinusoid) {
    return params(0) + params(1) * std::cos(frequency * angle) +
           params(2) * std::sin(frequency * angle);
  }
  return fringe_rate(*mixture(), scan, angle);
}

FitResult fit_points(Scan scan, std::span<const double> angles, std::span<const double> counts,
                     const FitSpec& spec) {
  if (angles.size() != counts.size()) throw InputError("angles and counts differ in length");
  FitData data;
  data.y.resize(static_cast<Eigen::Index>(counts.size()));
  data.sigma.resize(data.y.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (!std::isfinite(angles[i]) || !std::isfinite(counts[i]) || counts[i] < 0.0) {
      throw InputError("fit input must be finite with non-negative counts");
    }
    data.angle.push_back(angles[i]);
    data.shape.push_back(fringe_shape(scan, angles[i]));
    data.y(static_cast<Eigen::Index>(i)) = counts[i];
    data.sigma(static_cast<Eigen::Index>(i)) = std::sqrt(std::max(counts[i], 1.0));
  }
  return fit_data(data, spec);
}

FitResult fit_fringe(const CoincidenceDataset& d, const FitSpec& spec) {
  std::vector<double> angles, counts;
  angles.reserve(d.records.size());
  counts.reserve(d.records.size());
  for (const auto& rec : d.records) {
    angles.push_back(rec.angle());
    counts.push_back(static_cast<double>(rec.counts));
  }
  return fit_points(d.plan.scan, angles, counts, spec);
}

}  // namespace etpsim
