#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "measurement.hpp"
#include "montecarlo.hpp"

namespace etpsim {

struct RatioEstimate {
  double r = 0.0;
  double sigma_r = 0.0;
  int n_experiments = 0;
};

/// r = mean(C_perp) / mean(C_par) with first-order error propagation from the
/// summaries' sigmas. Throws InputError on an empty list and when the mean
/// C_par is zero (ratio undefined).
RatioEstimate estimate_r(std::span<const CoincidenceSummary> experiments);

enum class Verdict { etp_indicated, not_indicated };

std::string_view to_string(Verdict v);

struct CriterionResult {
  Verdict verdict = Verdict::not_indicated;
  /// r + 2 sigma_r < 1/2 as well.
  bool conservative = false;
};

CriterionResult etp_criterion(const RatioEstimate& r);

struct AlphaFromR {
  double alpha = 0.0;
  /// r > 1/2: outside the pure ETP + double-EOP model, alpha clamped to 0.
  bool out_of_model = false;
};

/// alpha = (1 - 2r) / (1 - 2r/3). Throws InputError for negative or
/// non-finite r.
AlphaFromR alpha_from_r(double r);

/// Delta-method standard error of alpha_from_r at r.
double alpha_sigma_from_r(double r, double sigma_r);

struct FractionEstimate {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double sigma_alpha = 0.0;
};

/// Interval of r reachable with alpha, beta >= 0 and alpha + beta = 1 - gamma:
/// [3 gamma / (4 - gamma), 1 / (2 - gamma)].
std::pair<double, double> feasible_r_range(double gamma);

/// Solves r = (beta + gamma)/4 / (alpha/3 + beta/2 + gamma/4) with
/// alpha + beta = 1 - gamma. Throws InputError for gamma outside [0, 1) and
/// InfeasibleError when r lies outside feasible_r_range(gamma).
FractionEstimate alpha_beta_with_noise(double r, double gamma, double sigma_r = 0.0);

/// One CoincidenceSummary per repetition, from grid points sitting exactly on
/// the fringe maxima (C_par, shape 1) and minima (C_perp, shape 0). Each side
/// is the mean over its points; sigma from the Poisson variance of the sum.
/// Throws InputError when the grid hits no maximum or no minimum.
std::vector<CoincidenceSummary> summaries_from_extrema(const CoincidenceDataset& d);

enum class FitModel { mixture_free_gamma, mixture_gamma_fixed, sinusoid };

std::string_view to_string(FitModel m);
FitModel parse_fit_model(std::string_view name);

struct FitSpec {
  FitModel model = FitModel::mixture_gamma_fixed;
  double gamma_fixed = 0.0;  // mixture_gamma_fixed only
  double frequency = 4.0;    // sinusoid only: angular frequency in the plate angle
  int max_iterations = 200;
};

struct FitResult {
  FitModel model = FitModel::mixture_gamma_fixed;
  /// Natural parameters: (c0, alpha, beta, gamma) for the mixtures,
  /// (offset, cos_amplitude, sin_amplitude) for the sinusoid.
  std::vector<std::string> names;
  Eigen::VectorXd params;
  Eigen::VectorXd std_errors;
  Eigen::MatrixXd covariance;
  double chi2 = 0.0;
  int dof = 0;
  double reduced_chi2 = 0.0;
  int iterations = 0;
  double frequency = 4.0;
  double gamma_fixed = 0.0;
  /// Curve minimum over maximum and its delta-method error.
  double r = 0.0;
  double sigma_r = 0.0;

  std::optional<MixtureModel> mixture() const;
  double param(std::string_view name) const;
  double std_error(std::string_view name) const;
  /// Evaluates the fitted curve at `angle` for the given scan.
  double evaluate(Scan scan, double angle) const;
};

/// Weighted least squares (sigma = sqrt(max(count, 1))) over every record of
/// the dataset. Mixture fractions stay inside the simplex through a logistic
/// (gamma fixed) or softmax (gamma free) reparameterization; covariance is
/// reported for the natural parameters. Throws InputError with too few
/// points, FitError when the iteration budget runs out and DegeneracyError
/// for a rank-deficient design.
FitResult fit_fringe(const CoincidenceDataset& d, const FitSpec& spec);

/// Same on bare (angle, count) pairs.
FitResult fit_points(Scan scan, std::span<const double> angles, std::span<const double> counts,
                     const FitSpec& spec);

}  // namespace etpsim
