#include "montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "errors.hpp"
#include "estimator.hpp"
#include "random.hpp"

namespace etpsim {

void ExperimentPlan::validate() const {
  if (angles_deg.empty()) throw InputError("angle grid is empty");
  for (double a : angles_deg)
    if (!std::isfinite(a)) throw InputError("angle grid contains a non-finite angle");
  if (!(std::isfinite(window_s) && window_s > 0.0)) throw InputError("integration window must be > 0");
  if (!(std::isfinite(rate_scale) && rate_scale >= 0.0)) throw InputError("rate scale must be >= 0");
  if (repetitions < 1) throw InputError("repetitions must be >= 1");
}

std::vector<double> ExperimentPlan::grid_deg(double start_deg, double stop_deg, double step_deg) {
  if (!std::isfinite(start_deg) || !std::isfinite(stop_deg) || !std::isfinite(step_deg) ||
      step_deg <= 0.0 || stop_deg < start_deg) {
    throw InputError("grid needs finite start <= stop and step > 0");
  }
  const double span = (stop_deg - start_deg) / step_deg;
  if (span > 1e6) throw InputError("grid has too many points");
  // tolerate rounding so that e.g. 0..180 step 7.5 includes 180
  const auto n = static_cast<int>(std::floor(span + 1e-9)) + 1;
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) out.push_back(start_deg + k * step_deg);
  return out;
}

double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }

double CountRecord::angle() const { return deg_to_rad(angle_deg); }

double CountRecord::sigma() const { return std::sqrt(static_cast<double>(counts)); }

double expected_counts(const MixtureModel& m, const ExperimentPlan& plan, double angle) {
  return fringe_rate(m, plan.scan, angle) * plan.window_s * plan.rate_scale;
}

CoincidenceDataset run_scan(const MixtureModel& m, const ExperimentPlan& plan) {
  plan.validate();
  std::vector<double> means;
  means.reserve(plan.angles_deg.size());
  for (double a : plan.angles_deg) {
    const double mean = expected_counts(m, plan, deg_to_rad(a));
    if (!std::isfinite(mean) || mean > kMaxPoissonMean) {
      throw InputError("Poisson mean beyond representable counts; lower c0, window or rate scale");
    }
    means.push_back(std::max(mean, 0.0));
  }

  CoincidenceDataset out;
  out.plan = plan;
  out.records.reserve(plan.angles_deg.size() * static_cast<std::size_t>(plan.repetitions));
  for (int rep = 0; rep < plan.repetitions; ++rep) {
    for (std::size_t k = 0; k < plan.angles_deg.size(); ++k) {
      RandomStream rng(point_seed(plan.seed, static_cast<std::uint64_t>(rep), k));
      out.records.push_back(
          {rep, static_cast<int>(k), plan.angles_deg[k], sample_poisson(means[k], rng)});
    }
  }
  return out;
}

double twofold_fringe(const EopState& e, double hwp_angle_b, DetectorPair pair) {
  const SingleUnitary ub = waveplate(WaveplateKind::half, hwp_angle_b);
  const bool a_plus = pair == DetectorPair::a_plus_b_plus || pair == DetectorPair::a_plus_b_minus;
  const bool b_plus = pair == DetectorPair::a_plus_b_plus || pair == DetectorPair::a_minus_b_plus;
  // detected B state before the plate: U^dagger |port>
  const Eigen::Vector2cd port_b = b_plus ? kets::horizontal().amp : kets::vertical().amp;
  const Eigen::Vector2cd seen_b = ub.m.adjoint() * port_b;
  const Eigen::Vector2cd seen_a = a_plus ? kets::horizontal().amp : kets::vertical().amp;
  Eigen::Vector4cd joint;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) joint(2 * i + j) = seen_a(i) * seen_b(j);
  const Complex p = joint.dot(e.density() * joint);
  return p.real();
}

VisibilityResult visibility(const std::vector<double>& angles, const std::vector<double>& counts,
                            double frequency) {
  if (angles.size() != counts.size()) throw InputError("angles and counts differ in length");
  if (angles.size() < 5) throw InputError("visibility needs at least 5 points");
  if (!(std::isfinite(frequency) && frequency > 0.0)) throw InputError("frequency must be > 0");
  const auto [lo, hi] = std::minmax_element(angles.begin(), angles.end());
  const double period = 2.0 * std::numbers::pi / frequency;
  const double n = static_cast<double>(angles.size());
  if (*hi - *lo < period * (n - 1.0) / n - 1e-9) {
    throw InputError("visibility points must cover one fringe period");
  }

  VisibilityResult out;
  if (std::all_of(counts.begin(), counts.end(), [&](double c) { return c == counts.front(); })) {
    out.degenerate = true;
    return out;
  }
  FitSpec spec;
  spec.model = FitModel::sinusoid;
  spec.frequency = frequency;
  const FitResult fit = fit_points(Scan::fig2c, angles, counts, spec);
  const double r = fit.r;
  out.visibility = (1.0 - r) / (1.0 + r);
  // dV/dr = -2 / (1 + r)^2
  out.sigma = 2.0 / ((1.0 + r) * (1.0 + r)) * fit.sigma_r;
  return out;
}

}  // namespace etpsim
