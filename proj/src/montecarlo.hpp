#pragma once

#include <cstdint>
#include <vector>

#include "measurement.hpp"
#include "states.hpp"

namespace etpsim {

struct ExperimentPlan {
  Scan scan = Scan::fig2a;
  std::vector<double> angles_deg;  // path-B plate angle
  double window_s = 1.0;           // integration time per point
  double rate_scale = 1.0;         // events per second per unit of fringe_rate
  int repetitions = 1;
  std::uint64_t seed = 0;

  /// Throws InputError on an empty grid, non-finite angles, window <= 0,
  /// rate_scale < 0 or repetitions < 1.
  void validate() const;

  /// Evenly spaced grid from start to stop inclusive, in degrees.
  static std::vector<double> grid_deg(double start_deg, double stop_deg, double step_deg);
};

struct CountRecord {
  int repetition = 0;
  int grid_index = 0;
  double angle_deg = 0.0;
  std::uint64_t counts = 0;

  double angle() const;  // radians
  double sigma() const;
};

struct CoincidenceDataset {
  ExperimentPlan plan;
  std::vector<CountRecord> records;  // repetition-major, then grid order
};

/// Poisson-sampled four-fold counts for every (repetition, angle).
CoincidenceDataset run_scan(const MixtureModel& m, const ExperimentPlan& plan);

/// Mean counts at one plate angle (radians): fringe_rate * window * rate_scale.
double expected_counts(const MixtureModel& m, const ExperimentPlan& plan, double angle);

double deg_to_rad(double deg);

enum class DetectorPair { a_plus_b_plus, a_plus_b_minus, a_minus_b_plus, a_minus_b_minus };

/// Two-fold coincidence probability for a single pair: path A analyzed in H/V,
/// path B behind a half-wave plate at `hwp_angle_b`.
double twofold_fringe(const EopState& e, double hwp_angle_b, DetectorPair pair);

struct VisibilityResult {
  double visibility = 0.0;
  double sigma = 0.0;
  bool degenerate = false;  // all counts equal: reported as 0
};

/// (max - min)/(max + min) of a sinusoid fitted to one fringe period.
/// `frequency` is the fringe's angular frequency in the plate angle (4 for a
/// half-wave plate). Requires at least 5 points spanning a full period.
VisibilityResult visibility(const std::vector<double>& angles,
                            const std::vector<double>& counts, double frequency);

}  // namespace etpsim
