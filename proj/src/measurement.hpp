#pragma once

#include <optional>
#include <string_view>

#include "polarization.hpp"
#include "states.hpp"

namespace etpsim {

enum class NamedBasis { hv, rl, pm };

std::string_view to_string(NamedBasis b);

/// Wave plates in front of a path's PBS. Beam order: QWP, then HWP, then PBS;
/// the PBS transmits H to D+ and reflects V to D-.
struct AnalyzerSetting {
  bool qwp_present = false;
  double qwp_angle = 0.0;  // radians
  bool hwp_present = false;
  double hwp_angle = 0.0;  // radians

  static AnalyzerSetting hv() { return {}; }
  static AnalyzerSetting rl();
  static AnalyzerSetting pm();
  static AnalyzerSetting named(NamedBasis b);

  /// Jones matrix of the plate chain (HWP * QWP). Throws InputError for
  /// non-finite angles.
  SingleUnitary jones() const;

  /// The named basis this setting realizes exactly, if any.
  std::optional<NamedBasis> named_basis() const;
};

enum class Scan { fig2a, fig2b, fig2c };

std::string_view to_string(Scan s);
/// Throws InputError for anything other than "fig2a", "fig2b", "fig2c".
Scan parse_scan(std::string_view name);

struct ScanSettings {
  AnalyzerSetting a;
  AnalyzerSetting b;
};

/// fig2a: A = H/V, rotating QWP in B.
/// fig2b: A = R/L, QWP fixed at 45 deg then rotating HWP in B.
/// fig2c: A = P/M, rotating HWP in B.
ScanSettings scan_settings(Scan scan, double angle);

/// Normalized fringe shape in [0, 1]: cos^4(2t), cos^2(4t), sin^2(4t).
double fringe_shape(Scan scan, double angle);

using LiftFunction = SymmetricUnitary (*)(const SingleUnitary&);

/// Probability that all four detectors fire for an ETP source.
double fourfold_probability_etp(const EtpState& s, const AnalyzerSetting& a,
                                const AnalyzerSetting& b, LiftFunction lift = &symmetric_lift);

/// Same for two independent pairs: A1, A2 leave by opposite PBS ports and so
/// do B1, B2.
double fourfold_probability_eop2(const DoubleEopState& s, const AnalyzerSetting& a,
                                 const AnalyzerSetting& b);

/// Expected four-fold counts
/// c0 * [alpha/3 f + beta/2 (f + 1)/2 + gamma/4].
double fringe_rate(const MixtureModel& m, Scan scan, double angle);

/// Fringe minimum over maximum, from the closed form
/// (beta/4 + gamma/4) / (alpha/3 + beta/2 + gamma/4).
double ratio_r_analytic(const MixtureModel& m);

enum class Correlation { parallel, perpendicular };

/// Throws InputError when either setting is not one of the named bases.
Correlation classify(const AnalyzerSetting& a, const AnalyzerSetting& b);

struct CoincidenceSummary {
  double c_parallel = 0.0;
  double c_perpendicular = 0.0;
  double sigma_parallel = 0.0;
  double sigma_perpendicular = 0.0;
};

}  // namespace etpsim
