#include "measurement.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "errors.hpp"

namespace etpsim {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;
constexpr double kNamedBasisTol = 1e-12;

// True when the plates send the pair of kets onto H and V, in either order.
bool sends_to_hv(const Eigen::Matrix2cd& j, const PolarizationVector& e1,
                 const PolarizationVector& e2) {
  const Eigen::Vector2cd u = j * e1.amp, w = j * e2.amp;
  const bool straight = std::norm(u(0)) >= 1.0 - kNamedBasisTol && std::norm(w(1)) >= 1.0 - kNamedBasisTol;
  const bool swapped = std::norm(u(1)) >= 1.0 - kNamedBasisTol && std::norm(w(0)) >= 1.0 - kNamedBasisTol;
  return straight || swapped;
}

Eigen::Matrix4cd pair_operator(const SingleUnitary& u) {
  Eigen::Matrix4cd k;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int p = 0; p < 2; ++p)
        for (int q = 0; q < 2; ++q) k(2 * i + p, 2 * j + q) = u.m(i, j) * u.m(p, q);
  return k;
}

}  // namespace

std::string_view to_string(NamedBasis b) {
  switch (b) {
    case NamedBasis::hv: return "HV";
    case NamedBasis::rl: return "RL";
    case NamedBasis::pm: return "PM";
  }
  return "?";
}

AnalyzerSetting AnalyzerSetting::rl() { return {true, 45.0 * kDeg, false, 0.0}; }
AnalyzerSetting AnalyzerSetting::pm() { return {false, 0.0, true, 22.5 * kDeg}; }

AnalyzerSetting AnalyzerSetting::named(NamedBasis b) {
  switch (b) {
    case NamedBasis::hv: return hv();
    case NamedBasis::rl: return rl();
    case NamedBasis::pm: return pm();
  }
  return hv();
}

SingleUnitary AnalyzerSetting::jones() const {
  SingleUnitary u = SingleUnitary::identity();
  if (qwp_present) u = waveplate(WaveplateKind::quarter, qwp_angle) * u;
  if (hwp_present) u = waveplate(WaveplateKind::half, hwp_angle) * u;
  return u;
}

std::optional<NamedBasis> AnalyzerSetting::named_basis() const {
  if (!std::isfinite(qwp_angle) || !std::isfinite(hwp_angle)) return std::nullopt;
  const Eigen::Matrix2cd j = jones().m;
  if (sends_to_hv(j, kets::horizontal(), kets::vertical())) return NamedBasis::hv;
  if (sends_to_hv(j, kets::right_circular(), kets::left_circular())) return NamedBasis::rl;
  if (sends_to_hv(j, kets::diagonal(), kets::antidiagonal())) return NamedBasis::pm;
  return std::nullopt;
}

std::string_view to_string(Scan s) {
  switch (s) {
    case Scan::fig2a: return "fig2a";
    case Scan::fig2b: return "fig2b";
    case Scan::fig2c: return "fig2c";
  }
  return "?";
}

Scan parse_scan(std::string_view name) {
  if (name == "fig2a") return Scan::fig2a;
  if (name == "fig2b") return Scan::fig2b;
  if (name == "fig2c") return Scan::fig2c;
  throw InputError("unknown scan '" + std::string(name) + "' (expected fig2a, fig2b or fig2c)");
}

ScanSettings scan_settings(Scan scan, double angle) {
  if (!std::isfinite(angle)) throw InputError("scan angle must be finite");
  switch (scan) {
    case Scan::fig2a: return {AnalyzerSetting::hv(), {true, angle, false, 0.0}};
    case Scan::fig2b: return {AnalyzerSetting::rl(), {true, 45.0 * kDeg, true, angle}};
    case Scan::fig2c: return {AnalyzerSetting::pm(), {false, 0.0, true, angle}};
  }
  throw InputError("unknown scan");
}

double fringe_shape(Scan scan, double angle) {
  switch (scan) {
    // Half-angle forms hit exact zeros at the fringe minima on degree grids.
    case Scan::fig2a: {
      const double c2 = 0.5 * (1.0 + std::cos(4.0 * angle));
      return c2 * c2;
    }
    case Scan::fig2b: return 0.5 * (1.0 + std::cos(8.0 * angle));
    case Scan::fig2c: return 0.5 * (1.0 - std::cos(8.0 * angle));
  }
  throw InputError("unknown scan");
}

double fourfold_probability_etp(const EtpState& s, const AnalyzerSetting& a,
                                const AnalyzerSetting& b, LiftFunction lift) {
  const SymmetricUnitary la = lift(a.jones());
  const SymmetricUnitary lb = lift(b.jones());
  const EtpState out = apply_local(la, lb, s);
  return std::norm(out.at(1, 1));
}

double fourfold_probability_eop2(const DoubleEopState& s, const AnalyzerSetting& a,
                                 const AnalyzerSetting& b) {
  Eigen::Matrix4cd coeff;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) coeff(i, j) = s.amp(4 * i + j);
  const Eigen::Matrix4cd out =
      pair_operator(a.jones()) * coeff * pair_operator(b.jones()).transpose();
  // local indices 1 = (H, V), 2 = (V, H): the two photons took opposite ports
  double p = 0.0;
  for (int i : {1, 2})
    for (int j : {1, 2}) p += std::norm(out(i, j));
  return p;
}

double fringe_rate(const MixtureModel& m, Scan scan, double angle) {
  if (!std::isfinite(angle)) throw InputError("scan angle must be finite");
  const double f = fringe_shape(scan, angle);
  return m.c0() * (m.alpha() / 3.0 * f + m.beta() / 2.0 * (f + 1.0) / 2.0 + m.gamma() / 4.0);
}

double ratio_r_analytic(const MixtureModel& m) {
  const double hi = m.alpha() / 3.0 + m.beta() / 2.0 + m.gamma() / 4.0;
  const double lo = m.beta() / 4.0 + m.gamma() / 4.0;
  if (!(hi > 0.0)) throw InputError("fringe maximum is zero; ratio undefined");
  return lo / hi;
}

Correlation classify(const AnalyzerSetting& a, const AnalyzerSetting& b) {
  const auto na = a.named_basis();
  const auto nb = b.named_basis();
  if (!na || !nb) {
    throw InputError("classify: setting is not a named basis; use the fringe extrema instead");
  }
  return *na == *nb ? Correlation::parallel : Correlation::perpendicular;
}

}  // namespace etpsim
