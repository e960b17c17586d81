#pragma once

#include <complex>

#include <Eigen/Dense>

namespace etpsim {

using Complex = std::complex<double>;

inline constexpr double kConstructionTol = 1e-12;
inline constexpr double kComposedTol = 1e-10;

/// Single-photon Jones vector in the {|H>, |V>} basis.
struct PolarizationVector {
  Eigen::Vector2cd amp;

  /// Normalizes (h, v); throws InputError for a zero or non-finite vector.
  static PolarizationVector normalized(Complex h, Complex v);

  Complex h() const { return amp(0); }
  Complex v() const { return amp(1); }
  double norm() const { return amp.norm(); }
};

namespace kets {
PolarizationVector horizontal();
PolarizationVector vertical();
/// |P> = (|H> + |V>)/sqrt2
PolarizationVector diagonal();
/// |M> = (|H> - |V>)/sqrt2
PolarizationVector antidiagonal();
/// |R> = (|H> + i|V>)/sqrt2
PolarizationVector right_circular();
/// |L> = (|H> - i|V>)/sqrt2
PolarizationVector left_circular();
}  // namespace kets

/// 2x2 Jones matrix. Construction does not check unitarity; see is_unitary().
struct SingleUnitary {
  Eigen::Matrix2cd m = Eigen::Matrix2cd::Identity();

  static SingleUnitary identity() { return {}; }

  bool is_unitary(double tol = kConstructionTol) const;
  PolarizationVector apply(const PolarizationVector& p) const { return {m * p.amp}; }
  SingleUnitary adjoint() const { return {m.adjoint()}; }
};

inline SingleUnitary operator*(const SingleUnitary& a, const SingleUnitary& b) {
  return {a.m * b.m};
}

/// Two photons sharing one spatial mode, ordered basis {|HH>, |HV>, |VV>}
/// where |HV> is the normalized symmetric combination.
struct TwoPhotonVector {
  Eigen::Vector3cd amp;

  Complex hh() const { return amp(0); }
  Complex hv() const { return amp(1); }
  Complex vv() const { return amp(2); }
  double norm() const { return amp.norm(); }
};

namespace kets {
TwoPhotonVector two_hh();
TwoPhotonVector two_hv();
TwoPhotonVector two_vv();
/// (|HH> - |VV>)/sqrt2, with the phase used in the unpolarized decomposition.
TwoPhotonVector two_pm();
/// i(|HH> + |VV>)/sqrt2, with the phase used in the unpolarized decomposition.
TwoPhotonVector two_rl();
}  // namespace kets

/// Action of a single-photon unitary on the symmetric two-photon subspace.
struct SymmetricUnitary {
  Eigen::Matrix3cd m = Eigen::Matrix3cd::Identity();

  bool is_unitary(double tol = kComposedTol) const;
  TwoPhotonVector apply(const TwoPhotonVector& v) const { return {m * v.amp}; }
};

inline SymmetricUnitary operator*(const SymmetricUnitary& a, const SymmetricUnitary& b) {
  return {a.m * b.m};
}

enum class WaveplateKind { quarter, half };

/// Retarder with fast axis at `angle` from horizontal:
/// R(angle) * diag(1, i) * R(-angle) for a quarter-wave plate and
/// R(angle) * diag(1, -1) * R(-angle) for a half-wave plate.
SingleUnitary waveplate(WaveplateKind kind, double angle);

/// Spin-1 representation of `u` on {|HH>, |HV>, |VV>}. Throws InputError when
/// `u` is not unitary within 1e-9.
SymmetricUnitary symmetric_lift(const SingleUnitary& u);

/// Normalized symmetrized product of two photons in the same mode. The phase
/// is fixed so that the first non-negligible amplitude is real and positive.
TwoPhotonVector two_photon_product(const PolarizationVector& p, const PolarizationVector& q);

/// Removes the global phase by rotating the largest-magnitude amplitude onto
/// the positive real axis (first index wins among near-equal magnitudes).
Eigen::VectorXcd canonical_phase(const Eigen::VectorXcd& v);

bool equal_up_to_phase(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b,
                       double tol = kComposedTol);

}  // namespace etpsim
