#include "polarization.hpp"

#include <cmath>

#include "errors.hpp"

namespace etpsim {

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);
const Complex kI{0.0, 1.0};

Eigen::Matrix2cd rotation(double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  Eigen::Matrix2cd r;
  r << c, -s, s, c;
  return r;
}

}  // namespace

PolarizationVector PolarizationVector::normalized(Complex h, Complex v) {
  Eigen::Vector2cd a(h, v);
  const double n = a.norm();
  if (!std::isfinite(n) || n < kConstructionTol) {
    throw InputError("polarization vector must be finite and nonzero");
  }
  return {a / n};
}

namespace kets {
PolarizationVector horizontal() { return {Eigen::Vector2cd(1.0, 0.0)}; }
PolarizationVector vertical() { return {Eigen::Vector2cd(0.0, 1.0)}; }
PolarizationVector diagonal() { return {Eigen::Vector2cd(kInvSqrt2, kInvSqrt2)}; }
PolarizationVector antidiagonal() { return {Eigen::Vector2cd(kInvSqrt2, -kInvSqrt2)}; }
PolarizationVector right_circular() { return {Eigen::Vector2cd(kInvSqrt2, kI * kInvSqrt2)}; }
PolarizationVector left_circular() { return {Eigen::Vector2cd(kInvSqrt2, -kI * kInvSqrt2)}; }

TwoPhotonVector two_hh() { return {Eigen::Vector3cd(1.0, 0.0, 0.0)}; }
TwoPhotonVector two_hv() { return {Eigen::Vector3cd(0.0, 1.0, 0.0)}; }
TwoPhotonVector two_vv() { return {Eigen::Vector3cd(0.0, 0.0, 1.0)}; }
TwoPhotonVector two_pm() { return {Eigen::Vector3cd(kInvSqrt2, 0.0, -kInvSqrt2)}; }
TwoPhotonVector two_rl() { return {Eigen::Vector3cd(kI * kInvSqrt2, 0.0, kI * kInvSqrt2)}; }
}  // namespace kets

bool SingleUnitary::is_unitary(double tol) const {
  if (!m.allFinite()) return false;
  return (m.adjoint() * m - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() <= tol;
}

bool SymmetricUnitary::is_unitary(double tol) const {
  if (!m.allFinite()) return false;
  return (m.adjoint() * m - Eigen::Matrix3cd::Identity()).cwiseAbs().maxCoeff() <= tol;
}

SingleUnitary waveplate(WaveplateKind kind, double angle) {
  if (!std::isfinite(angle)) throw InputError("wave-plate angle must be finite");
  Eigen::Matrix2cd retard = Eigen::Matrix2cd::Zero();
  retard(0, 0) = 1.0;
  retard(1, 1) = kind == WaveplateKind::quarter ? kI : Complex(-1.0, 0.0);
  return {rotation(angle) * retard * rotation(-angle)};
}

SymmetricUnitary symmetric_lift(const SingleUnitary& u) {
  if (!u.is_unitary(1e-9)) throw InputError("symmetric_lift: input is not unitary");
  const Complex a = u.m(0, 0), b = u.m(0, 1), c = u.m(1, 0), d = u.m(1, 1);
  const double s2 = std::sqrt(2.0);
  Eigen::Matrix3cd l;
  // columns: images of |HH>, |HV>, |VV>
  l << a * a, s2 * a * b, b * b,
       s2 * a * c, a * d + b * c, s2 * b * d,
       c * c, s2 * c * d, d * d;
  return {l};
}

TwoPhotonVector two_photon_product(const PolarizationVector& p, const PolarizationVector& q) {
  Eigen::Vector3cd v(p.h() * q.h(), (p.h() * q.v() + p.v() * q.h()) / std::sqrt(2.0),
                     p.v() * q.v());
  const double n = v.norm();
  if (!(n >= kConstructionTol)) {
    throw InternalError("two_photon_product: degenerate symmetrized product");
  }
  v /= n;
  for (int k = 0; k < 3; ++k) {
    if (std::abs(v(k)) > kConstructionTol) {
      v *= std::conj(v(k)) / std::abs(v(k));
      v(k) = std::abs(v(k));
      break;
    }
  }
  return {v};
}

Eigen::VectorXcd canonical_phase(const Eigen::VectorXcd& v) {
  if (v.size() == 0) return v;
  const double top = v.cwiseAbs().maxCoeff();
  if (top == 0.0) return v;
  Eigen::Index pivot = 0;
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    if (std::abs(v(k)) >= top - kConstructionTol) {
      pivot = k;
      break;
    }
  }
  return v * (std::conj(v(pivot)) / std::abs(v(pivot)));
}

bool equal_up_to_phase(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b, double tol) {
  if (a.size() != b.size()) return false;
  // Align b onto a through their overlap; this is insensitive to ties in
  // the largest amplitude, unlike comparing canonical_phase() outputs.
  const Complex overlap = b.dot(a);
  if (std::abs(overlap) < tol) return (a - b).cwiseAbs().maxCoeff() <= tol;
  const Eigen::VectorXcd aligned = b * (overlap / std::abs(overlap));
  return (a - aligned).cwiseAbs().maxCoeff() <= tol;
}

}  // namespace etpsim
