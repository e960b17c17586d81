#include "states.hpp"

#include <cmath>

#include "errors.hpp"

namespace etpsim {

namespace {
constexpr double kMixtureTol = 1e-9;
}

EopState::EopState(const Eigen::Vector4cd& pure, double noise) : pure_(pure), noise_(noise) {
  if (!(noise >= 0.0 && noise <= 1.0)) throw InputError("EOP noise fraction must lie in [0, 1]");
  if (!pure.allFinite() || std::abs(pure.norm() - 1.0) > kConstructionTol) {
    throw InputError("EOP pure component must be normalized");
  }
}

EopState EopState::singlet(double noise) {
  const double s = 1.0 / std::sqrt(2.0);
  return {Eigen::Vector4cd(0.0, s, -s, 0.0), noise};
}

Eigen::Matrix4cd EopState::density() const {
  return (1.0 - noise_) * pure_ * pure_.adjoint() + noise_ * Eigen::Matrix4cd::Identity() / 4.0;
}

MixtureModel::MixtureModel(double c0, double alpha, double beta, double gamma)
    : c0_(c0), alpha_(alpha), beta_(beta), gamma_(gamma) {
  if (!std::isfinite(c0) || c0 < 0.0) throw InputError("c0 must be finite and non-negative");
  for (double f : {alpha, beta, gamma}) {
    if (!(f >= 0.0 && f <= 1.0)) throw InputError("mixture fractions must lie in [0, 1]");
  }
  if (std::abs(alpha + beta + gamma - 1.0) > kMixtureTol) {
    throw InputError("mixture fractions must sum to 1");
  }
}

EtpState make_etp() {
  EtpState s;
  s.amp.setZero();
  const double w = 1.0 / std::sqrt(3.0);
  s.amp(EtpState::index(0, 2)) = w;
  s.amp(EtpState::index(1, 1)) = -w;
  s.amp(EtpState::index(2, 0)) = w;
  return s;
}

DoubleEopState make_double_eop() {
  // singlet on (A1, B1) times singlet on (A2, B2)
  const double s = 1.0 / std::sqrt(2.0);
  const double singlet[2][2] = {{0.0, s}, {-s, 0.0}};
  DoubleEopState st;
  for (int a1 = 0; a1 < 2; ++a1)
    for (int a2 = 0; a2 < 2; ++a2)
      for (int b1 = 0; b1 < 2; ++b1)
        for (int b2 = 0; b2 < 2; ++b2)
          st.amp(DoubleEopState::index(a1, a2, b1, b2)) = singlet[a1][b1] * singlet[a2][b2];
  return st;
}

UnpolarizedDecomposition etp_in_unpolarized_basis(const EtpState& s) {
  const std::array<Eigen::Vector3cd, 3> basis = {kets::two_hv().amp, kets::two_pm().amp,
                                                 kets::two_rl().amp};
  UnpolarizedDecomposition out;
  Eigen::Matrix<Complex, 9, 1> projected = Eigen::Matrix<Complex, 9, 1>::Zero();
  for (std::size_t k = 0; k < basis.size(); ++k) {
    Eigen::Matrix<Complex, 9, 1> product;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) product(EtpState::index(a, b)) = basis[k](a) * basis[k](b);
    out.coefficients[k] = product.dot(s.amp);
    projected += out.coefficients[k] * product;
  }
  out.residual = (s.amp - projected).norm();
  return out;
}

EtpState apply_local(const SymmetricUnitary& la, const SymmetricUnitary& lb, const EtpState& s) {
  // Reshape to a 3x3 coefficient matrix M(a, b): (la (x) lb) acts as la * M * lb^T.
  Eigen::Matrix3cd coeff;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) coeff(a, b) = s.at(a, b);
  const Eigen::Matrix3cd out = la.m * coeff * lb.m.transpose();
  EtpState r;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) r.amp(EtpState::index(a, b)) = out(a, b);
  return r;
}

}  // namespace etpsim
