#pragma once

#include <array>

#include <Eigen/Dense>

#include "polarization.hpp"

namespace etpsim {

/// Two photons in path A and two in path B, each pair in one spatiotemporal
/// mode. Component index = 3 * a + b with a, b over {HH, HV, VV}.
struct EtpState {
  Eigen::Matrix<Complex, 9, 1> amp;

  static constexpr int index(int a, int b) { return 3 * a + b; }
  Complex at(int a, int b) const { return amp(index(a, b)); }
};

/// Two independent pairs in distinguishable modes. Qubit order (A1, A2, B1, B2),
/// index = 8*a1 + 4*a2 + 2*b1 + b2 with H = 0, V = 1. Equivalently
/// index = 4 * (local A index) + (local B index).
struct DoubleEopState {
  Eigen::Matrix<Complex, 16, 1> amp;

  static constexpr int index(int a1, int a2, int b1, int b2) {
    return 8 * a1 + 4 * a2 + 2 * b1 + b2;
  }
  Complex at(int a1, int a2, int b1, int b2) const { return amp(index(a1, a2, b1, b2)); }
};

/// One photon pair (A, B) with an optional white-noise admixture:
/// rho = (1 - p)|psi><psi| + p * I/4.
class EopState {
 public:
  /// The singlet (|H>_A|V>_B - |V>_A|H>_B)/sqrt2 with noise fraction p.
  static EopState singlet(double noise = 0.0);
  /// Arbitrary normalized pure pair state (index 2*a + b) with noise fraction p.
  EopState(const Eigen::Vector4cd& pure, double noise);

  const Eigen::Vector4cd& pure() const { return pure_; }
  double noise() const { return noise_; }
  Eigen::Matrix4cd density() const;

 private:
  Eigen::Vector4cd pure_;
  double noise_;
};

/// Source weights: alpha (pure ETP), beta (two independent EOPs), gamma
/// (white noise), and the total four-fold rate c0.
class MixtureModel {
 public:
  /// Throws InputError unless all fractions lie in [0, 1], sum to 1 within
  /// 1e-9, and c0 is finite and non-negative.
  MixtureModel(double c0, double alpha, double beta, double gamma);

  static MixtureModel pure_etp(double c0 = 1.0) { return {c0, 1.0, 0.0, 0.0}; }
  static MixtureModel pure_double_eop(double c0 = 1.0) { return {c0, 0.0, 1.0, 0.0}; }
  static MixtureModel pure_noise(double c0 = 1.0) { return {c0, 0.0, 0.0, 1.0}; }

  double c0() const { return c0_; }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  double gamma() const { return gamma_; }

 private:
  double c0_, alpha_, beta_, gamma_;
};

EtpState make_etp();
DoubleEopState make_double_eop();

struct UnpolarizedDecomposition {
  /// Coefficients on |HV>|HV>, |PM>|PM>, |RL>|RL> (phases of kets::two_pm/two_rl).
  std::array<Complex, 3> coefficients{};
  /// Norm of the component outside their span.
  double residual = 0.0;
};

UnpolarizedDecomposition etp_in_unpolarized_basis(const EtpState& s);

/// Applies la (x) lb to an ETP vector.
EtpState apply_local(const SymmetricUnitary& la, const SymmetricUnitary& lb, const EtpState& s);

}  // namespace etpsim
