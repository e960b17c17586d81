#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "errors.hpp"
#include "polarization.hpp"
#include "random.hpp"
#include "validation.hpp"

using namespace etpsim;

namespace {

constexpr double kPi = std::numbers::pi;
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST(Kets, NamedStatesHaveExpectedAmplitudes) {
  EXPECT_NEAR(std::abs(kets::horizontal().h() - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(kets::vertical().v() - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(kets::diagonal().v() - kInvSqrt2), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(kets::antidiagonal().v() + kInvSqrt2), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(kets::right_circular().v() - Complex(0, kInvSqrt2)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(kets::left_circular().v() - Complex(0, -kInvSqrt2)), 0.0, 1e-15);
}

TEST(Kets, NormalizedRejectsZeroAndNonFinite) {
  EXPECT_THROW(PolarizationVector::normalized(0.0, 0.0), InputError);
  EXPECT_THROW(PolarizationVector::normalized(std::nan(""), 1.0), InputError);
  const auto p = PolarizationVector::normalized(3.0, Complex(0, 4.0));
  EXPECT_NEAR(p.norm(), 1.0, 1e-15);
}

TEST(Waveplate, HalfWaveAt22p5MapsHorizontalToDiagonal) {
  const auto out = waveplate(WaveplateKind::half, kPi / 8).apply(kets::horizontal());
  EXPECT_TRUE(equal_up_to_phase(out.amp, kets::diagonal().amp));
}

TEST(Waveplate, HalfWaveAt45SwapsHorizontalAndVertical) {
  const auto out = waveplate(WaveplateKind::half, kPi / 4).apply(kets::horizontal());
  EXPECT_TRUE(equal_up_to_phase(out.amp, kets::vertical().amp));
}

TEST(Waveplate, QuarterWaveAt45MakesCircularLight) {
  const SingleUnitary q = waveplate(WaveplateKind::quarter, kPi / 4);
  EXPECT_TRUE(equal_up_to_phase(q.apply(kets::horizontal()).amp, kets::left_circular().amp));
  // The analyzer maps |R> onto the transmitted port.
  EXPECT_TRUE(equal_up_to_phase(q.adjoint().apply(kets::horizontal()).amp,
                                kets::right_circular().amp));
}

TEST(Waveplate, ZeroAngleIsDiagonal) {
  const SingleUnitary h = waveplate(WaveplateKind::half, 0.0);
  EXPECT_LT(max_abs(h.m - Eigen::Vector2cd(1.0, -1.0).asDiagonal().toDenseMatrix()), 1e-15);
}

TEST(Waveplate, RejectsNonFiniteAngle) {
  EXPECT_THROW(waveplate(WaveplateKind::quarter, INFINITY), InputError);
  EXPECT_THROW(waveplate(WaveplateKind::half, std::nan("")), InputError);
}

TEST(Waveplate, UnitaryForRandomAngles) {
  RandomStream rng(11);
  for (int k = 0; k < 1000; ++k) {
    const double a = 4 * kPi * (rng.uniform() - 0.5);
    EXPECT_TRUE(waveplate(WaveplateKind::quarter, a).is_unitary(kConstructionTol));
    EXPECT_TRUE(waveplate(WaveplateKind::half, a).is_unitary(kConstructionTol));
  }
}

TEST(Waveplate, HalfWaveIsPeriodicInPi) {
  for (double a : {0.1, 0.7, 2.0}) {
    EXPECT_LT(max_abs(waveplate(WaveplateKind::half, a).m -
                      waveplate(WaveplateKind::half, a + kPi).m),
              1e-14);
  }
}

TEST(SymmetricLift, IdentityMapsToIdentity) {
  EXPECT_LT(max_abs(symmetric_lift(SingleUnitary::identity()).m - Eigen::Matrix3cd::Identity()),
            1e-15);
}

TEST(SymmetricLift, HalfWaveAt45ExchangesHHAndVV) {
  const SymmetricUnitary l = symmetric_lift(waveplate(WaveplateKind::half, kPi / 4));
  EXPECT_TRUE(equal_up_to_phase(l.apply(kets::two_hh()).amp, kets::two_vv().amp));
  EXPECT_TRUE(equal_up_to_phase(l.apply(kets::two_hv()).amp, kets::two_hv().amp));
}

TEST(SymmetricLift, MatchesProductOfLiftedPhotons) {
  RandomStream rng(5);
  for (int k = 0; k < 200; ++k) {
    const SingleUnitary u = random_unitary(rng);
    const auto p = PolarizationVector::normalized(Complex(rng.uniform(), rng.uniform()),
                                                  Complex(rng.uniform(), -rng.uniform()));
    const auto q = PolarizationVector::normalized(Complex(-rng.uniform(), rng.uniform()),
                                                  Complex(rng.uniform(), rng.uniform()));
    const auto lhs = symmetric_lift(u).apply(two_photon_product(p, q));
    const auto rhs = two_photon_product(u.apply(p), u.apply(q));
    EXPECT_TRUE(equal_up_to_phase(lhs.amp, rhs.amp, 1e-10));
  }
}

TEST(SymmetricLift, RejectsNonUnitaryInput) {
  SingleUnitary u;
  u.m(0, 0) = 1.1;
  EXPECT_THROW(symmetric_lift(u), InputError);
}

TEST(SymmetricLiftProperty, HomomorphismOverRandomPairs) {
  RandomStream rng(2024);
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const SingleUnitary u = random_unitary(rng), v = random_unitary(rng);
    worst = std::max(worst, max_abs(symmetric_lift(u * v).m -
                                    (symmetric_lift(u) * symmetric_lift(v)).m));
  }
  EXPECT_LE(worst, kComposedTol);
}

TEST(SymmetricLiftProperty, UnitaryOverRandomInputs) {
  RandomStream rng(99);
  for (int k = 0; k < 1000; ++k) {
    EXPECT_TRUE(symmetric_lift(random_unitary(rng)).is_unitary(kComposedTol));
  }
}

TEST(SymmetricLiftProperty, AdjointLiftsToAdjoint) {
  RandomStream rng(7);
  for (int k = 0; k < 100; ++k) {
    const SingleUnitary u = random_unitary(rng);
    EXPECT_LT(max_abs(symmetric_lift(u.adjoint()).m - symmetric_lift(u).m.adjoint()), 1e-12);
  }
}

TEST(TwoPhotonProduct, BasisStates) {
  EXPECT_TRUE(equal_up_to_phase(two_photon_product(kets::horizontal(), kets::vertical()).amp,
                                kets::two_hv().amp));
  EXPECT_TRUE(equal_up_to_phase(two_photon_product(kets::vertical(), kets::horizontal()).amp,
                                kets::two_hv().amp));
  EXPECT_TRUE(equal_up_to_phase(two_photon_product(kets::diagonal(), kets::antidiagonal()).amp,
                                kets::two_pm().amp));
  EXPECT_TRUE(equal_up_to_phase(
      two_photon_product(kets::right_circular(), kets::left_circular()).amp, kets::two_rl().amp));
}

TEST(TwoPhotonProduct, FirstAmplitudeIsRealPositive) {
  const auto t = two_photon_product(kets::right_circular(), kets::left_circular());
  EXPECT_GT(t.hh().real(), 0.0);
  EXPECT_NEAR(t.hh().imag(), 0.0, 1e-15);
  EXPECT_NEAR(t.norm(), 1.0, 1e-14);
}

TEST(CanonicalPhase, RemovesGlobalPhase) {
  Eigen::VectorXcd v(3);
  v << Complex(0.1, 0.2), Complex(0, -0.9), Complex(0.3, 0);
  const Eigen::VectorXcd w = v * std::exp(Complex(0, 1.234));
  EXPECT_LT(max_abs(canonical_phase(v) - canonical_phase(w)), 1e-15);
  EXPECT_NEAR(canonical_phase(v)(1).imag(), 0.0, 1e-15);
  EXPECT_GT(canonical_phase(v)(1).real(), 0.0);
}

TEST(EqualUpToPhase, DistinguishesDifferentStates) {
  EXPECT_FALSE(equal_up_to_phase(kets::diagonal().amp, kets::antidiagonal().amp));
  EXPECT_TRUE(equal_up_to_phase(kets::diagonal().amp, Complex(0, 1) * kets::diagonal().amp));
}
