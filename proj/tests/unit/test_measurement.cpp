#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "errors.hpp"
#include "measurement.hpp"
#include "random.hpp"
#include "states.hpp"

using namespace etpsim;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDeg = kPi / 180.0;
constexpr NamedBasis kBases[] = {NamedBasis::hv, NamedBasis::rl, NamedBasis::pm};
constexpr Scan kScans[] = {Scan::fig2a, Scan::fig2b, Scan::fig2c};

AnalyzerSetting random_setting(RandomStream& rng) {
  return {rng.uniform() < 0.5, 2 * kPi * rng.uniform(), rng.uniform() < 0.5,
          2 * kPi * rng.uniform()};
}

}  // namespace

TEST(Analyzer, NamedSettingsRoundTrip) {
  for (NamedBasis b : kBases) EXPECT_EQ(AnalyzerSetting::named(b).named_basis(), b);
  const AnalyzerSetting odd{true, 0.3, false, 0.0};
  EXPECT_FALSE(odd.named_basis().has_value());
}

TEST(Analyzer, NamedBasisIgnoresPlatePeriod) {
  AnalyzerSetting pm = AnalyzerSetting::pm();
  pm.hwp_angle += kPi;
  EXPECT_EQ(pm.named_basis(), NamedBasis::pm);
}

TEST(Analyzer, JonesRejectsNonFiniteAngle) {
  const AnalyzerSetting bad{true, std::nan(""), false, 0.0};
  EXPECT_THROW(bad.jones(), InputError);
}

TEST(Scan, ParseAndPrint) {
  for (Scan s : kScans) EXPECT_EQ(parse_scan(to_string(s)), s);
  EXPECT_THROW(parse_scan("fig2d"), InputError);
}

TEST(Scan, SettingsAtExtremaAreNamedBases) {
  EXPECT_EQ(scan_settings(Scan::fig2a, 0.0).b.named_basis(), NamedBasis::hv);
  EXPECT_EQ(scan_settings(Scan::fig2a, 45 * kDeg).b.named_basis(), NamedBasis::rl);
  EXPECT_EQ(scan_settings(Scan::fig2c, 22.5 * kDeg).b.named_basis(), NamedBasis::pm);
  EXPECT_EQ(scan_settings(Scan::fig2c, 0.0).b.named_basis(), NamedBasis::hv);
  EXPECT_EQ(scan_settings(Scan::fig2b, 0.0).a.named_basis(), NamedBasis::rl);
  EXPECT_EQ(scan_settings(Scan::fig2a, 0.0).a.named_basis(), NamedBasis::hv);
  EXPECT_EQ(scan_settings(Scan::fig2c, 0.0).a.named_basis(), NamedBasis::pm);
}

TEST(FringeShape, KnownValues) {
  EXPECT_NEAR(fringe_shape(Scan::fig2a, 0.0), 1.0, 1e-15);
  EXPECT_NEAR(fringe_shape(Scan::fig2a, 45 * kDeg), 0.0, 1e-15);
  EXPECT_NEAR(fringe_shape(Scan::fig2a, 22.5 * kDeg), 0.25, 1e-15);
  EXPECT_NEAR(fringe_shape(Scan::fig2b, 45 * kDeg), 1.0, 1e-15);
  EXPECT_NEAR(fringe_shape(Scan::fig2b, 22.5 * kDeg), 0.0, 1e-15);
  EXPECT_NEAR(fringe_shape(Scan::fig2c, 22.5 * kDeg), 1.0, 1e-15);
  EXPECT_NEAR(fringe_shape(Scan::fig2c, 0.0), 0.0, 1e-15);
}

TEST(Fourfold, EtpCorrelatesOnlyInEqualBases) {
  const EtpState s = make_etp();
  for (NamedBasis x : kBases)
    for (NamedBasis y : kBases) {
      const double p =
          fourfold_probability_etp(s, AnalyzerSetting::named(x), AnalyzerSetting::named(y));
      EXPECT_NEAR(p, x == y ? 1.0 / 3.0 : 0.0, 1e-10) << to_string(x) << "/" << to_string(y);
    }
}

TEST(Fourfold, DoubleEopPerpendicularIsHalfOfParallel) {
  const DoubleEopState s = make_double_eop();
  for (NamedBasis x : kBases)
    for (NamedBasis y : kBases) {
      const double p =
          fourfold_probability_eop2(s, AnalyzerSetting::named(x), AnalyzerSetting::named(y));
      EXPECT_NEAR(p, x == y ? 0.5 : 0.25, 1e-10);
    }
}

TEST(Fourfold, ProbabilitiesStayInUnitInterval) {
  RandomStream rng(8);
  const EtpState etp = make_etp();
  const DoubleEopState eop = make_double_eop();
  for (int k = 0; k < 1000; ++k) {
    const AnalyzerSetting a = random_setting(rng), b = random_setting(rng);
    const double p1 = fourfold_probability_etp(etp, a, b);
    const double p2 = fourfold_probability_eop2(eop, a, b);
    EXPECT_GE(p1, -1e-15);
    EXPECT_LE(p1, 1.0 + 1e-12);
    EXPECT_GE(p2, -1e-15);
    EXPECT_LE(p2, 1.0 + 1e-12);
  }
}

TEST(Fourfold, EtpOutcomeProbabilitiesSumToOne) {
  // Squared norm after the analyzers = sum over all nine photon-number outcomes.
  RandomStream rng(10);
  const EtpState s = make_etp();
  for (int k = 0; k < 200; ++k) {
    const AnalyzerSetting a = random_setting(rng), b = random_setting(rng);
    const EtpState out =
        apply_local(symmetric_lift(a.jones()), symmetric_lift(b.jones()), s);
    EXPECT_NEAR(out.amp.squaredNorm(), 1.0, 1e-12);
  }
}

TEST(FringeRate, AnalyticMatchesQuantumForEveryScan) {
  const EtpState etp = make_etp();
  const DoubleEopState eop = make_double_eop();
  for (Scan scan : kScans) {
    for (int k = 0; k <= 180; ++k) {
      const ScanSettings st = scan_settings(scan, k * kDeg);
      EXPECT_NEAR(fourfold_probability_etp(etp, st.a, st.b),
                  fringe_rate(MixtureModel::pure_etp(), scan, k * kDeg), 1e-9);
      EXPECT_NEAR(fourfold_probability_eop2(eop, st.a, st.b),
                  fringe_rate(MixtureModel::pure_double_eop(), scan, k * kDeg), 1e-9);
    }
  }
}

TEST(FringeRate, NoiseAddsFlatQuarter) {
  for (Scan scan : kScans)
    for (double a : {0.0, 0.3, 1.1}) EXPECT_NEAR(fringe_rate(MixtureModel::pure_noise(8.0), scan, a), 2.0, 1e-15);
}

TEST(FringeRate, PureEtpMinimumIsExactlyZero) {
  EXPECT_EQ(fringe_rate(MixtureModel::pure_etp(500.0), Scan::fig2a, kPi / 4), 0.0);
}

TEST(RatioAnalytic, Anchors) {
  EXPECT_NEAR(ratio_r_analytic(MixtureModel::pure_etp()), 0.0, 1e-15);
  EXPECT_NEAR(ratio_r_analytic(MixtureModel::pure_double_eop()), 0.5, 1e-15);
  EXPECT_NEAR(ratio_r_analytic(MixtureModel::pure_noise()), 1.0, 1e-15);
  EXPECT_NEAR(ratio_r_analytic(MixtureModel(1.0, 0.37, 0.63, 0.0)), 0.3593, 5e-4);
  EXPECT_EQ(ratio_r_analytic(MixtureModel(0.0, 0.37, 0.63, 0.0)),
            ratio_r_analytic(MixtureModel(5.0, 0.37, 0.63, 0.0)));
}

TEST(RatioAnalyticProperty, NoiseStrictlyIncreasesRatio) {
  for (int i = 0; i <= 10; ++i) {
    const double a = i / 10.0;
    for (int j = 1; j <= 9; ++j) {
      const double g = j / 10.0;
      const double r0 = ratio_r_analytic(MixtureModel(1.0, a, 1.0 - a, 0.0));
      const double rg =
          ratio_r_analytic(MixtureModel(1.0, a * (1.0 - g), (1.0 - a) * (1.0 - g), g));
      EXPECT_GT(rg, r0) << "alpha " << a << " gamma " << g;
    }
  }
}

TEST(RatioAnalyticProperty, MatchesFringeExtrema) {
  for (Scan scan : kScans) {
    const MixtureModel m(10.0, 0.4, 0.5, 0.1);
    double lo = 1e9, hi = 0;
    for (int k = 0; k <= 720; ++k) {
      const double v = fringe_rate(m, scan, k * kPi / 720);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    EXPECT_NEAR(lo / hi, ratio_r_analytic(m), 1e-12);
  }
}

TEST(Classify, NamedBases) {
  EXPECT_EQ(classify(AnalyzerSetting::hv(), AnalyzerSetting::hv()), Correlation::parallel);
  EXPECT_EQ(classify(AnalyzerSetting::hv(), AnalyzerSetting::rl()), Correlation::perpendicular);
  EXPECT_THROW(classify(AnalyzerSetting::hv(), AnalyzerSetting{true, 0.2, false, 0.0}),
               InputError);
}
