#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "bell.hpp"
#include "errors.hpp"
#include "random.hpp"
#include "validation.hpp"

using namespace etpsim;

namespace {

const double kTsirelson = 2.0 * std::numbers::sqrt2;

BipartiteState singlet_qubits() {
  BipartiteState s;
  s.dim_a = s.dim_b = 2;
  s.amp = Eigen::VectorXcd::Zero(4);
  s.amp(1) = 1.0 / std::numbers::sqrt2;
  s.amp(2) = -1.0 / std::numbers::sqrt2;
  return s;
}

DichotomicObservable spin_along(double angle) {
  Eigen::MatrixXcd op(2, 2);
  op << std::cos(angle), std::sin(angle), std::sin(angle), -std::cos(angle);
  return {op};
}

Eigen::MatrixXcd random_local_unitary(int dim, RandomStream& rng) {
  Eigen::MatrixXcd h(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) h(i, j) = Complex(rng.uniform() - 0.5, rng.uniform() - 0.5);
  const Eigen::MatrixXcd herm = (h + h.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(herm);
  Eigen::VectorXcd phases(dim);
  for (int i = 0; i < dim; ++i) phases(i) = std::exp(Complex(0.0, 3.0 * eig.eigenvalues()(i)));
  return eig.eigenvectors() * phases.asDiagonal() * eig.eigenvectors().adjoint();
}

BellSettings random_settings(ObservableFamily family, int dim_a, int dim_b, RandomStream& rng) {
  auto draw = [&](int dim) {
    Eigen::VectorXd p(family_parameter_count(family, dim));
    for (Eigen::Index i = 0; i < p.size(); ++i) p(i) = 6.0 * (rng.uniform() - 0.5);
    return family_observable(family, dim, p);
  };
  return {draw(dim_a), draw(dim_a), draw(dim_b), draw(dim_b)};
}

BellOptions quick(ObservableFamily family) {
  BellOptions o;
  o.family = family;
  o.restarts = 4;
  o.coarse_samples = 64;
  o.seed = 3;
  return o;
}

}  // namespace

TEST(Chsh, TextbookSingletReachesTsirelson) {
  const BellSettings s{spin_along(0.0), spin_along(std::numbers::pi / 2), spin_along(std::numbers::pi / 4),
                       spin_along(-std::numbers::pi / 4)};
  EXPECT_NEAR(std::abs(chsh_value(singlet_qubits(), s)), kTsirelson, 1e-9);
}

TEST(Chsh, IdenticalObservablesReduceToTwoCorrelator) {
  RandomStream rng(1);
  const BipartiteState etp = as_bipartite(make_etp());
  for (int k = 0; k < 20; ++k) {
    Eigen::VectorXd p(family_parameter_count(ObservableFamily::unrestricted, 3));
    for (Eigen::Index i = 0; i < p.size(); ++i) p(i) = rng.uniform();
    const DichotomicObservable o = family_observable(ObservableFamily::unrestricted, 3, p);
    EXPECT_LE(std::abs(chsh_value(etp, {o, o, o, o})), 2.0 + 1e-12);
  }
}

TEST(Chsh, TsirelsonBoundOnRandomSettings) {
  RandomStream rng(2);
  const BipartiteState states[] = {as_bipartite(make_etp()), as_bipartite(make_double_eop()),
                                   separable_pair_state()};
  for (const auto& st : states)
    for (auto fam : {ObservableFamily::unrestricted, ObservableFamily::analyzer})
      for (int k = 0; k < 200; ++k) {
        const double v = chsh_value(st, random_settings(fam, st.dim_a, st.dim_b, rng));
        EXPECT_LE(std::abs(v), kTsirelson + 1e-9);
      }
}

TEST(Chsh, LocalUnitaryInvariance) {
  RandomStream rng(4);
  const BipartiteState etp = as_bipartite(make_etp());
  for (int k = 0; k < 50; ++k) {
    const BellSettings s = random_settings(ObservableFamily::unrestricted, 3, 3, rng);
    const Eigen::MatrixXcd ua = random_local_unitary(3, rng), ub = random_local_unitary(3, rng);
    BipartiteState moved = etp;
    Eigen::MatrixXcd m = Eigen::Map<const Eigen::MatrixXcd>(etp.amp.data(), 3, 3).transpose();
    const Eigen::MatrixXcd m2 = ua * m * ub.transpose();
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) moved.amp(3 * a + b) = m2(a, b);
    auto conj = [](const Eigen::MatrixXcd& u, const DichotomicObservable& o) {
      return DichotomicObservable{u * o.op * u.adjoint()};
    };
    const BellSettings t{conj(ua, s.a), conj(ua, s.a_prime), conj(ub, s.b), conj(ub, s.b_prime)};
    EXPECT_NEAR(chsh_value(moved, t), chsh_value(etp, s), 1e-10);
  }
}

TEST(Observable, FamiliesProduceValidDichotomicOperators) {
  RandomStream rng(5);
  for (auto fam : {ObservableFamily::unrestricted, ObservableFamily::analyzer})
    for (int dim : {2, 3, 4})
      for (int k = 0; k < 50; ++k) {
        Eigen::VectorXd p(family_parameter_count(fam, dim));
        for (Eigen::Index i = 0; i < p.size(); ++i) p(i) = 4.0 * (rng.uniform() - 0.5);
        const DichotomicObservable o = family_observable(fam, dim, p);
        EXPECT_TRUE(o.is_valid());
        EXPECT_LT((o.op - o.op.adjoint()).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_LT((o.op * o.op - Eigen::MatrixXcd::Identity(dim, dim)).cwiseAbs().maxCoeff(), 1e-9);
      }
}

TEST(Observable, ConjugatedRejectsBadSignature) {
  EXPECT_FALSE(DichotomicObservable{Eigen::MatrixXcd::Identity(3, 3) * 0.5}.is_valid());
  EXPECT_TRUE(DichotomicObservable::conjugated(Eigen::MatrixXcd::Identity(3, 3), {1, -1, 1}).is_valid());
}

TEST(Classical, DeterministicStrategiesMaxOutAtTwo) {
  EXPECT_NEAR(max_classical_chsh(as_bipartite(make_etp())), 2.0, 1e-12);
  EXPECT_NEAR(max_classical_chsh(as_bipartite(make_double_eop())), 2.0, 1e-12);
  EXPECT_NEAR(max_classical_chsh(separable_pair_state()), 2.0, 1e-12);
  EXPECT_NEAR(max_classical_chsh(singlet_qubits()), 2.0, 1e-12);
}

TEST(Optimize, EtpReachesTwoPointFiveFive) {
  const BellReport r = optimize_chsh(as_bipartite(make_etp()), quick(ObservableFamily::unrestricted));
  EXPECT_GE(r.best_value, 2.54);
  EXPECT_LE(r.best_value, kTsirelson + 1e-9);
  EXPECT_TRUE(r.beats_classical);
}

TEST(Optimize, EtpAnalyzerFamily) {
  const BellReport r = optimize_chsh(as_bipartite(make_etp()), quick(ObservableFamily::analyzer));
  EXPECT_GE(r.best_value, 2.54);
}

TEST(Optimize, DoubleEopAnalyzerFamilyGivesOnePlusRootTwo) {
  const BellReport r = optimize_chsh(as_bipartite(make_double_eop()), quick(ObservableFamily::analyzer));
  EXPECT_GE(r.best_value, 2.35);
  EXPECT_NEAR(r.best_value, 1.0 + std::numbers::sqrt2, 1e-6);
}

TEST(Optimize, SeparableStaysClassical) {
  for (auto fam : {ObservableFamily::unrestricted, ObservableFamily::analyzer}) {
    const BellReport r = optimize_chsh(separable_pair_state(), quick(fam));
    EXPECT_LE(r.best_value, 2.0 + 1e-9);
    EXPECT_FALSE(r.beats_classical);
  }
}

TEST(Optimize, ReportedValueMatchesReevaluation) {
  const BipartiteState s = as_bipartite(make_etp());
  const BellReport r = optimize_chsh(s, quick(ObservableFamily::analyzer));
  EXPECT_LE(r.best_value, chsh_value(s, r.best_settings) + 1e-12);
  EXPECT_EQ(static_cast<int>(r.local_optima.size()), 4);
  EXPECT_DOUBLE_EQ(r.best_value, *std::max_element(r.local_optima.begin(), r.local_optima.end()));
  EXPECT_GE(r.spread, 0.0);
}

TEST(Optimize, DeterministicForSeedAndIndependentOfThreads) {
  const BipartiteState s = as_bipartite(make_etp());
  BellOptions o = quick(ObservableFamily::analyzer);
  const BellReport a = optimize_chsh(s, o);
  o.parallel = false;
  const BellReport b = optimize_chsh(s, o);
  EXPECT_EQ(a.best_value, b.best_value);
  EXPECT_EQ(a.local_optima, b.local_optima);
  EXPECT_EQ(a.best_restart, b.best_restart);
}

TEST(Optimize, MultistartStrategy) {
  BellOptions o = quick(ObservableFamily::analyzer);
  o.strategy = SearchStrategy::multistart_local;
  EXPECT_GE(optimize_chsh(as_bipartite(make_etp()), o).best_value, 2.54);
}

TEST(Names, ParseAndPrint) {
  for (auto f : {ObservableFamily::unrestricted, ObservableFamily::analyzer})
    EXPECT_EQ(parse_family(to_string(f)), f);
  for (auto s : {SearchStrategy::coarse_grid_then_local, SearchStrategy::multistart_local})
    EXPECT_EQ(parse_strategy(to_string(s)), s);
  EXPECT_THROW(parse_family("gisin"), InputError);
  EXPECT_THROW(parse_strategy("anneal"), InputError);
}
