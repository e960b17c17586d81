#include "bell.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "errors.hpp"
#include "nelder_mead.hpp"
#include "polarization.hpp"
#include "random.hpp"

namespace etpsim {

namespace {

Eigen::MatrixXcd coefficient_matrix(const BipartiteState& s) {
  if (s.dim_a <= 0 || s.dim_b <= 0 || s.amp.size() != s.dim_a * s.dim_b) {
    throw InputError("bipartite state dimensions do not match its amplitude vector");
  }
  Eigen::MatrixXcd m(s.dim_a, s.dim_b);
  for (int a = 0; a < s.dim_a; ++a)
    for (int b = 0; b < s.dim_b; ++b) m(a, b) = s.amp(a * s.dim_b + b);
  return m;
}

double correlation(const Eigen::MatrixXcd& m, const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  return (m.adjoint() * a * m * b.transpose()).trace().real();
}

std::vector<int> default_signature(int dim) {
  if (dim == 3) return {+1, -1, +1};
  if (dim == 4) return {+1, -1, -1, +1};
  std::vector<int> sig(static_cast<std::size_t>(dim), -1);
  for (int k = 0; k < (dim + 1) / 2; ++k) sig[static_cast<std::size_t>(k)] = +1;
  return sig;
}

Eigen::MatrixXcd unitary_from_hermitian(int dim, const double* p) {
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
  int k = 0;
  for (int i = 0; i < dim; ++i) h(i, i) = p[k++];
  for (int i = 0; i < dim; ++i) {
    for (int j = i + 1; j < dim; ++j) {
      const Complex z(p[k], p[k + 1]);
      k += 2;
      h(i, j) = z;
      h(j, i) = std::conj(z);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(h);
  const Eigen::VectorXcd phases =
      eig.eigenvalues().unaryExpr([](double x) { return std::exp(Complex(0.0, x)); });
  return eig.eigenvectors() * phases.asDiagonal() * eig.eigenvectors().adjoint();
}

SingleUnitary euler_unitary(const double* p) {
  const Complex i(0.0, 1.0);
  Eigen::Matrix2cd rz1 = Eigen::Matrix2cd::Zero(), rz2 = Eigen::Matrix2cd::Zero(), ry;
  rz1(0, 0) = std::exp(-i * p[0] / 2.0);
  rz1(1, 1) = std::exp(i * p[0] / 2.0);
  rz2(0, 0) = std::exp(-i * p[2] / 2.0);
  rz2(1, 1) = std::exp(i * p[2] / 2.0);
  const double c = std::cos(p[1] / 2.0), s = std::sin(p[1] / 2.0);
  ry << c, -s, s, c;
  return {rz1 * ry * rz2};
}

BellSettings settings_from(ObservableFamily family, int dim_a, int dim_b, const Eigen::VectorXd& x) {
  const int ka = family_parameter_count(family, dim_a);
  const int kb = family_parameter_count(family, dim_b);
  BellSettings s;
  s.a = family_observable(family, dim_a, x.segment(0, ka));
  s.a_prime = family_observable(family, dim_a, x.segment(ka, ka));
  s.b = family_observable(family, dim_b, x.segment(2 * ka, kb));
  s.b_prime = family_observable(family, dim_b, x.segment(2 * ka + kb, kb));
  return s;
}

struct LocalOutcome {
  Eigen::VectorXd x;
  double value = 0.0;
  int evaluations = 0;
};

}  // namespace

BipartiteState as_bipartite(const EtpState& s) { return {s.amp, 3, 3}; }

BipartiteState as_bipartite(const DoubleEopState& s) { return {s.amp, 4, 4}; }

BipartiteState separable_pair_state() {
  Eigen::VectorXcd amp = Eigen::VectorXcd::Zero(9);
  amp(EtpState::index(0, 2)) = 1.0;
  return {amp, 3, 3};
}

DichotomicObservable DichotomicObservable::conjugated(const Eigen::MatrixXcd& v,
                                                      const std::vector<int>& signature) {
  if (v.rows() != v.cols() || static_cast<std::size_t>(v.rows()) != signature.size()) {
    throw InputError("signature length must match the unitary's dimension");
  }
  Eigen::VectorXcd d(v.rows());
  for (Eigen::Index k = 0; k < d.size(); ++k) {
    const int sgn = signature[static_cast<std::size_t>(k)];
    if (sgn != 1 && sgn != -1) throw InputError("signature entries must be +1 or -1");
    d(k) = static_cast<double>(sgn);
  }
  return {v * d.asDiagonal() * v.adjoint()};
}

bool DichotomicObservable::is_valid(double tol) const {
  if (op.rows() != op.cols() || op.rows() == 0 || !op.allFinite()) return false;
  if ((op - op.adjoint()).cwiseAbs().maxCoeff() > 1e-12) return false;
  // Hermitian with O^2 = I  <=>  spectrum in {+1, -1}
  const auto id = Eigen::MatrixXcd::Identity(op.rows(), op.cols());
  return (op * op - id).cwiseAbs().maxCoeff() <= tol;
}

double chsh_value(const BipartiteState& s, const BellSettings& settings) {
  const Eigen::MatrixXcd m = coefficient_matrix(s);
  for (const auto* o : {&settings.a, &settings.a_prime})
    if (o->op.rows() != s.dim_a || o->op.cols() != s.dim_a) throw InputError("A observable has wrong dimension");
  for (const auto* o : {&settings.b, &settings.b_prime})
    if (o->op.rows() != s.dim_b || o->op.cols() != s.dim_b) throw InputError("B observable has wrong dimension");
  return correlation(m, settings.a.op, settings.b.op) + correlation(m, settings.a.op, settings.b_prime.op) +
         correlation(m, settings.a_prime.op, settings.b.op) -
         correlation(m, settings.a_prime.op, settings.b_prime.op);
}

double max_classical_chsh(const BipartiteState& s) {
  const Eigen::MatrixXcd m = coefficient_matrix(s);
  if (s.dim_a > 8 || s.dim_b > 8) throw InputError("classical enumeration limited to dimension 8");
  const Eigen::MatrixXd prob = m.cwiseAbs2();
  const int na = 1 << s.dim_a, nb = 1 << s.dim_b;
  auto sign = [](int pattern, int k) { return (pattern >> k) & 1 ? -1 : 1; };
  double total = 0.0;
  for (int k = 0; k < s.dim_a; ++k)
    for (int l = 0; l < s.dim_b; ++l) total += prob(k, l);
  // Each outcome pair contributes +-2; summing the two signs separately in the
  // order used for `total` makes the all-agreeing strategy give exactly 2.
  double best = -std::numeric_limits<double>::infinity();
  for (int a = 0; a < na; ++a)
    for (int ap = 0; ap < na; ++ap)
      for (int b = 0; b < nb; ++b)
        for (int bp = 0; bp < nb; ++bp) {
          double plus = 0.0, minus = 0.0;
          for (int k = 0; k < s.dim_a; ++k)
            for (int l = 0; l < s.dim_b; ++l) {
              const int v = sign(a, k) * (sign(b, l) + sign(bp, l)) +
                            sign(ap, k) * (sign(b, l) - sign(bp, l));
              (v > 0 ? plus : minus) += prob(k, l);
            }
          best = std::max(best, 2.0 * (plus - minus) / total);
        }
  return best;
}

std::string_view to_string(ObservableFamily f) {
  return f == ObservableFamily::unrestricted ? "unrestricted" : "analyzer";
}

std::string_view to_string(SearchStrategy s) {
  return s == SearchStrategy::coarse_grid_then_local ? "coarse_grid_then_local" : "multistart_local";
}

ObservableFamily parse_family(std::string_view name) {
  if (name == "unrestricted") return ObservableFamily::unrestricted;
  if (name == "analyzer") return ObservableFamily::analyzer;
  throw InputError("unknown observable family '" + std::string(name) + "'");
}

SearchStrategy parse_strategy(std::string_view name) {
  if (name == "coarse_grid_then_local") return SearchStrategy::coarse_grid_then_local;
  if (name == "multistart_local") return SearchStrategy::multistart_local;
  throw InputError("unknown search strategy '" + std::string(name) + "'");
}

int family_parameter_count(ObservableFamily family, int dim) {
  if (family == ObservableFamily::unrestricted) return dim * dim;
  if (dim < 2 || dim > 4) throw InputError("analyzer family supports local dimension 2, 3 or 4");
  return 3;
}

DichotomicObservable family_observable(ObservableFamily family, int dim,
                                       const Eigen::VectorXd& params) {
  if (params.size() != family_parameter_count(family, dim)) {
    throw InputError("wrong number of observable parameters");
  }
  if (family == ObservableFamily::unrestricted) {
    return DichotomicObservable::conjugated(unitary_from_hermitian(dim, params.data()),
                                            default_signature(dim));
  }
  const SingleUnitary u = euler_unitary(params.data());
  // analyzer applies u, then counts H photons: observable = V^dagger D V
  switch (dim) {
    case 2:
      return DichotomicObservable::conjugated(u.m.adjoint(), {+1, -1});
    case 3:
      return DichotomicObservable::conjugated(symmetric_lift(u).m.adjoint(), {+1, -1, +1});
    default: {
      Eigen::Matrix4cd pair;
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          for (int p = 0; p < 2; ++p)
            for (int q = 0; q < 2; ++q) pair(2 * i + p, 2 * j + q) = u.m(i, j) * u.m(p, q);
      // local order (HH, HV, VH, VV): n_H = 2, 1, 1, 0
      return DichotomicObservable::conjugated(pair.adjoint(), {+1, -1, -1, +1});
    }
  }
}

BellReport optimize_chsh(const BipartiteState& s, const BellOptions& options) {
  coefficient_matrix(s);  // validates dimensions
  if (options.restarts < 1) throw InputError("restarts must be >= 1");
  if (options.max_evaluations < 1) throw InputError("evaluation budget must be >= 1");
  if (options.strategy == SearchStrategy::coarse_grid_then_local &&
      options.coarse_samples < options.restarts) {
    throw InputError("coarse_samples must be >= restarts");
  }
  const int ka = family_parameter_count(options.family, s.dim_a);
  const int kb = family_parameter_count(options.family, s.dim_b);
  const int dim = 2 * ka + 2 * kb;

  auto objective = [&](const Eigen::VectorXd& x) {
    return -chsh_value(s, settings_from(options.family, s.dim_a, s.dim_b, x));
  };
  auto random_point = [&](RandomStream& rng) {
    Eigen::VectorXd x(dim);
    for (int k = 0; k < dim; ++k) x(k) = (2.0 * rng.uniform() - 1.0) * std::numbers::pi;
    return x;
  };

  std::vector<Eigen::VectorXd> starts;
  long long evaluations = 0;
  if (options.strategy == SearchStrategy::multistart_local) {
    for (int r = 0; r < options.restarts; ++r) {
      RandomStream rng(point_seed(options.seed, static_cast<std::uint64_t>(r), 0));
      starts.push_back(random_point(rng));
    }
  } else {
    std::vector<std::pair<double, int>> scored;
    std::vector<Eigen::VectorXd> samples;
    for (int k = 0; k < options.coarse_samples; ++k) {
      RandomStream rng(point_seed(options.seed, 0, static_cast<std::uint64_t>(k)));
      samples.push_back(random_point(rng));
      scored.emplace_back(objective(samples.back()), k);
    }
    evaluations += options.coarse_samples;
    std::stable_sort(scored.begin(), scored.end());
    for (int r = 0; r < options.restarts; ++r) {
      starts.push_back(samples[static_cast<std::size_t>(scored[static_cast<std::size_t>(r)].second)]);
    }
  }

  NelderMeadOptions nm;
  nm.max_evaluations = options.max_evaluations;
  auto run_local = [&](const Eigen::VectorXd& start) {
    const NelderMeadResult res = nelder_mead(objective, start, nm);
    return LocalOutcome{res.x, -res.value, res.evaluations};
  };

  std::vector<LocalOutcome> outcomes;
  if (options.parallel) {
    std::vector<std::future<LocalOutcome>> jobs;
    for (const auto& x0 : starts) jobs.push_back(std::async(std::launch::async, run_local, x0));
    for (auto& j : jobs) outcomes.push_back(j.get());
  } else {
    for (const auto& x0 : starts) outcomes.push_back(run_local(x0));
  }

  BellReport report;
  int best = 0;
  for (std::size_t r = 0; r < outcomes.size(); ++r) {
    report.local_optima.push_back(outcomes[r].value);
    evaluations += outcomes[r].evaluations;
    if (outcomes[r].value > outcomes[static_cast<std::size_t>(best)].value) best = static_cast<int>(r);
  }
  const auto [lo, hi] = std::minmax_element(report.local_optima.begin(), report.local_optima.end());
  report.spread = *hi - *lo;
  report.best_restart = best;
  report.best_settings =
      settings_from(options.family, s.dim_a, s.dim_b, outcomes[static_cast<std::size_t>(best)].x);
  report.best_value = chsh_value(s, report.best_settings);
  report.evaluations = evaluations;
  report.beats_classical = report.best_value > 2.0 + 1e-9;
  return report;
}

}  // namespace etpsim
