#pragma once

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "states.hpp"

namespace etpsim {

/// Pure state of two parties, index = a * dim_b + b.
struct BipartiteState {
  Eigen::VectorXcd amp;
  int dim_a = 0;
  int dim_b = 0;
};

/// 3 x 3 (two-photon A) x (two-photon B).
BipartiteState as_bipartite(const EtpState& s);
/// 4 x 4 with local spaces (A1, A2) and (B1, B2).
BipartiteState as_bipartite(const DoubleEopState& s);
/// |HH>_A |VV>_B on the ETP space.
BipartiteState separable_pair_state();

/// Hermitian operator with spectrum in {+1, -1}.
struct DichotomicObservable {
  Eigen::MatrixXcd op;

  /// V * diag(signature) * V^dagger.
  static DichotomicObservable conjugated(const Eigen::MatrixXcd& v,
                                         const std::vector<int>& signature);
  bool is_valid(double tol = 1e-9) const;
};

struct BellSettings {
  DichotomicObservable a, a_prime, b, b_prime;
};

/// <a b> + <a b'> + <a' b> - <a' b'> evaluated exactly on the state.
double chsh_value(const BipartiteState& s, const BellSettings& settings);

/// Best CHSH value over all deterministic local strategies: every observable
/// diagonal with +-1 entries in the computational basis, enumerated
/// exhaustively and normalized by the state's norm.
double max_classical_chsh(const BipartiteState& s);

enum class ObservableFamily {
  /// V D V^dagger with V any local unitary (V = exp(iH), H Hermitian) and D a
  /// fixed signature: (+1, -1, +1) in dimension 3, balanced in even dimension.
  unrestricted,
  /// Physical analyzer: one wave-plate unitary acting on every photon of the
  /// path, followed by counting photons in the H port; outcome n_H = 2, 1, 0
  /// is assigned sign (+1, -1, +1). Dimension 3 uses the symmetric lift,
  /// dimension 4 the pair (U (x) U) on distinguishable modes.
  analyzer,
};

enum class SearchStrategy { coarse_grid_then_local, multistart_local };

std::string_view to_string(ObservableFamily f);
std::string_view to_string(SearchStrategy s);
ObservableFamily parse_family(std::string_view name);
SearchStrategy parse_strategy(std::string_view name);

struct BellOptions {
  ObservableFamily family = ObservableFamily::unrestricted;
  SearchStrategy strategy = SearchStrategy::coarse_grid_then_local;
  int restarts = 8;
  int coarse_samples = 256;          // coarse_grid_then_local only
  int max_evaluations = 40000;       // per local search
  std::uint64_t seed = 1;
  bool parallel = true;
};

struct BellReport {
  double best_value = 0.0;
  BellSettings best_settings;
  int best_restart = 0;
  std::vector<double> local_optima;  // one per restart, in restart order
  double spread = 0.0;               // max - min over local optima
  long long evaluations = 0;
  /// Best value exceeds the classical bound 2.
  bool beats_classical = false;
};

/// Maximizes chsh_value over the family's parameters. Deterministic for a
/// given seed: restarts are independent and ties go to the lowest restart.
BellReport optimize_chsh(const BipartiteState& s, const BellOptions& options);

/// Observable of `family` in dimension `dim` from its real parameter vector.
DichotomicObservable family_observable(ObservableFamily family, int dim,
                                       const Eigen::VectorXd& params);
int family_parameter_count(ObservableFamily family, int dim);

}  // namespace etpsim
