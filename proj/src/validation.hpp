#pragma once

#include <optional>
#include <string>
#include <vector>

#include "polarization.hpp"
#include "random.hpp"

namespace etpsim {

enum class Fault {
  none,
  /// Replace the symmetric lift by a copy with a corrupted |HV> column.
  perturbed_lift,
};

Fault parse_fault(const std::string& name);

struct ValidationOptions {
  /// Replaces every check's own tolerance when set.
  std::optional<double> tolerance;
  Fault fault = Fault::none;
  int random_cases = 1000;
  std::uint64_t seed = 20050101;
};

struct CheckResult {
  std::string name;
  double deviation = 0.0;  // worst observed deviation
  double tolerance = 0.0;
  bool passed = false;
};

/// Analytic-vs-quantum cross-checks and algebraic properties of the core.
std::vector<CheckResult> run_validation(const ValidationOptions& options = {});

/// Random SU(2) element times a random phase (Euler angles drawn uniformly).
SingleUnitary random_unitary(RandomStream& rng);

}  // namespace etpsim
