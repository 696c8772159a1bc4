#pragma once

#include <string>
#include <vector>

namespace circmotion {

/// Outcome of one self-check run by `circmotion verify`.
struct CheckResult {
  std::string suite;
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Suites: "graphs" (Laplacian structure and circulant spectra of the bundled
/// graphs), "potentials" (finite-difference gradients, projector identity),
/// "lyapunov" (descent on short bundled runs plus a wrong-sign negative
/// control), or "all". Throws std::invalid_argument for an unknown suite.
std::vector<CheckResult> run_checks(const std::string& suite);

}  // namespace circmotion
