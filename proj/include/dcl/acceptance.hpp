#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace dcl {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct AcceptanceOptions {
  std::uint64_t seed = 20240607;
  std::string mnist_dir;       // empty: DCL_MNIST_DIR, then the bundled fixture
  std::size_t mnist_p = 3000;
  std::vector<int> only;       // empty runs every criterion
};

/// Runs the acceptance criteria in order and prints one PASS/FAIL line per criterion to `log`.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts, std::ostream& log);

}  // namespace dcl
