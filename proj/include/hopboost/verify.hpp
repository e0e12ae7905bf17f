#pragma once

// Numerical verification suites for the energy identities, gradients and
// kernel equivalences, run on seeded random instances.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace hopboost {

struct VerifyRow {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  std::string relation;     // "<" (value must stay below) or ">=" (value must reach)
  bool tolerance = true;    // tolerance rows take the --tol override
  bool pass = false;
};

struct VerifyReport {
  std::string suite;
  std::vector<VerifyRow> rows;

  bool pass() const;
};

// gradcheck, identities, rbf, svm, heshe, boundary-mc
const std::vector<std::string>& verify_suites();

// Unknown suite -> kUnknownName. tol, when set, replaces the threshold of
// every tolerance row (must be >= 0, else kRange).
VerifyReport run_verify(const std::string& suite, std::uint64_t seed,
                        std::optional<double> tol = std::nullopt);

}  // namespace hopboost
