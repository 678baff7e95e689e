#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace arspo {

inline constexpr int kVerifySchemaVersion = 1;

/// Tolerances of the verification suites.
inline constexpr double kJacobianRelTol = 1e-5;
inline constexpr double kJacobianRowSumTol = 1e-10;
inline constexpr double kJacobianNullTol = 1e-9;  // relative to ||A||
inline constexpr double kGradientRelTol = 1e-5;
inline constexpr double kRateAbsTol = 1e-4;
inline constexpr double kRateRelTol = 1e-3;
inline constexpr double kPlateauHardTol = 1e-6;
inline constexpr double kPlateauEasyMin = 1e-2;
inline constexpr double kDecompositionTol = 1e-12;
inline constexpr double kMidpointTol = 1e-6;

struct Check {
  std::string name;
  double measured = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::string detail;
};

struct SuiteReport {
  std::string name;
  std::vector<Check> checks;

  bool passed() const;
  /// First failing check, or nullptr.
  const Check* first_failure() const;
};

struct VerifyOptions {
  std::uint64_t seed = 20240601;
  /// Mutation fixture: shifts the diagonal of the closed-form Jacobian by
  /// 1/(G sigma) so that the jacobian suite must fail.
  bool inject_jacobian_fault = false;
};

/// jacobian, gradients, dynamics, dca-golden, rewards.
const std::vector<std::string>& suite_names();

/// Runs one named suite; UsageError for an unknown name.
SuiteReport run_suite(const std::string& name, const VerifyOptions& options = {});

SuiteReport verify_jacobian(const VerifyOptions& options = {});
SuiteReport verify_gradients(const VerifyOptions& options = {});
/// Rate decomposition against the finite-difference oracle plus the plateau witness.
SuiteReport verify_rate_decomposition(const VerifyOptions& options = {});
/// Sensitivity profiles, Self/Cross split and dominance identities.
SuiteReport verify_sensitivity(const VerifyOptions& options = {});
SuiteReport verify_dynamics(const VerifyOptions& options = {});
SuiteReport verify_dca_golden(const VerifyOptions& options = {});
SuiteReport verify_rewards(const VerifyOptions& options = {});

nlohmann::json to_json(const Check& check);
nlohmann::json to_json(const SuiteReport& suite);
nlohmann::json verify_report_json(const std::vector<SuiteReport>& suites);

}  // namespace arspo
