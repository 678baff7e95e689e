#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "arspo/dca.hpp"
#include "arspo/env.hpp"
#include "arspo/objectives.hpp"
#include "arspo/task.hpp"

namespace arspo {

inline constexpr int kConfigSchemaVersion = 1;

/// Declarative description of one environment. Targets are either listed
/// explicitly or drawn from `seed` (contexts x target_width).
struct EnvironmentConfig {
  std::string name;
  EnvKind kind = EnvKind::classification_bandit;
  std::size_t contexts = 1;
  std::size_t labels = 2;
  std::size_t resolution = 16;
  std::size_t length = 16;
  std::size_t target_width = 1;
  std::optional<std::uint64_t> seed;
  std::vector<std::vector<double>> targets;
  std::vector<std::vector<double>> candidates;
};

struct TrainingConfig {
  std::int64_t steps = 1000;
  double step_size = 0.1;
  std::size_t group_size = 8;
  double temperature = 1.0;
  std::vector<std::uint64_t> seeds{0};
  std::size_t groups_per_task = 1;
  std::size_t inner_steps = 1;
  double init_scale = 0.0;
  double sigma_floor = kDefaultSigmaFloor;
};

struct ExperimentConfig {
  std::vector<EnvironmentConfig> environments;
  std::vector<TaskSpec> tasks;
  ObjectiveVariant objective = ObjectiveVariant{GrpoFamily{0.2}, 0.01};
  bool dca_enabled = false;
  DcaConfig dca;
  TrainingConfig training;
  std::string output_directory;

  void validate() const;
  /// Environments in task order (task k runs on environments()[k]).
  std::vector<TaskEnv> build_environments() const;
};

/// Parses and validates a config document. Unknown keys and type errors raise
/// ConfigError naming the offending field path (e.g. "training.step_size").
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Fully expanded form (defaults filled in); round-trips through parse_config.
nlohmann::json to_json(const ExperimentConfig& config);
nlohmann::json to_json(const RewardMapping& mapping);
RewardMapping parse_mapping(const nlohmann::json& doc, const std::string& path);

}  // namespace arspo
