#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "arspo/config.hpp"
#include "arspo/dca.hpp"

namespace arspo {

inline constexpr int kSummarySchemaVersion = 1;

struct TaskRecord {
  double capability = 0.0;
  double coefficient = 1.0;
  double objective = 0.0;
  double grad_norm = 0.0;
  double mean_metric = 0.0;
  /// DCA branch fired at this step, "none" between adjustments, "init" on step 0.
  std::string branch;
};

struct StepRecord {
  std::int64_t step = 0;
  std::vector<TaskRecord> tasks;
};

struct TrainingTrace {
  std::uint64_t seed = 0;
  std::vector<std::string> task_names;
  std::vector<StepRecord> records;
  std::vector<AdjustmentEvent> adjustments;
  std::vector<double> baselines;
  std::vector<double> final_theta;

  double initial_capability(std::size_t task) const { return records.front().tasks.at(task).capability; }
  double final_capability(std::size_t task) const { return records.back().tasks.at(task).capability; }
  double delta_capability(std::size_t task) const { return final_capability(task) - initial_capability(task); }
};

/// Runs the multi-task loop for one seed. Every step snapshots the old policy,
/// samples `groups_per_task` groups for every task, feeds the per-task mean
/// sampled metric to DCA (adjusting on schedule), and ascends the weighted
/// objective. Throws NumericalError (with the step) on non-finite values.
TrainingTrace train(const ExperimentConfig& config, std::uint64_t seed);
TrainingTrace train(const ExperimentConfig& config);

/// Runs every seed of the config on at most `workers` threads; results are
/// ordered as the seed list.
std::vector<TrainingTrace> train_seeds(const ExperimentConfig& config, const std::vector<std::uint64_t>& seeds,
                                       std::size_t workers);

/// step,task,H,l,objective,grad_norm,branch
void write_trace_csv(const TrainingTrace& trace, std::ostream& out);
/// step,task,l,B,mu,mu_past,delta_total,branch_fired (one row per task per adjustment)
void write_coefficients_csv(const TrainingTrace& trace, std::ostream& out);
nlohmann::json summary_json(const ExperimentConfig& config, const TrainingTrace& trace);

/// Writes trace_seed<N>.csv, coefficients_seed<N>.csv and summary_seed<N>.json.
void write_run_outputs(const ExperimentConfig& config, const TrainingTrace& trace,
                       const std::filesystem::path& directory);

/// Shortest round-trip decimal form, independent of the C locale.
std::string format_number(double value);

}  // namespace arspo
