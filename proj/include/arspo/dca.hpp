#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <map>
#include <span>
#include <string_view>
#include <vector>

#include "arspo/metrics.hpp"

namespace arspo {

/// Dynamic Coefficient Adjustment hyperparameters. Defaults are the published
/// settings; tau_high holds one threshold per task.
struct DcaConfig {
  std::int64_t t_warm = 800;
  std::int64_t t_window = 100;
  double alpha_boost = 1.1;
  double alpha_decay = 0.9;
  double eps_mom = 0.02;
  double eps_rescue = 0.10;
  std::vector<double> tau_high;
  double l_max = 4.0;
  /// Denominator floor for the relative gain when a baseline is ~0.
  double b_floor = 1e-6;

  void validate() const;
  std::size_t task_count() const noexcept { return tau_high.size(); }
};

inline constexpr double kTauHighClassification = 0.10;
inline constexpr double kTauHighImageLocalization = 0.50;
inline constexpr double kTauHighTextVideoLocalization = 0.60;

double default_tau_high(TaskKind kind);

enum class DcaBranch { none, momentum, rescue, decay, laggard };
std::string_view to_string(DcaBranch branch);

struct TaskAdjustment {
  double mu = 0.0;
  double mu_past = 0.0;
  double delta_total = 0.0;
  double delta_recent = 0.0;
  DcaBranch branch = DcaBranch::none;
  double l_before = 1.0;
  double l_after = 1.0;  // after rescale
};

struct AdjustmentEvent {
  std::int64_t step = 0;
  std::size_t laggard = 0;
  double rescale_divisor = 1.0;
  std::vector<TaskAdjustment> tasks;
};

struct MetricSample {
  std::int64_t step = 0;
  double value = 0.0;
};

/// Scheduler state. Steps count from 1: the n-th recorded sample belongs to
/// step n. Samples of steps < t_warm form the baseline, which is frozen when
/// step t_warm is recorded.
struct CoefficientState {
  std::int64_t step = 0;
  std::vector<double> coefficients;
  std::vector<double> baselines;
  std::vector<std::deque<MetricSample>> history;
  bool warmed_up = false;
  std::vector<double> warmup_sum;
  std::int64_t warmup_count = 0;

  std::size_t task_count() const noexcept { return coefficients.size(); }
};

CoefficientState make_coefficient_state(std::size_t tasks);

/// Appends one sample per task for step state.step + 1. Throws UsageError when
/// a task is missing.
CoefficientState record_metrics(CoefficientState state, const std::map<std::size_t, MetricValue>& per_task_means,
                                const DcaConfig& config);
CoefficientState record_metrics(CoefficientState state, std::span<const double> per_task_means,
                                const DcaConfig& config);

/// True when the current step is an adjustment step: a multiple of t_window
/// with s >= t_warm + 3 * t_window.
bool adjustment_due(const CoefficientState& state, const DcaConfig& config);

/// One pass of the four-branch rule followed by rescaling. Throws UsageError
/// before warm-up or off schedule. Before t_warm + 3 * t_window it is a no-op
/// and `event` is left untouched.
CoefficientState adjust(CoefficientState state, const DcaConfig& config, AdjustmentEvent* event = nullptr);

/// Divides every coefficient by the minimum.
std::vector<double> rescale(std::vector<double> coefficients);

/// Mean of samples with step in (from, to].
double window_mean(const std::deque<MetricSample>& history, std::int64_t from, std::int64_t to);

}  // namespace arspo
