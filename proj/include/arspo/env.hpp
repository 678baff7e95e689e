#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "arspo/metrics.hpp"
#include "arspo/policy.hpp"

namespace arspo {

enum class EnvKind { classification_bandit, interval_grid, box_grid, span_selection };

std::string_view to_string(EnvKind kind);
EnvKind parse_env_kind(std::string_view text);

/// Upper bound on joint outcomes per context for exact enumeration.
inline constexpr std::size_t kMaxEnumeratedOutcomes = 1'000'000;

/// Cell-index target of a grid environment: cells [first, last], inclusive.
struct CellSpan {
  std::size_t first = 0;
  std::size_t last = 0;
};

struct CellBox {
  CellSpan x;
  CellSpan y;
};

/// A toy task whose responses are fixed-length factored categoricals.
///
/// classification_bandit: one token over `labels`; accuracy against the
///   context's label. The relaxation proxy is pi(correct label).
/// interval_grid: tokens (start cell, end cell) over `resolution` cells of
///   [0, 1]; the predicted segment spans both cells, scored by tIoU. A
///   candidate-list variant answers with one token indexing fixed segments.
/// box_grid: tokens (x0, y0, x1, y1) over a resolution^2 grid; box IoU.
/// span_selection: tokens (start, end) over `length` text positions; the
///   selected index range is scored by F1 against the target index set.
///
/// Metric tables are enumerated at construction when the joint outcome count
/// fits kMaxEnumeratedOutcomes.
class TaskEnv {
 public:
  static TaskEnv classification(std::string name, std::size_t labels, std::vector<std::size_t> targets);
  static TaskEnv interval_grid(std::string name, std::size_t resolution, std::vector<CellSpan> targets);
  static TaskEnv interval_candidates(std::string name, std::vector<Interval> candidates,
                                     std::vector<Interval> targets);
  static TaskEnv box_grid(std::string name, std::size_t resolution, std::vector<CellBox> targets);
  static TaskEnv span_selection(std::string name, std::size_t length, std::vector<TokenIndexSet> targets);

  const std::string& name() const noexcept { return name_; }
  EnvKind kind() const noexcept { return kind_; }
  TaskKind task_kind() const noexcept;
  MetricKind metric_kind() const noexcept { return metric_kind_for(task_kind()); }
  std::size_t contexts() const noexcept { return contexts_; }
  std::size_t positions() const noexcept { return vocab_.size(); }
  const std::vector<std::size_t>& vocab() const noexcept { return vocab_; }
  /// Grid resolution, label count or text length, depending on the kind.
  std::size_t size_knob() const noexcept { return knob_; }
  std::size_t outcome_count() const noexcept { return outcomes_; }
  bool enumerable() const noexcept { return outcomes_ <= kMaxEnumeratedOutcomes; }

  PolicyBlock policy_block() const { return PolicyBlock{contexts_, vocab_}; }

  MetricValue metric(std::size_t context, std::span<const std::size_t> tokens) const;
  /// Metric of the outcome with mixed-radix index `outcome` (position 0 most significant).
  double metric_of_outcome(std::size_t context, std::size_t outcome) const;
  std::vector<std::size_t> decode_outcome(std::size_t outcome) const;
  std::size_t encode_outcome(std::span<const std::size_t> tokens) const;

  /// Continuous proxy x' in [0, 1] for relaxed metrics: pi(correct label) for
  /// classification, 0 for the continuous-metric kinds.
  double proxy(const PolicyModel& policy, std::size_t task, std::size_t context) const;

  /// Classification only: the correct label of a context.
  std::size_t label(std::size_t context) const;

 private:
  TaskEnv() = default;
  void build_tables();
  double evaluate(std::size_t context, std::span<const std::size_t> tokens) const;

  std::string name_;
  EnvKind kind_ = EnvKind::classification_bandit;
  std::size_t contexts_ = 0;
  std::size_t knob_ = 0;
  std::vector<std::size_t> vocab_;
  std::size_t outcomes_ = 0;
  std::vector<std::size_t> labels_;
  std::vector<CellSpan> interval_targets_;
  std::vector<Interval> candidates_;
  std::vector<Interval> candidate_targets_;
  std::vector<CellBox> box_targets_;
  std::vector<TokenIndexSet> span_targets_;
  std::vector<std::vector<double>> tables_;
};

struct Capability {
  double value = 0.0;
  /// Gradient over the full parameter vector (zero outside the task's block).
  std::vector<double> gradient;
};

/// Exact H_k = mean over contexts of E_{y ~ pi}[M(y)] under the current
/// parameters, with its analytic softmax gradient. Throws UsageError when the
/// outcome space exceeds kMaxEnumeratedOutcomes.
Capability expected_capability(const PolicyModel& policy, const TaskEnv& env, std::size_t task);
/// Same for a single context (H_k(theta, q, tau)).
Capability expected_capability(const PolicyModel& policy, const TaskEnv& env, std::size_t task,
                               std::size_t context);

/// Overwrites the task's logits so that, per context, one zero-metric outcome
/// receives `margin` extra logit on each position: a near-deterministic policy
/// parked on a performance plateau where grad H ~ exp(-margin / T).
void make_plateau_policy(PolicyModel& policy, const TaskEnv& env, std::size_t task, double margin);

}  // namespace arspo
