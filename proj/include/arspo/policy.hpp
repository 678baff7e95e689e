#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace arspo {

/// Shape of one task's parameter block: `contexts` queries, each answered by a
/// fixed-length response whose position t draws from `vocab[t]` actions.
struct PolicyBlock {
  std::size_t contexts = 1;
  std::vector<std::size_t> vocab;
};

enum class PolicySource { current, old_snapshot, reference };

/// Factored categorical policy: every (task, context, position) owns a row of
/// logits and pi(a) = softmax(logits / temperature)[a]. The old snapshot is the
/// sampling policy of the current rollout round; the reference is the frozen
/// anchor of the KL regularizer.
class PolicyModel {
 public:
  PolicyModel(std::vector<PolicyBlock> blocks, double temperature);

  std::size_t parameter_count() const noexcept { return theta_.size(); }
  std::size_t task_count() const noexcept { return blocks_.size(); }
  const PolicyBlock& block(std::size_t task) const { return blocks_.at(task); }
  double temperature() const noexcept { return temperature_; }

  std::span<double> theta() noexcept { return theta_; }
  std::span<const double> theta() const noexcept { return theta_; }
  std::span<const double> old_snapshot() const noexcept { return old_; }
  std::span<const double> reference() const noexcept { return reference_; }

  void set_theta(std::span<const double> values);
  /// Freezes the current parameters as the sampling policy of a new rollout.
  void snapshot_old();
  void set_old_snapshot(std::span<const double> values);
  void set_reference(std::span<const double> values);

  /// Offset of the logit row for (task, context, position).
  std::size_t offset(std::size_t task, std::size_t context, std::size_t position) const;
  /// Parameter range [begin, end) owned by a task.
  std::size_t task_begin(std::size_t task) const { return task_offsets_.at(task); }
  std::size_t task_end(std::size_t task) const { return task_offsets_.at(task + 1); }

  std::vector<double> probabilities(std::size_t task, std::size_t context, std::size_t position,
                                    PolicySource source = PolicySource::current) const;
  double log_prob(std::size_t task, std::size_t context, std::size_t position, std::size_t action,
                  PolicySource source = PolicySource::current) const;

  /// grad += scale * d log pi(action) / d theta (current parameters).
  void add_log_prob_gradient(std::size_t task, std::size_t context, std::size_t position, std::size_t action,
                             double scale, std::span<double> grad) const;

  /// Exact KL(current || reference) summed over the positions of one context.
  double kl_to_reference(std::size_t task, std::size_t context) const;
  void add_kl_gradient(std::size_t task, std::size_t context, double scale, std::span<double> grad) const;

  std::span<const double> parameters(PolicySource source) const noexcept;

 private:
  std::vector<PolicyBlock> blocks_;
  double temperature_;
  std::vector<std::size_t> task_offsets_;
  std::vector<std::vector<std::size_t>> position_offsets_;  // per task, prefix over positions
  std::vector<double> theta_;
  std::vector<double> old_;
  std::vector<double> reference_;
};

/// Softmax of logits / temperature, computed with the max-shift.
std::vector<double> softmax(std::span<const double> logits, double temperature);
double log_sum_exp(std::span<const double> logits, double temperature);

}  // namespace arspo
