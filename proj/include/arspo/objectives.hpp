#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "arspo/group_norm.hpp"
#include "arspo/metrics.hpp"
#include "arspo/policy.hpp"
#include "arspo/reward_shaping.hpp"

namespace arspo {

struct GrpoFamily {
  double epsilon = 0.2;
};
struct GspoFamily {
  double epsilon = 0.2;
};
struct SapoFamily {
  double tau_pos = 1.0;
  double tau_neg = 1.05;
};

/// Selects the f_{i,t} weighting of the unified surrogate plus the optional
/// exact-KL regularizer weight (0 disables it).
struct ObjectiveVariant {
  std::variant<GrpoFamily, GspoFamily, SapoFamily> family{GrpoFamily{}};
  double kl_beta = 0.0;

  static ObjectiveVariant grpo(double epsilon, double kl_beta = 0.0);
  static ObjectiveVariant gspo(double epsilon, double kl_beta = 0.0);
  static ObjectiveVariant sapo(double tau_pos, double tau_neg, double kl_beta = 0.0);

  bool is_grpo() const noexcept { return std::holds_alternative<GrpoFamily>(family); }
  bool is_gspo() const noexcept { return std::holds_alternative<GspoFamily>(family); }
  bool is_sapo() const noexcept { return std::holds_alternative<SapoFamily>(family); }
  std::string name() const;
  void validate() const;
};

/// f(r). GRPO clips r one-sidedly by the advantage sign; GSPO applies the same
/// clip to the sequence ratio (required); SAPO is (4/tau) sigmoid(tau (r-1))
/// with tau picked by the advantage sign.
double f_value(const ObjectiveVariant& variant, double r, double advantage,
               std::optional<double> seq_ratio = std::nullopt);

/// f'(r). For GSPO pass the sequence ratio as r. Throws BoundaryError when a
/// clipped family sits exactly on its clip boundary.
double f_derivative(const ObjectiveVariant& variant, double r, double advantage);

/// f''(r): zero for the piecewise-linear clipped families off the boundary.
double f_second_derivative(const ObjectiveVariant& variant, double r, double advantage);

/// Sequence-level ratio s_i = exp(mean_t (new - old log-prob)). Under the
/// stop-gradient token construction each token's surrogate has value s_i and
/// parameter gradient s_i * grad log pi(token).
struct SequenceRatio {
  double value = 1.0;
  /// Multiplier on grad log pi(token t) in the token gradient (equals value).
  double token_gradient_scale = 1.0;
};

SequenceRatio gspo_sequence_ratio(std::span<const double> new_logp, std::span<const double> old_logp);

struct Response {
  std::vector<std::size_t> tokens;
  std::vector<double> new_logp;
  std::vector<double> old_logp;
  MetricValue metric;
  double proxy = 0.0;
  RewardBreakdown reward;

  std::size_t length() const noexcept { return tokens.size(); }
  double ratio(std::size_t t) const;
};

/// G responses to one query of one task, with their group-normalized rewards.
struct ResponseGroup {
  std::size_t group_id = 0;
  std::size_t task = 0;
  std::size_t query = 0;
  std::vector<Response> responses;
  NormalizedGroup normalized;
  /// Exact KL(current || reference) on this query, refreshed by rescore().
  double kl_to_reference = 0.0;

  std::size_t size() const noexcept { return responses.size(); }
  void validate() const;
};

/// Recomputes new log-probabilities (and the KL) of every response under the
/// policy's current parameters. Advantages are left untouched.
void rescore(ResponseGroup& group, const PolicyModel& policy);

struct Batch {
  std::vector<ResponseGroup> groups;
  /// Indexed by task id; tasks absent from the batch carry weight 0.
  std::vector<double> task_weights;

  void validate() const;
};

void rescore(Batch& batch, const PolicyModel& policy);

struct ObjectiveTerms {
  /// Per-task weighted surrogate contribution (KL excluded).
  std::vector<double> surrogate;
  /// Per-task share of -kl_beta * mean KL.
  std::vector<double> kl;
  double total = 0.0;
};

/// J = sum_k w_k mean_groups (l_k/G) sum_i (1/|y_i|) sum_t f(r_it) A_hat_i
///     - kl_beta * mean KL. Empty coefficients mean l_k = 1.
double objective_value(const Batch& batch, const ObjectiveVariant& variant,
                       std::span<const double> coefficients = {});
ObjectiveTerms objective_terms(const Batch& batch, const ObjectiveVariant& variant,
                               std::span<const double> coefficients = {});

struct GradientOptions {
  /// Training-loop behaviour: nudge a ratio that lands exactly on a GRPO/GSPO
  /// clip boundary by 1e-12 instead of raising BoundaryError.
  bool perturb_clip_boundary = false;
};

/// Analytic gradient of objective_value with respect to the policy's current
/// parameters. The batch must have been rescored against `policy`.
std::vector<double> objective_gradient(const Batch& batch, const ObjectiveVariant& variant,
                                       std::span<const double> coefficients, const PolicyModel& policy,
                                       const GradientOptions& options = {});

}  // namespace arspo
