#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "arspo/env.hpp"
#include "arspo/group_norm.hpp"
#include "arspo/metrics.hpp"
#include "arspo/objectives.hpp"
#include "arspo/policy.hpp"
#include "arspo/reward_shaping.hpp"

namespace arspo {

/// Per-response g'(x_i) / sigma for the mapped rewards of one group.
struct SensitivityProfile {
  std::vector<double> metrics;
  std::vector<double> rewards;
  std::vector<double> values;
  double mu = 0.0;
  double sigma = 0.0;
  std::string mapping;

  std::size_t argmax() const;
  double max_over_mean() const;
};

/// Throws SingularityError when the mapped rewards are all equal and
/// UsageError for a non-differentiable mapping or G < 2.
SensitivityProfile sensitivity_profile(std::span<const MetricValue> metrics, const RewardMapping& mapping);

/// (G - 1) - A_hat^2.
double stat_factor(double advantage, std::size_t group_size);

/// Directional rate of change of one token's gradient contribution W_{i,t} A_hat_i
/// along a parameter direction u:
///   u' d/dtheta (W A_hat) u = W'(u,u) A_hat + (W.u) (g'/(G sigma)) [(G-1) - A_hat^2] (grad H . u)
/// with W = f'(r) r grad log pi. term_1 is the first product, term_2 the second.
struct RateDecomposition {
  double term_1 = 0.0;
  double term_2 = 0.0;
  double total = 0.0;
  double advantage = 0.0;
  double w = 0.0;        // W . u
  double w_prime = 0.0;  // u' (dW/dtheta) u
  double c_map = 0.0;    // g'(H) / (G sigma)
  double c_stat = 0.0;   // (G-1) - A_hat^2
  double c_task = 0.0;   // grad H . u
  double capability = 0.0;
  double sigma = 0.0;
};

/// Inputs for rate_decomposition. Response i's raw reward is modelled as
/// g(H_q(theta)) plus its (constant) auxiliary terms; the other responses keep
/// their recorded rewards. Only SAPO with a differentiable, non-relaxed mapping
/// is accepted (UsageError otherwise).
struct RateProblem {
  const TaskEnv* env = nullptr;
  const PolicyModel* policy = nullptr;
  const ResponseGroup* group = nullptr;
  RewardMapping mapping;
  ObjectiveVariant variant = ObjectiveVariant::sapo(1.0, 1.05);
  std::vector<double> direction;
  std::size_t response = 0;
  std::size_t token = 0;
};

RateDecomposition rate_decomposition(const RateProblem& problem);

/// Finite-difference counterpart of rate_decomposition.total built from forward
/// evaluations only: Phi(a, b) = f(r(theta + a u)) * A_hat_i(theta + b u) and
/// total = Phi_aa + Phi_ab by central differences of step h.
double rate_decomposition_fd(const RateProblem& problem, double h = 1e-4);

/// The group's normalization with response i's reward replaced by g(H_q(theta)).
NormalizedGroup rate_problem_group(const RateProblem& problem, std::span<const double> theta);

struct AdvantageDerivativeReport {
  std::vector<double> self_term;
  std::vector<double> cross_term;
  std::size_t top = 0;
  double dominance_ratio = 0.0;
};

/// Splits J A' into Self and Cross parts per response. `top` is the response
/// whose dominance is measured (default: the largest raw reward).
AdvantageDerivativeReport total_advantage_derivative_report(const NormalizedGroup& group,
                                                            std::span<const double> reward_grads);
AdvantageDerivativeReport total_advantage_derivative_report(const NormalizedGroup& group,
                                                            std::span<const double> reward_grads, std::size_t top);

/// e^{alpha (x_i - x_j)}.
double dominance_ratio(double x_i, double x_j, double alpha);

nlohmann::json to_json(const SensitivityProfile& profile);
nlohmann::json to_json(const RateDecomposition& rate);
nlohmann::json to_json(const AdvantageDerivativeReport& report);

}  // namespace arspo
