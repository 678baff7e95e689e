#include "arspo/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "arspo/errors.hpp"

namespace arspo {

std::size_t SensitivityProfile::argmax() const {
  return static_cast<std::size_t>(std::max_element(values.begin(), values.end()) - values.begin());
}

double SensitivityProfile::max_over_mean() const {
  if (values.empty()) return 0.0;
  // Mean as min + mean offset, so equal entries give a ratio of exactly 1.
  const double lo = *std::min_element(values.begin(), values.end());
  double offset = 0.0;
  for (double v : values) offset += v - lo;
  const double mean = lo + offset / static_cast<double>(values.size());
  return *std::max_element(values.begin(), values.end()) / mean;
}

SensitivityProfile sensitivity_profile(std::span<const MetricValue> metrics, const RewardMapping& mapping) {
  if (metrics.size() < 2) throw UsageError("sensitivity_profile: G must be >= 2");
  if (!mapping.is_differentiable()) throw UsageError("sensitivity_profile: mapping is not differentiable");
  SensitivityProfile out;
  out.mapping = mapping.describe();
  for (const MetricValue& m : metrics) {
    out.metrics.push_back(m.value);
    out.rewards.push_back(mapping(m.value));
  }
  const NormalizedGroup group = normalize_group(out.rewards);
  if (group.degenerate) throw SingularityError("sensitivity_profile: mapped rewards are all equal");
  out.mu = group.mu;
  out.sigma = group.sigma;
  for (double x : out.metrics) out.values.push_back(mapping.derivative(x) / group.sigma);
  return out;
}

double stat_factor(double advantage, std::size_t group_size) {
  if (group_size < 2) throw UsageError("stat_factor: G must be >= 2");
  return (static_cast<double>(group_size) - 1.0) - advantage * advantage;
}

namespace {

struct CheckedProblem {
  const TaskEnv& env;
  const PolicyModel& policy;
  const ResponseGroup& group;
  const Response& response;
  std::size_t task;
  std::size_t query;
  std::size_t position;
  std::size_t action;
};

CheckedProblem check(const RateProblem& p) {
  if (!p.env || !p.policy || !p.group) throw UsageError("rate_decomposition: env, policy and group are required");
  if (!p.variant.is_sapo()) throw UsageError("rate_decomposition: only the smooth SAPO objective is supported");
  if (!p.mapping.is_differentiable() || p.mapping.is_relaxed()) {
    throw UsageError("rate_decomposition: mapping must be differentiable and not relaxed");
  }
  if (p.direction.size() != p.policy->parameter_count()) {
    throw UsageError("rate_decomposition: direction size mismatch");
  }
  if (p.response >= p.group->size()) throw UsageError("rate_decomposition: response index out of range");
  const Response& r = p.group->responses[p.response];
  if (p.token >= r.length()) throw UsageError("rate_decomposition: token index out of range");
  if (r.old_logp.size() != r.length()) throw UsageError("rate_decomposition: response lacks old log-probs");
  return CheckedProblem{*p.env, *p.policy, *p.group, r, p.group->task, p.group->query, p.token, r.tokens[p.token]};
}

// Copy of the policy with its current parameters replaced.
PolicyModel with_theta(const PolicyModel& policy, std::span<const double> theta) {
  PolicyModel copy = policy;
  copy.set_theta(theta);
  return copy;
}

std::vector<double> shifted(std::span<const double> theta, std::span<const double> u, double eps) {
  std::vector<double> out(theta.begin(), theta.end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += eps * u[i];
  return out;
}

double token_ratio(const CheckedProblem& c, const PolicyModel& policy) {
  const double logp = policy.log_prob(c.task, c.query, c.position, c.action);
  return std::exp(logp - c.response.old_logp[c.position]);
}

}  // namespace

NormalizedGroup rate_problem_group(const RateProblem& problem, std::span<const double> theta) {
  const CheckedProblem c = check(problem);
  const PolicyModel policy = with_theta(c.policy, theta);
  const double h = expected_capability(policy, c.env, c.task, c.query).value;
  std::vector<double> raw = c.group.normalized.raw;
  if (raw.size() != c.group.size()) throw UsageError("rate_decomposition: group lacks raw rewards");
  const RewardBreakdown& b = c.response.reward;
  raw[problem.response] = problem.mapping(h) + b.r_fmt + b.r_rep;
  return normalize_group(raw, kDefaultSigmaFloor);
}

RateDecomposition rate_decomposition(const RateProblem& problem) {
  const CheckedProblem c = check(problem);
  const std::span<const double> u = problem.direction;
  const std::size_t g = c.group.size();

  const Capability cap = expected_capability(c.policy, c.env, c.task, c.query);
  const NormalizedGroup norm = rate_problem_group(problem, c.policy.theta());
  if (norm.degenerate) throw SingularityError("rate_decomposition: degenerate group");
  const double adv = norm.advantages[problem.response];

  // d = grad log pi . u and its second directional derivative -Var_p(u_row) / T^2.
  std::vector<double> grad(c.policy.parameter_count(), 0.0);
  c.policy.add_log_prob_gradient(c.task, c.query, c.position, c.action, 1.0, grad);
  const double d = std::inner_product(grad.begin(), grad.end(), u.begin(), 0.0);
  const auto probs = c.policy.probabilities(c.task, c.query, c.position);
  const std::size_t off = c.policy.offset(c.task, c.query, c.position);
  double mean_u = 0.0, mean_u2 = 0.0;
  for (std::size_t a = 0; a < probs.size(); ++a) {
    mean_u += probs[a] * u[off + a];
    mean_u2 += probs[a] * u[off + a] * u[off + a];
  }
  const double temp = c.policy.temperature();
  const double d2 = -(mean_u2 - mean_u * mean_u) / (temp * temp);

  const double r = token_ratio(c, c.policy);
  const double f1 = f_derivative(problem.variant, r, adv);
  const double f2 = f_second_derivative(problem.variant, r, adv);

  RateDecomposition out;
  out.advantage = adv;
  out.sigma = norm.sigma;
  out.capability = cap.value;
  out.w = f1 * r * d;
  out.w_prime = f2 * (r * d) * (r * d) + f1 * r * (d * d + d2);
  out.c_map = problem.mapping.derivative(cap.value) / (static_cast<double>(g) * norm.sigma);
  out.c_stat = stat_factor(adv, g);
  out.c_task = std::inner_product(cap.gradient.begin(), cap.gradient.end(), u.begin(), 0.0);
  out.term_1 = out.w_prime * adv;
  out.term_2 = out.w * out.c_map * out.c_stat * out.c_task;
  out.total = out.term_1 + out.term_2;
  return out;
}

double rate_decomposition_fd(const RateProblem& problem, double h) {
  const CheckedProblem c = check(problem);
  const std::span<const double> theta = c.policy.theta();
  const std::span<const double> u = problem.direction;
  // The f branch (tau_pos / tau_neg) follows the unperturbed advantage sign.
  const double adv0 = rate_problem_group(problem, theta).advantages[problem.response];
  auto f_at = [&](double a) {
    const PolicyModel moved = with_theta(c.policy, shifted(theta, u, a));
    return f_value(problem.variant, token_ratio(c, moved), adv0);
  };
  auto q_at = [&](double b) {
    return rate_problem_group(problem, shifted(theta, u, b)).advantages[problem.response];
  };
  const double fp = f_at(h), f0 = f_at(0.0), fm = f_at(-h);
  const double qp = q_at(h), q0 = q_at(0.0), qm = q_at(-h);
  const double phi_aa = (fp - 2.0 * f0 + fm) * q0 / (h * h);
  const double phi_ab = (fp - fm) * (qp - qm) / (4.0 * h * h);
  return phi_aa + phi_ab;
}

AdvantageDerivativeReport total_advantage_derivative_report(const NormalizedGroup& group,
                                                            std::span<const double> reward_grads) {
  if (group.raw.empty()) throw UsageError("total_advantage_derivative_report: empty group");
  const auto top = static_cast<std::size_t>(std::max_element(group.raw.begin(), group.raw.end()) - group.raw.begin());
  return total_advantage_derivative_report(group, reward_grads, top);
}

AdvantageDerivativeReport total_advantage_derivative_report(const NormalizedGroup& group,
                                                            std::span<const double> reward_grads, std::size_t top) {
  if (group.degenerate) throw SingularityError("total_advantage_derivative_report: degenerate group");
  const std::size_t g = group.size();
  if (g < 2) throw UsageError("total_advantage_derivative_report: G must be >= 2");
  if (reward_grads.size() != g) throw UsageError("total_advantage_derivative_report: reward_grads size mismatch");
  if (top >= g) throw UsageError("total_advantage_derivative_report: top index out of range");
  const double scale = 1.0 / (static_cast<double>(g) * group.sigma);
  const auto& adv = group.advantages;

  AdvantageDerivativeReport out;
  out.top = top;
  out.self_term.assign(g, 0.0);
  out.cross_term.assign(g, 0.0);
  for (std::size_t i = 0; i < g; ++i) {
    out.self_term[i] = scale * stat_factor(adv[i], g) * reward_grads[i];
    double cross = 0.0;
    for (std::size_t j = 0; j < g; ++j) {
      if (j != i) cross += (1.0 + adv[i] * adv[j]) * reward_grads[j];
    }
    out.cross_term[i] = -scale * cross;
  }
  double worst = 0.0;
  for (std::size_t j = 0; j < g; ++j) {
    if (j != top) worst = std::max(worst, std::abs(scale * (1.0 + adv[top] * adv[j]) * reward_grads[j]));
  }
  const double self = std::abs(out.self_term[top]);
  out.dominance_ratio = worst > 0.0 ? self / worst : std::numeric_limits<double>::infinity();
  return out;
}

double dominance_ratio(double x_i, double x_j, double alpha) { return std::exp(alpha * (x_i - x_j)); }

nlohmann::json to_json(const SensitivityProfile& p) {
  return {{"mapping", p.mapping}, {"metrics", p.metrics}, {"rewards", p.rewards},       {"values", p.values},
          {"mu", p.mu},           {"sigma", p.sigma},     {"argmax", p.argmax()}, {"max_over_mean", p.max_over_mean()}};
}

nlohmann::json to_json(const RateDecomposition& r) {
  return {{"term_1", r.term_1}, {"term_2", r.term_2},   {"total", r.total},   {"advantage", r.advantage},
          {"w", r.w},           {"w_prime", r.w_prime}, {"c_map", r.c_map},   {"c_stat", r.c_stat},
          {"c_task", r.c_task}, {"capability", r.capability}, {"sigma", r.sigma}};
}

nlohmann::json to_json(const AdvantageDerivativeReport& r) {
  nlohmann::json ratio = std::isfinite(r.dominance_ratio) ? nlohmann::json(r.dominance_ratio) : nlohmann::json(nullptr);
  return {{"self_term", r.self_term}, {"cross_term", r.cross_term}, {"top", r.top}, {"dominance_ratio", ratio}};
}

}  // namespace arspo
