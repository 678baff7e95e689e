#include "arspo/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "arspo/errors.hpp"

namespace arspo {

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double sapo_tau(const SapoFamily& s, double advantage) { return advantage > 0.0 ? s.tau_pos : s.tau_neg; }

double clipped_value(double epsilon, double r, double advantage) {
  return advantage > 0.0 ? std::min(r, 1.0 + epsilon) : std::max(r, 1.0 - epsilon);
}

double clipped_derivative(double epsilon, double r, double advantage) {
  const double bound = advantage > 0.0 ? 1.0 + epsilon : 1.0 - epsilon;
  if (r == bound) throw BoundaryError("ratio exactly on the clip boundary " + std::to_string(bound));
  if (advantage > 0.0) return r < bound ? 1.0 : 0.0;
  return r > bound ? 1.0 : 0.0;
}

double clip_epsilon(const ObjectiveVariant& v) {
  if (const auto* g = std::get_if<GrpoFamily>(&v.family)) return g->epsilon;
  if (const auto* g = std::get_if<GspoFamily>(&v.family)) return g->epsilon;
  return 0.0;
}

double derivative_with_policy(const ObjectiveVariant& variant, double r, double advantage,
                              const GradientOptions& options) {
  try {
    return f_derivative(variant, r, advantage);
  } catch (const BoundaryError&) {
    if (!options.perturb_clip_boundary) throw;
    return f_derivative(variant, r + 1e-12, advantage);
  }
}

std::vector<std::size_t> group_order(const Batch& batch) {
  std::vector<std::size_t> order(batch.groups.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return batch.groups[a].group_id < batch.groups[b].group_id;
  });
  return order;
}

std::vector<std::size_t> groups_per_task(const Batch& batch) {
  std::vector<std::size_t> counts(batch.task_weights.size(), 0);
  for (const auto& g : batch.groups) ++counts[g.task];
  return counts;
}

double coefficient_for(std::span<const double> coefficients, std::size_t task) {
  if (coefficients.empty()) return 1.0;
  if (task >= coefficients.size()) {
    throw UsageError("no coefficient supplied for task " + std::to_string(task));
  }
  return coefficients[task];
}

}  // namespace

ObjectiveVariant ObjectiveVariant::grpo(double epsilon, double kl_beta) {
  ObjectiveVariant v{GrpoFamily{epsilon}, kl_beta};
  v.validate();
  return v;
}

ObjectiveVariant ObjectiveVariant::gspo(double epsilon, double kl_beta) {
  ObjectiveVariant v{GspoFamily{epsilon}, kl_beta};
  v.validate();
  return v;
}

ObjectiveVariant ObjectiveVariant::sapo(double tau_pos, double tau_neg, double kl_beta) {
  ObjectiveVariant v{SapoFamily{tau_pos, tau_neg}, kl_beta};
  v.validate();
  return v;
}

std::string ObjectiveVariant::name() const {
  if (is_grpo()) return "grpo";
  if (is_gspo()) return "gspo";
  return "sapo";
}

void ObjectiveVariant::validate() const {
  if (!(std::isfinite(kl_beta) && kl_beta >= 0.0)) throw DomainError("kl_beta must be >= 0");
  if (const auto* s = std::get_if<SapoFamily>(&family)) {
    if (!(s->tau_pos > 0.0 && s->tau_neg > 0.0)) throw DomainError("SAPO temperatures must be > 0");
  } else if (!(clip_epsilon(*this) > 0.0)) {
    throw DomainError("clip epsilon must be > 0");
  }
}

double f_value(const ObjectiveVariant& variant, double r, double advantage, std::optional<double> seq_ratio) {
  if (!(r > 0.0)) throw DomainError("f_value: ratio must be > 0");
  if (const auto* g = std::get_if<GrpoFamily>(&variant.family)) return clipped_value(g->epsilon, r, advantage);
  if (const auto* g = std::get_if<GspoFamily>(&variant.family)) {
    if (!seq_ratio) throw UsageError("f_value: GSPO requires the sequence ratio");
    return clipped_value(g->epsilon, *seq_ratio, advantage);
  }
  const auto& s = std::get<SapoFamily>(variant.family);
  const double tau = sapo_tau(s, advantage);
  return 4.0 / tau * sigmoid(tau * (r - 1.0));
}

double f_derivative(const ObjectiveVariant& variant, double r, double advantage) {
  if (!(r > 0.0)) throw DomainError("f_derivative: ratio must be > 0");
  if (const auto* s = std::get_if<SapoFamily>(&variant.family)) {
    const double sg = sigmoid(sapo_tau(*s, advantage) * (r - 1.0));
    return 4.0 * sg * (1.0 - sg);
  }
  return clipped_derivative(clip_epsilon(variant), r, advantage);
}

double f_second_derivative(const ObjectiveVariant& variant, double r, double advantage) {
  if (!(r > 0.0)) throw DomainError("f_second_derivative: ratio must be > 0");
  if (const auto* s = std::get_if<SapoFamily>(&variant.family)) {
    const double tau = sapo_tau(*s, advantage);
    const double sg = sigmoid(tau * (r - 1.0));
    return 4.0 * tau * sg * (1.0 - sg) * (1.0 - 2.0 * sg);
  }
  clipped_derivative(clip_epsilon(variant), r, advantage);  // boundary check
  return 0.0;
}

SequenceRatio gspo_sequence_ratio(std::span<const double> new_logp, std::span<const double> old_logp) {
  if (new_logp.empty()) throw UsageError("gspo_sequence_ratio: response has no tokens");
  if (new_logp.size() != old_logp.size()) throw UsageError("gspo_sequence_ratio: log-prob size mismatch");
  double sum = 0.0;
  for (std::size_t t = 0; t < new_logp.size(); ++t) sum += new_logp[t] - old_logp[t];
  const double s = std::exp(sum / static_cast<double>(new_logp.size()));
  return SequenceRatio{s, s};
}

double Response::ratio(std::size_t t) const { return std::exp(new_logp.at(t) - old_logp.at(t)); }

void ResponseGroup::validate() const {
  if (responses.size() < 2) throw UsageError("response group needs G >= 2");
  if (normalized.size() != responses.size()) throw UsageError("normalized group size mismatch");
  for (std::size_t i = 0; i < responses.size(); ++i) {
    const auto& r = responses[i];
    if (r.tokens.empty()) throw UsageError("response with no tokens");
    if (r.new_logp.size() != r.tokens.size() || r.old_logp.size() != r.tokens.size()) {
      throw UsageError("response log-prob arrays do not match token count");
    }
    if (normalized.raw[i] != r.reward.total) throw UsageError("normalized.raw differs from stored rewards");
  }
}

void rescore(ResponseGroup& group, const PolicyModel& policy) {
  for (auto& r : group.responses) {
    for (std::size_t t = 0; t < r.tokens.size(); ++t) {
      r.new_logp[t] = policy.log_prob(group.task, group.query, t, r.tokens[t]);
    }
  }
  group.kl_to_reference = policy.kl_to_reference(group.task, group.query);
}

void rescore(Batch& batch, const PolicyModel& policy) {
  for (auto& g : batch.groups) rescore(g, policy);
}

void Batch::validate() const {
  if (groups.empty()) throw UsageError("batch has no groups");
  std::vector<bool> represented(task_weights.size(), false);
  for (const auto& g : groups) {
    if (g.task >= task_weights.size()) throw UsageError("group task id without a task weight");
    represented[g.task] = true;
    g.validate();
  }
  double total = 0.0;
  for (std::size_t k = 0; k < task_weights.size(); ++k) {
    if (!represented[k]) continue;
    if (!(task_weights[k] > 0.0)) throw UsageError("task weight must be > 0 for represented tasks");
    total += task_weights[k];
  }
  if (std::abs(total - 1.0) > 1e-9) throw UsageError("task weights of represented tasks must sum to 1");
}

ObjectiveTerms objective_terms(const Batch& batch, const ObjectiveVariant& variant,
                               std::span<const double> coefficients) {
  batch.validate();
  variant.validate();
  const std::size_t tasks = batch.task_weights.size();
  const auto counts = groups_per_task(batch);
  ObjectiveTerms out;
  out.surrogate.assign(tasks, 0.0);
  out.kl.assign(tasks, 0.0);

  for (std::size_t idx : group_order(batch)) {
    const auto& group = batch.groups[idx];
    const double l = coefficient_for(coefficients, group.task);
    const double g_size = static_cast<double>(group.size());
    double group_sum = 0.0;
    for (std::size_t i = 0; i < group.size(); ++i) {
      const auto& resp = group.responses[i];
      const double adv = group.normalized.advantages[i];
      std::optional<double> seq;
      if (variant.is_gspo()) seq = gspo_sequence_ratio(resp.new_logp, resp.old_logp).value;
      double token_sum = 0.0;
      for (std::size_t t = 0; t < resp.length(); ++t) token_sum += f_value(variant, resp.ratio(t), adv, seq);
      group_sum += token_sum / static_cast<double>(resp.length()) * adv;
    }
    out.surrogate[group.task] +=
        batch.task_weights[group.task] * (l / g_size) * group_sum / static_cast<double>(counts[group.task]);
    if (variant.kl_beta > 0.0) {
      out.kl[group.task] -= variant.kl_beta * group.kl_to_reference / static_cast<double>(batch.groups.size());
    }
  }
  for (std::size_t k = 0; k < tasks; ++k) out.total += out.surrogate[k] + out.kl[k];
  return out;
}

double objective_value(const Batch& batch, const ObjectiveVariant& variant, std::span<const double> coefficients) {
  return objective_terms(batch, variant, coefficients).total;
}

std::vector<double> objective_gradient(const Batch& batch, const ObjectiveVariant& variant,
                                       std::span<const double> coefficients, const PolicyModel& policy,
                                       const GradientOptions& options) {
  batch.validate();
  variant.validate();
  const auto counts = groups_per_task(batch);
  std::vector<double> grad(policy.parameter_count(), 0.0);

  for (std::size_t idx : group_order(batch)) {
    const auto& group = batch.groups[idx];
    const double l = coefficient_for(coefficients, group.task);
    const double group_scale = batch.task_weights[group.task] * l /
                               (static_cast<double>(counts[group.task]) * static_cast<double>(group.size()));
    for (std::size_t i = 0; i < group.size(); ++i) {
      const double adv = group.normalized.advantages[i];
      if (adv == 0.0) continue;
      const auto& resp = group.responses[i];
      const double per_token = group_scale * adv / static_cast<double>(resp.length());
      if (variant.is_gspo()) {
        const auto seq = gspo_sequence_ratio(resp.new_logp, resp.old_logp);
        const double w = derivative_with_policy(variant, seq.value, adv, options) * seq.token_gradient_scale;
        if (w == 0.0) continue;
        for (std::size_t t = 0; t < resp.length(); ++t) {
          policy.add_log_prob_gradient(group.task, group.query, t, resp.tokens[t], per_token * w, grad);
        }
        continue;
      }
      for (std::size_t t = 0; t < resp.length(); ++t) {
        const double r = resp.ratio(t);
        const double w = derivative_with_policy(variant, r, adv, options) * r;
        if (w == 0.0) continue;
        policy.add_log_prob_gradient(group.task, group.query, t, resp.tokens[t], per_token * w, grad);
      }
    }
    if (variant.kl_beta > 0.0) {
      policy.add_kl_gradient(group.task, group.query,
                             -variant.kl_beta / static_cast<double>(batch.groups.size()), grad);
    }
  }
  return grad;
}

}  // namespace arspo
