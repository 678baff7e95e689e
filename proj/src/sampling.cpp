#include "arspo/sampling.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "arspo/errors.hpp"

namespace arspo {

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double normal01(std::mt19937_64& rng) {
  const double u1 = 1.0 - uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::size_t sample_categorical(std::span<const double> probs, double u) {
  double cumulative = 0.0;
  for (std::size_t a = 0; a < probs.size(); ++a) {
    cumulative += probs[a];
    if (u < cumulative) return a;
  }
  // Rounding left u above the final cumulative sum: take the last action with mass.
  for (std::size_t a = probs.size(); a-- > 0;) {
    if (probs[a] > 0.0) return a;
  }
  return probs.size() - 1;
}

std::string render_response(std::span<const std::size_t> tokens) {
  std::ostringstream out;
  out << "<think></think><answer>";
  for (std::size_t t = 0; t < tokens.size(); ++t) out << (t ? " " : "") << tokens[t];
  out << "</answer>";
  return out.str();
}

std::uint64_t derive_seed(std::uint64_t run_seed, std::uint64_t step, std::uint64_t task, std::uint64_t slot) {
  // splitmix64 over the packed coordinates
  std::uint64_t z = run_seed;
  for (std::uint64_t part : {step, task, slot}) {
    z += 0x9e3779b97f4a7c15ULL + part;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    z ^= z >> 31;
  }
  return z;
}

ResponseGroup make_group(const PolicyModel& policy, const TaskEnv& env, const TaskSpec& spec, std::size_t task,
                         std::size_t query, const std::vector<std::vector<std::size_t>>& responses,
                         std::size_t group_id, double sigma_floor) {
  if (responses.size() < 2) throw UsageError("a response group needs G >= 2");
  ResponseGroup group;
  group.group_id = group_id;
  group.task = task;
  group.query = query;
  const double proxy = env.proxy(policy, task, query);
  std::vector<double> rewards;
  rewards.reserve(responses.size());
  for (const auto& tokens : responses) {
    Response r;
    r.tokens = tokens;
    r.metric = env.metric(query, tokens);
    r.proxy = proxy;
    const double r_task = spec.mapping(r.metric.value, proxy);
    const double r_fmt = spec.auxiliary.format ? format_reward(render_response(tokens), spec.auxiliary.format_bonus)
                                               : 0.0;
    const double r_rep = spec.auxiliary.repetition
                             ? repetition_penalty(std::span<const std::size_t>(tokens), spec.auxiliary.ngram,
                                                  spec.auxiliary.lambda_pen)
                             : 0.0;
    r.reward = total_reward(r_task, r_fmt, r_rep);
    r.old_logp.resize(tokens.size());
    r.new_logp.resize(tokens.size());
    for (std::size_t t = 0; t < tokens.size(); ++t) {
      r.old_logp[t] = policy.log_prob(task, query, t, tokens[t], PolicySource::old_snapshot);
      r.new_logp[t] = policy.log_prob(task, query, t, tokens[t], PolicySource::current);
    }
    rewards.push_back(r.reward.total);
    group.responses.push_back(std::move(r));
  }
  group.normalized = normalize_group(rewards, sigma_floor);
  group.kl_to_reference = policy.kl_to_reference(task, query);
  return group;
}

ResponseGroup sample_group(const PolicyModel& policy, const TaskEnv& env, const TaskSpec& spec, std::size_t task,
                           std::size_t query, std::size_t group_size, std::uint64_t rng_seed,
                           std::size_t group_id) {
  if (group_size < 2) throw UsageError("sample_group: G must be >= 2");
  std::mt19937_64 rng(rng_seed);
  std::vector<std::vector<double>> probs(env.positions());
  for (std::size_t t = 0; t < env.positions(); ++t) {
    probs[t] = policy.probabilities(task, query, t, PolicySource::old_snapshot);
  }
  std::vector<std::vector<std::size_t>> responses(group_size, std::vector<std::size_t>(env.positions()));
  for (auto& tokens : responses) {
    for (std::size_t t = 0; t < env.positions(); ++t) tokens[t] = sample_categorical(probs[t], uniform01(rng));
  }
  return make_group(policy, env, spec, task, query, responses, group_id);
}

}  // namespace arspo
