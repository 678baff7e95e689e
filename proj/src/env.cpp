#include "arspo/env.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "arspo/errors.hpp"

namespace arspo {

namespace {

std::size_t checked_product(const std::vector<std::size_t>& vocab) {
  std::size_t total = 1;
  for (std::size_t v : vocab) {
    if (total > std::numeric_limits<std::size_t>::max() / v) return std::numeric_limits<std::size_t>::max();
    total *= v;
  }
  return total;
}

// Segment covered by two cell tokens, in cell units.
Interval cell_segment(std::size_t a, std::size_t b) {
  return Interval{static_cast<double>(std::min(a, b)), static_cast<double>(std::max(a, b) + 1)};
}

Interval cell_segment(const CellSpan& s) { return cell_segment(s.first, s.last); }

}  // namespace

std::string_view to_string(EnvKind kind) {
  switch (kind) {
    case EnvKind::classification_bandit: return "classification-bandit";
    case EnvKind::interval_grid: return "interval-grid-localization";
    case EnvKind::box_grid: return "box-grid-localization";
    case EnvKind::span_selection: return "span-selection";
  }
  return "unknown";
}

EnvKind parse_env_kind(std::string_view text) {
  for (EnvKind k : {EnvKind::classification_bandit, EnvKind::interval_grid, EnvKind::box_grid,
                    EnvKind::span_selection}) {
    if (to_string(k) == text) return k;
  }
  throw UsageError("unknown environment kind '" + std::string(text) + "'");
}

TaskKind TaskEnv::task_kind() const noexcept {
  switch (kind_) {
    case EnvKind::classification_bandit: return TaskKind::classification;
    case EnvKind::interval_grid: return TaskKind::video_localization;
    case EnvKind::box_grid: return TaskKind::image_localization;
    case EnvKind::span_selection: return TaskKind::text_localization;
  }
  return TaskKind::classification;
}

TaskEnv TaskEnv::classification(std::string name, std::size_t labels, std::vector<std::size_t> targets) {
  if (labels < 2) throw UsageError("classification bandit needs >= 2 labels");
  if (targets.empty()) throw UsageError("classification bandit needs >= 1 context");
  for (std::size_t t : targets) {
    if (t >= labels) throw UsageError("classification target label out of range");
  }
  TaskEnv env;
  env.name_ = std::move(name);
  env.kind_ = EnvKind::classification_bandit;
  env.contexts_ = targets.size();
  env.knob_ = labels;
  env.vocab_ = {labels};
  env.labels_ = std::move(targets);
  env.build_tables();
  return env;
}

TaskEnv TaskEnv::interval_grid(std::string name, std::size_t resolution, std::vector<CellSpan> targets) {
  if (resolution < 1) throw UsageError("interval grid needs resolution >= 1");
  if (targets.empty()) throw UsageError("interval grid needs >= 1 context");
  for (const auto& t : targets) {
    if (t.first > t.last || t.last >= resolution) throw UsageError("interval target outside the grid");
  }
  TaskEnv env;
  env.name_ = std::move(name);
  env.kind_ = EnvKind::interval_grid;
  env.contexts_ = targets.size();
  env.knob_ = resolution;
  env.vocab_ = {resolution, resolution};
  env.interval_targets_ = std::move(targets);
  env.build_tables();
  return env;
}

TaskEnv TaskEnv::interval_candidates(std::string name, std::vector<Interval> candidates,
                                     std::vector<Interval> targets) {
  if (candidates.empty()) throw UsageError("interval candidates must be non-empty");
  if (targets.empty()) throw UsageError("interval candidates need >= 1 context");
  for (const auto& c : candidates) {
    if (!c.valid()) throw UsageError("candidate segment with start > end");
  }
  for (const auto& t : targets) {
    if (!t.valid()) throw UsageError("target segment with start > end");
  }
  TaskEnv env;
  env.name_ = std::move(name);
  env.kind_ = EnvKind::interval_grid;
  env.contexts_ = targets.size();
  env.knob_ = candidates.size();
  env.vocab_ = {candidates.size()};
  env.candidates_ = std::move(candidates);
  env.candidate_targets_ = std::move(targets);
  env.build_tables();
  return env;
}

TaskEnv TaskEnv::box_grid(std::string name, std::size_t resolution, std::vector<CellBox> targets) {
  if (resolution < 1) throw UsageError("box grid needs resolution >= 1");
  if (targets.empty()) throw UsageError("box grid needs >= 1 context");
  for (const auto& t : targets) {
    if (t.x.first > t.x.last || t.x.last >= resolution || t.y.first > t.y.last || t.y.last >= resolution) {
      throw UsageError("box target outside the grid");
    }
  }
  TaskEnv env;
  env.name_ = std::move(name);
  env.kind_ = EnvKind::box_grid;
  env.contexts_ = targets.size();
  env.knob_ = resolution;
  env.vocab_ = {resolution, resolution, resolution, resolution};
  env.box_targets_ = std::move(targets);
  env.build_tables();
  return env;
}

TaskEnv TaskEnv::span_selection(std::string name, std::size_t length, std::vector<TokenIndexSet> targets) {
  if (length < 1) throw UsageError("span selection needs length >= 1");
  if (targets.empty()) throw UsageError("span selection needs >= 1 context");
  for (const auto& t : targets) {
    if (t.empty()) throw UsageError("span target must be non-empty");
    if (*t.begin() < 0 || *t.rbegin() >= static_cast<std::int64_t>(length)) {
      throw UsageError("span target index outside the text");
    }
  }
  TaskEnv env;
  env.name_ = std::move(name);
  env.kind_ = EnvKind::span_selection;
  env.contexts_ = targets.size();
  env.knob_ = length;
  env.vocab_ = {length, length};
  env.span_targets_ = std::move(targets);
  env.build_tables();
  return env;
}

void TaskEnv::build_tables() {
  outcomes_ = checked_product(vocab_);
  tables_.clear();
  if (!enumerable()) return;
  tables_.resize(contexts_);
  std::vector<std::size_t> tokens(vocab_.size(), 0);
  for (std::size_t c = 0; c < contexts_; ++c) {
    auto& table = tables_[c];
    table.resize(outcomes_);
    std::fill(tokens.begin(), tokens.end(), 0);
    for (std::size_t o = 0; o < outcomes_; ++o) {
      table[o] = evaluate(c, tokens);
      for (std::size_t t = tokens.size(); t-- > 0;) {
        if (++tokens[t] < vocab_[t]) break;
        tokens[t] = 0;
      }
    }
  }
}

double TaskEnv::evaluate(std::size_t context, std::span<const std::size_t> tokens) const {
  switch (kind_) {
    case EnvKind::classification_bandit:
      return accuracy_indicator(static_cast<std::int64_t>(tokens[0]), static_cast<std::int64_t>(labels_[context]))
          .value;
    case EnvKind::interval_grid:
      if (!candidates_.empty()) return tiou_interval(candidates_[tokens[0]], candidate_targets_[context]).value;
      return tiou_interval(cell_segment(tokens[0], tokens[1]), cell_segment(interval_targets_[context])).value;
    case EnvKind::box_grid: {
      const Interval x = cell_segment(tokens[0], tokens[2]);
      const Interval y = cell_segment(tokens[1], tokens[3]);
      const auto& t = box_targets_[context];
      const Interval tx = cell_segment(t.x);
      const Interval ty = cell_segment(t.y);
      return iou_box(Box2D{x.start, y.start, x.end, y.end}, Box2D{tx.start, ty.start, tx.end, ty.end}).value;
    }
    case EnvKind::span_selection: {
      TokenIndexSet pred;
      for (std::size_t i = std::min(tokens[0], tokens[1]); i <= std::max(tokens[0], tokens[1]); ++i) {
        pred.insert(static_cast<std::int64_t>(i));
      }
      return span_f1(pred, span_targets_[context]).value;
    }
  }
  return 0.0;
}

MetricValue TaskEnv::metric(std::size_t context, std::span<const std::size_t> tokens) const {
  if (context >= contexts_) throw UsageError("context out of range");
  if (tokens.size() != vocab_.size()) throw UsageError("response length does not match the environment");
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    if (tokens[t] >= vocab_[t]) throw UsageError("token out of range");
  }
  if (!tables_.empty()) return MetricValue{tables_[context][encode_outcome(tokens)], metric_kind()};
  return MetricValue{evaluate(context, tokens), metric_kind()};
}

double TaskEnv::metric_of_outcome(std::size_t context, std::size_t outcome) const {
  if (!tables_.empty()) return tables_.at(context).at(outcome);
  const auto tokens = decode_outcome(outcome);
  return evaluate(context, tokens);
}

std::vector<std::size_t> TaskEnv::decode_outcome(std::size_t outcome) const {
  std::vector<std::size_t> tokens(vocab_.size());
  for (std::size_t t = vocab_.size(); t-- > 0;) {
    tokens[t] = outcome % vocab_[t];
    outcome /= vocab_[t];
  }
  return tokens;
}

std::size_t TaskEnv::encode_outcome(std::span<const std::size_t> tokens) const {
  std::size_t o = 0;
  for (std::size_t t = 0; t < vocab_.size(); ++t) o = o * vocab_[t] + tokens[t];
  return o;
}

double TaskEnv::proxy(const PolicyModel& policy, std::size_t task, std::size_t context) const {
  if (kind_ != EnvKind::classification_bandit) return 0.0;
  return std::exp(policy.log_prob(task, context, 0, labels_.at(context)));
}

std::size_t TaskEnv::label(std::size_t context) const {
  if (kind_ != EnvKind::classification_bandit) throw UsageError("label(): not a classification environment");
  return labels_.at(context);
}

Capability expected_capability(const PolicyModel& policy, const TaskEnv& env, std::size_t task,
                               std::size_t context) {
  if (!env.enumerable()) {
    throw UsageError("expected_capability: " + std::to_string(env.outcome_count()) +
                     " joint outcomes exceed the enumeration limit");
  }
  if (policy.block(task).vocab != env.vocab()) throw UsageError("expected_capability: policy block mismatch");
  const std::size_t positions = env.positions();
  std::vector<std::vector<double>> probs(positions);
  for (std::size_t t = 0; t < positions; ++t) probs[t] = policy.probabilities(task, context, t);

  // bucket[t][a] accumulates pi(y) M(y) over outcomes with y_t = a.
  std::vector<std::vector<double>> bucket(positions);
  for (std::size_t t = 0; t < positions; ++t) bucket[t].assign(env.vocab()[t], 0.0);
  std::vector<std::size_t> tokens(positions, 0);
  double h = 0.0;
  for (std::size_t o = 0; o < env.outcome_count(); ++o) {
    const double m = env.metric_of_outcome(context, o);
    if (m != 0.0) {
      double pi = 1.0;
      for (std::size_t t = 0; t < positions; ++t) pi *= probs[t][tokens[t]];
      const double w = pi * m;
      h += w;
      for (std::size_t t = 0; t < positions; ++t) bucket[t][tokens[t]] += w;
    }
    for (std::size_t t = positions; t-- > 0;) {
      if (++tokens[t] < env.vocab()[t]) break;
      tokens[t] = 0;
    }
  }

  Capability out;
  out.value = h;
  out.gradient.assign(policy.parameter_count(), 0.0);
  const double inv_temp = 1.0 / policy.temperature();
  for (std::size_t t = 0; t < positions; ++t) {
    const std::size_t off = policy.offset(task, context, t);
    for (std::size_t a = 0; a < env.vocab()[t]; ++a) {
      out.gradient[off + a] = inv_temp * (bucket[t][a] - probs[t][a] * h);
    }
  }
  return out;
}

Capability expected_capability(const PolicyModel& policy, const TaskEnv& env, std::size_t task) {
  Capability out;
  out.gradient.assign(policy.parameter_count(), 0.0);
  const double inv = 1.0 / static_cast<double>(env.contexts());
  for (std::size_t c = 0; c < env.contexts(); ++c) {
    const auto part = expected_capability(policy, env, task, c);
    out.value += part.value * inv;
    for (std::size_t i = policy.task_begin(task); i < policy.task_end(task); ++i) {
      out.gradient[i] += part.gradient[i] * inv;
    }
  }
  return out;
}

void make_plateau_policy(PolicyModel& policy, const TaskEnv& env, std::size_t task, double margin) {
  if (!env.enumerable()) throw UsageError("make_plateau_policy: environment is not enumerable");
  auto theta = policy.theta();
  for (std::size_t c = 0; c < env.contexts(); ++c) {
    // Zero-metric outcome whose single-token neighbours score least.
    std::size_t best = env.outcome_count();
    double best_score = std::numeric_limits<double>::infinity();
    for (std::size_t o = 0; o < env.outcome_count(); ++o) {
      if (env.metric_of_outcome(c, o) != 0.0) continue;
      auto tokens = env.decode_outcome(o);
      double score = 0.0;
      for (std::size_t t = 0; t < tokens.size(); ++t) {
        const std::size_t keep = tokens[t];
        for (std::size_t a = 0; a < env.vocab()[t]; ++a) {
          tokens[t] = a;
          score += env.metric_of_outcome(c, env.encode_outcome(tokens));
        }
        tokens[t] = keep;
      }
      if (score < best_score) {
        best_score = score;
        best = o;
      }
    }
    if (best == env.outcome_count()) throw UsageError("make_plateau_policy: no zero-metric outcome");
    const auto tokens = env.decode_outcome(best);
    for (std::size_t t = 0; t < tokens.size(); ++t) {
      const std::size_t off = policy.offset(task, c, t);
      for (std::size_t a = 0; a < env.vocab()[t]; ++a) theta[off + a] = a == tokens[t] ? margin : 0.0;
    }
  }
}

}  // namespace arspo
