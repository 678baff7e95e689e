#include "arspo/dca.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "arspo/errors.hpp"

namespace arspo {

void DcaConfig::validate() const {
  if (t_warm < 1) throw ConfigError("dca.t_warm", "must be a positive integer");
  if (t_window < 1) throw ConfigError("dca.t_window", "must be a positive integer");
  if (!(alpha_boost > 1.0)) throw ConfigError("dca.alpha_boost", "must be > 1");
  if (!(alpha_decay > 0.0 && alpha_decay < 1.0)) throw ConfigError("dca.alpha_decay", "must lie in (0, 1)");
  if (!(eps_mom > 0.0)) throw ConfigError("dca.eps_mom", "must be > 0");
  if (!(eps_rescue > 0.0)) throw ConfigError("dca.eps_rescue", "must be > 0");
  if (!(l_max >= 1.0)) throw ConfigError("dca.l_max", "must be >= 1");
  if (!(b_floor > 0.0)) throw ConfigError("dca.b_floor", "must be > 0");
  for (std::size_t k = 0; k < tau_high.size(); ++k) {
    if (!(tau_high[k] > 0.0)) throw ConfigError("tasks[" + std::to_string(k) + "].tau_high", "must be > 0");
  }
}

double default_tau_high(TaskKind kind) {
  switch (kind) {
    case TaskKind::classification: return kTauHighClassification;
    case TaskKind::image_localization: return kTauHighImageLocalization;
    case TaskKind::text_localization:
    case TaskKind::video_localization: return kTauHighTextVideoLocalization;
  }
  return kTauHighClassification;
}

std::string_view to_string(DcaBranch branch) {
  switch (branch) {
    case DcaBranch::none: return "none";
    case DcaBranch::momentum: return "momentum";
    case DcaBranch::rescue: return "rescue";
    case DcaBranch::decay: return "decay";
    case DcaBranch::laggard: return "laggard";
  }
  return "none";
}

CoefficientState make_coefficient_state(std::size_t tasks) {
  if (tasks == 0) throw UsageError("coefficient state needs at least one task");
  CoefficientState s;
  s.coefficients.assign(tasks, 1.0);
  s.baselines.assign(tasks, 0.0);
  s.history.resize(tasks);
  s.warmup_sum.assign(tasks, 0.0);
  return s;
}

CoefficientState record_metrics(CoefficientState state, std::span<const double> per_task_means,
                                const DcaConfig& config) {
  const std::size_t tasks = state.task_count();
  if (per_task_means.size() != tasks) {
    throw UsageError("record_metrics: expected " + std::to_string(tasks) + " task samples, got " +
                     std::to_string(per_task_means.size()));
  }
  for (double v : per_task_means) {
    if (!std::isfinite(v)) throw UsageError("record_metrics: missing or non-finite task sample");
  }
  const std::int64_t s = state.step + 1;
  state.step = s;
  for (std::size_t k = 0; k < tasks; ++k) {
    auto& h = state.history[k];
    h.push_back({s, per_task_means[k]});
    while (!h.empty() && h.front().step <= s - 3 * config.t_window) h.pop_front();
  }

  if (state.warmed_up) return state;
  if (s < config.t_warm) {
    for (std::size_t k = 0; k < tasks; ++k) {
      state.warmup_sum[k] += per_task_means[k];
    }
    ++state.warmup_count;
    for (std::size_t k = 0; k < tasks; ++k) {
      state.baselines[k] = state.warmup_sum[k] / static_cast<double>(state.warmup_count);
    }
    return state;
  }
  // s == t_warm: freeze. A one-step warm-up has no earlier samples; fall back
  // to the sample at the freeze step.
  if (state.warmup_count == 0) {
    for (std::size_t k = 0; k < tasks; ++k) state.baselines[k] = per_task_means[k];
  }
  state.warmed_up = true;
  return state;
}

CoefficientState record_metrics(CoefficientState state, const std::map<std::size_t, MetricValue>& per_task_means,
                                const DcaConfig& config) {
  std::vector<double> values(state.task_count());
  for (std::size_t k = 0; k < values.size(); ++k) {
    const auto it = per_task_means.find(k);
    if (it == per_task_means.end()) throw UsageError("record_metrics: missing sample for task " + std::to_string(k));
    values[k] = it->second.value;
  }
  if (per_task_means.size() != values.size()) throw UsageError("record_metrics: sample for unknown task");
  return record_metrics(std::move(state), values, config);
}

bool adjustment_due(const CoefficientState& state, const DcaConfig& config) {
  return state.warmed_up && state.step % config.t_window == 0 &&
         state.step >= config.t_warm + 3 * config.t_window;
}

double window_mean(const std::deque<MetricSample>& history, std::int64_t from, std::int64_t to) {
  double sum = 0.0;
  std::int64_t n = 0;
  for (const auto& sample : history) {
    if (sample.step > from && sample.step <= to) {
      sum += sample.value;
      ++n;
    }
  }
  if (n == 0) throw UsageError("window_mean: empty window");
  return sum / static_cast<double>(n);
}

std::vector<double> rescale(std::vector<double> coefficients) {
  if (coefficients.empty()) return coefficients;
  const double lo = *std::min_element(coefficients.begin(), coefficients.end());
  if (!(lo > 0.0)) throw UsageError("rescale: coefficients must be > 0");
  for (double& l : coefficients) l /= lo;
  return coefficients;
}

CoefficientState adjust(CoefficientState state, const DcaConfig& config, AdjustmentEvent* event) {
  const std::int64_t s = state.step;
  if (!state.warmed_up || s <= config.t_warm) {
    throw UsageError("adjust: called before warm-up finished (step " + std::to_string(s) + ")");
  }
  if (s % config.t_window != 0) {
    throw UsageError("adjust: step " + std::to_string(s) + " is not a multiple of T");
  }
  const std::size_t tasks = state.task_count();
  if (config.tau_high.size() != tasks) throw UsageError("adjust: tau_high must hold one value per task");

  // Ramp-in: the windows are only trusted once 3T post-warm-up steps exist.
  if (s < config.t_warm + 3 * config.t_window) return state;

  AdjustmentEvent ev;
  ev.step = s;
  ev.tasks.resize(tasks);

  const std::int64_t t = config.t_window;
  for (std::size_t k = 0; k < tasks; ++k) {
    auto& a = ev.tasks[k];
    a.mu = window_mean(state.history[k], s - t, s);
    a.mu_past = window_mean(state.history[k], s - 3 * t, s - t);
    a.delta_total = (a.mu - state.baselines[k]) / std::max(state.baselines[k], config.b_floor);
    a.delta_recent = a.mu - a.mu_past;
    a.l_before = state.coefficients[k];
  }
  // argmin with ties to the lowest task index
  std::size_t laggard = 0;
  for (std::size_t k = 1; k < tasks; ++k) {
    if (ev.tasks[k].delta_total < ev.tasks[laggard].delta_total) laggard = k;
  }
  ev.laggard = laggard;

  for (std::size_t k = 0; k < tasks; ++k) {
    auto& a = ev.tasks[k];
    double& l = state.coefficients[k];
    if (a.delta_recent > config.eps_mom) {
      a.branch = DcaBranch::momentum;
    } else if (a.delta_recent < -config.eps_rescue) {
      a.branch = DcaBranch::rescue;
      l *= config.alpha_boost;
    } else if (a.delta_total > config.tau_high[k]) {
      a.branch = DcaBranch::decay;
      l = std::max(l * config.alpha_decay, 1.0);
    } else if (k == laggard) {
      a.branch = DcaBranch::laggard;
      l = std::min(l * config.alpha_boost, config.l_max);
    }
  }

  ev.rescale_divisor = *std::min_element(state.coefficients.begin(), state.coefficients.end());
  state.coefficients = rescale(std::move(state.coefficients));
  for (std::size_t k = 0; k < tasks; ++k) ev.tasks[k].l_after = state.coefficients[k];
  if (event) *event = std::move(ev);
  return state;
}

}  // namespace arspo
