#include "arspo/train.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <random>
#include <thread>

#include "arspo/env.hpp"
#include "arspo/errors.hpp"
#include "arspo/objectives.hpp"
#include "arspo/policy.hpp"
#include "arspo/sampling.hpp"

namespace arspo {
namespace {

// Stream tag for parameter initialisation, disjoint from per-task sampling.
constexpr std::uint64_t kInitStream = ~std::uint64_t{0};

void require_finite(std::span<const double> values, std::int64_t step, const char* what) {
  for (double v : values) {
    if (!std::isfinite(v)) throw NumericalError(step, std::string("non-finite ") + what);
  }
}

double block_norm(std::span<const double> grad, std::size_t begin, std::size_t end) {
  double sq = 0.0;
  for (std::size_t i = begin; i < end; ++i) sq += grad[i] * grad[i];
  return std::sqrt(sq);
}

std::vector<double> capabilities(const PolicyModel& policy, const std::vector<TaskEnv>& envs) {
  std::vector<double> out;
  for (std::size_t k = 0; k < envs.size(); ++k) out.push_back(expected_capability(policy, envs[k], k).value);
  return out;
}

}  // namespace

std::string format_number(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

TrainingTrace train(const ExperimentConfig& config) { return train(config, config.training.seeds.front()); }

TrainingTrace train(const ExperimentConfig& config, std::uint64_t seed) {
  config.validate();
  const std::vector<TaskEnv> envs = config.build_environments();
  const TrainingConfig& tc = config.training;
  const std::size_t tasks = envs.size();

  std::vector<PolicyBlock> blocks;
  for (const TaskEnv& env : envs) blocks.push_back(env.policy_block());
  PolicyModel policy(std::move(blocks), tc.temperature);
  if (tc.init_scale > 0.0) {
    std::mt19937_64 rng(derive_seed(seed, 0, kInitStream, 0));
    std::vector<double> theta(policy.parameter_count());
    for (double& v : theta) v = tc.init_scale * normal01(rng);
    policy.set_theta(theta);
  }
  policy.set_reference(policy.theta());
  policy.snapshot_old();

  double weight_sum = 0.0;
  for (const TaskSpec& t : config.tasks) weight_sum += t.weight;
  std::vector<double> weights;
  for (const TaskSpec& t : config.tasks) weights.push_back(t.weight / weight_sum);

  DcaConfig dca = config.dca;
  dca.tau_high.clear();
  for (const TaskSpec& t : config.tasks) dca.tau_high.push_back(t.tau_high);
  CoefficientState state = make_coefficient_state(tasks);

  TrainingTrace trace;
  trace.seed = seed;
  for (const TaskSpec& t : config.tasks) trace.task_names.push_back(t.name);

  StepRecord initial;
  for (double h : capabilities(policy, envs)) initial.tasks.push_back(TaskRecord{h, 1.0, 0.0, 0.0, 0.0, "init"});
  trace.records.push_back(std::move(initial));

  const GradientOptions options{true};
  const std::vector<double> unit(tasks, 1.0);
  for (std::int64_t step = 1; step <= tc.steps; ++step) {
    policy.snapshot_old();
    Batch batch;
    batch.task_weights = weights;
    std::vector<double> metric_mean(tasks, 0.0);
    std::size_t group_id = 0;
    for (std::size_t k = 0; k < tasks; ++k) {
      std::size_t count = 0;
      for (std::size_t slot = 0; slot < tc.groups_per_task; ++slot) {
        std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(step), k, slot));
        const auto query = std::min(envs[k].contexts() - 1,
                                    static_cast<std::size_t>(uniform01(rng) * static_cast<double>(envs[k].contexts())));
        ResponseGroup group =
            sample_group(policy, envs[k], config.tasks[k], k, query, tc.group_size, rng(), group_id++);
        group.normalized = normalize_group(group.normalized.raw, tc.sigma_floor);
        for (const Response& r : group.responses) metric_mean[k] += r.metric.value;
        count += group.size();
        batch.groups.push_back(std::move(group));
      }
      metric_mean[k] /= static_cast<double>(count);
    }

    std::vector<std::string> branches(tasks, "none");
    if (config.dca_enabled) {
      state = record_metrics(std::move(state), metric_mean, dca);
      if (adjustment_due(state, dca)) {
        AdjustmentEvent event;
        state = adjust(std::move(state), dca, &event);
        if (!event.tasks.empty()) {
          for (std::size_t k = 0; k < tasks; ++k) branches[k] = std::string(to_string(event.tasks[k].branch));
          trace.adjustments.push_back(std::move(event));
        }
      }
    }
    const std::vector<double>& coefficients = config.dca_enabled ? state.coefficients : unit;

    StepRecord record;
    record.step = step;
    record.tasks.resize(tasks);
    for (std::size_t inner = 0; inner < tc.inner_steps; ++inner) {
      rescore(batch, policy);
      const std::vector<double> grad = objective_gradient(batch, config.objective, coefficients, policy, options);
      require_finite(grad, step, "gradient");
      if (inner == 0) {
        const ObjectiveTerms terms = objective_terms(batch, config.objective, coefficients);
        for (std::size_t k = 0; k < tasks; ++k) {
          record.tasks[k].objective = terms.surrogate[k] + terms.kl[k];
          record.tasks[k].grad_norm = block_norm(grad, policy.task_begin(k), policy.task_end(k));
        }
      }
      auto theta = policy.theta();
      for (std::size_t i = 0; i < theta.size(); ++i) theta[i] += tc.step_size * grad[i];
      require_finite(policy.theta(), step, "parameters");
    }

    const std::vector<double> h = capabilities(policy, envs);
    require_finite(h, step, "expected capability");
    for (std::size_t k = 0; k < tasks; ++k) {
      record.tasks[k].capability = h[k];
      record.tasks[k].coefficient = coefficients[k];
      record.tasks[k].mean_metric = metric_mean[k];
      record.tasks[k].branch = branches[k];
    }
    trace.records.push_back(std::move(record));
  }

  trace.baselines = state.baselines;
  trace.final_theta.assign(policy.theta().begin(), policy.theta().end());
  return trace;
}

std::vector<TrainingTrace> train_seeds(const ExperimentConfig& config, const std::vector<std::uint64_t>& seeds,
                                       std::size_t workers) {
  std::vector<TrainingTrace> out(seeds.size());
  std::vector<std::exception_ptr> errors(seeds.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < seeds.size(); i = next++) {
      try {
        out[i] = train(config, seeds[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t n = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(seeds.size(), 1));
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < n; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

void write_trace_csv(const TrainingTrace& trace, std::ostream& out) {
  out << "step,task,H,l,objective,grad_norm,branch\n";
  for (const StepRecord& r : trace.records) {
    for (std::size_t k = 0; k < r.tasks.size(); ++k) {
      const TaskRecord& t = r.tasks[k];
      out << r.step << ',' << trace.task_names[k] << ',' << format_number(t.capability) << ','
          << format_number(t.coefficient) << ',' << format_number(t.objective) << ',' << format_number(t.grad_norm)
          << ',' << t.branch << '\n';
    }
  }
}

void write_coefficients_csv(const TrainingTrace& trace, std::ostream& out) {
  out << "step,task,l,B,mu,mu_past,delta_total,branch_fired\n";
  for (const AdjustmentEvent& e : trace.adjustments) {
    for (std::size_t k = 0; k < e.tasks.size(); ++k) {
      const TaskAdjustment& a = e.tasks[k];
      const double baseline = k < trace.baselines.size() ? trace.baselines[k] : 0.0;
      out << e.step << ',' << trace.task_names[k] << ',' << format_number(a.l_after) << ','
          << format_number(baseline) << ',' << format_number(a.mu) << ',' << format_number(a.mu_past) << ','
          << format_number(a.delta_total) << ',' << to_string(a.branch) << '\n';
    }
  }
}

nlohmann::json summary_json(const ExperimentConfig& config, const TrainingTrace& trace) {
  nlohmann::json tasks = nlohmann::json::array();
  for (std::size_t k = 0; k < trace.task_names.size(); ++k) {
    tasks.push_back({{"name", trace.task_names[k]},
                     {"H_initial", trace.initial_capability(k)},
                     {"H_final", trace.final_capability(k)},
                     {"delta_H", trace.delta_capability(k)},
                     {"l_final", trace.records.back().tasks[k].coefficient},
                     {"baseline", k < trace.baselines.size() ? trace.baselines[k] : 0.0}});
  }
  return {{"schema_version", kSummarySchemaVersion},
          {"seed", trace.seed},
          {"steps", trace.records.back().step},
          {"tasks", tasks},
          {"dca_adjustments", trace.adjustments.size()},
          {"config", to_json(config)}};
}

void write_run_outputs(const ExperimentConfig& config, const TrainingTrace& trace,
                       const std::filesystem::path& directory) {
  std::filesystem::create_directories(directory);
  const std::string suffix = "_seed" + std::to_string(trace.seed);
  auto open = [&](const std::string& name) {
    std::ofstream f(directory / name, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot write " + (directory / name).string());
    return f;
  };
  {
    auto f = open("trace" + suffix + ".csv");
    write_trace_csv(trace, f);
  }
  {
    auto f = open("coefficients" + suffix + ".csv");
    write_coefficients_csv(trace, f);
  }
  {
    auto f = open("summary" + suffix + ".json");
    f << summary_json(config, trace).dump(2) << '\n';
  }
}

}  // namespace arspo
