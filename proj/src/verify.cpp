#include "arspo/verify.hpp"

#include <algorithm>
#include <cfloat>
#include <charconv>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>

#include "arspo/dca.hpp"
#include "arspo/dynamics.hpp"
#include "arspo/env.hpp"
#include "arspo/errors.hpp"
#include "arspo/group_norm.hpp"
#include "arspo/objectives.hpp"
#include "arspo/reward_shaping.hpp"
#include "arspo/sampling.hpp"
#include "arspo/task.hpp"

namespace arspo {

bool SuiteReport::passed() const {
  return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

const Check* SuiteReport::first_failure() const {
  for (const Check& c : checks) {
    if (!c.passed) return &c;
  }
  return nullptr;
}

namespace {

void add(SuiteReport& suite, std::string name, double measured, double tolerance, std::string detail = {}) {
  const bool ok = std::isfinite(measured) && measured <= tolerance;
  suite.checks.push_back(Check{std::move(name), measured, tolerance, ok, std::move(detail)});
}

std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double uniform(std::mt19937_64& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

// ---------------------------------------------------------------- jacobian

Matrix closed_form_jacobian(const NormalizedGroup& group, bool fault) {
  Matrix j = advantage_jacobian(group);
  if (fault) {
    const double shift = 1.0 / (static_cast<double>(group.size()) * group.sigma);
    for (std::size_t i = 0; i < group.size(); ++i) j(i, i) += shift;
  }
  return j;
}

// ------------------------------------------------------------- gradients

struct GradientFixture {
  std::vector<TaskEnv> envs;
  PolicyModel policy;
  Batch batch;
  std::vector<double> coefficients;
};

std::vector<TaskEnv> gradient_envs() {
  return {TaskEnv::classification("cls3", 3, {0, 2}),
          TaskEnv::interval_grid("grid5", 5, {CellSpan{1, 2}, CellSpan{3, 3}}),
          TaskEnv::span_selection("span4", 4, {TokenIndexSet{1, 2}})};
}

bool near_clip_kink(const Batch& batch, const ObjectiveVariant& variant, double margin) {
  if (variant.is_sapo()) return false;
  const double eps = variant.is_grpo() ? std::get<GrpoFamily>(variant.family).epsilon
                                       : std::get<GspoFamily>(variant.family).epsilon;
  auto near = [&](double r) { return std::abs(r - (1.0 + eps)) < margin || std::abs(r - (1.0 - eps)) < margin; };
  for (const ResponseGroup& g : batch.groups) {
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (g.normalized.advantages[i] == 0.0) continue;
      const Response& r = g.responses[i];
      if (variant.is_gspo()) {
        if (near(gspo_sequence_ratio(r.new_logp, r.old_logp).value)) return true;
      } else {
        for (std::size_t t = 0; t < r.length(); ++t) {
          if (near(r.ratio(t))) return true;
        }
      }
    }
  }
  return false;
}

GradientFixture make_gradient_fixture(std::mt19937_64& rng, const ObjectiveVariant& variant, bool weighted) {
  for (;;) {
    std::vector<TaskEnv> envs = gradient_envs();
    std::vector<PolicyBlock> blocks;
    for (const TaskEnv& e : envs) blocks.push_back(e.policy_block());
    PolicyModel policy(blocks, uniform(rng, 0.7, 1.5));
    std::vector<double> theta(policy.parameter_count()), old(theta.size()), ref(theta.size());
    for (std::size_t i = 0; i < theta.size(); ++i) {
      theta[i] = 0.7 * normal01(rng);
      old[i] = theta[i] + uniform(rng, -0.3, 0.3);
      ref[i] = theta[i] + uniform(rng, -0.5, 0.5);
    }
    policy.set_theta(old);
    policy.snapshot_old();
    policy.set_reference(ref);

    Batch batch;
    double weight_sum = 0.0;
    for (std::size_t k = 0; k < envs.size(); ++k) {
      batch.task_weights.push_back(uniform(rng, 0.2, 1.0));
      weight_sum += batch.task_weights.back();
    }
    for (double& w : batch.task_weights) w /= weight_sum;

    std::size_t id = 0;
    for (std::size_t k = 0; k < envs.size(); ++k) {
      TaskSpec spec;
      spec.name = envs[k].name();
      spec.env = envs[k].name();
      spec.mapping = weighted && k > 0 ? RewardMapping::normalized_exponential(3.0) : RewardMapping::identity();
      for (std::size_t slot = 0; slot < 2; ++slot) {
        const std::size_t query = rng() % envs[k].contexts();
        batch.groups.push_back(sample_group(policy, envs[k], spec, k, query, 4, rng(), id++));
      }
    }
    policy.set_theta(theta);
    rescore(batch, policy);

    std::vector<double> coefficients;
    if (weighted) {
      for (std::size_t k = 0; k < envs.size(); ++k) coefficients.push_back(uniform(rng, 1.0, 4.0));
      coefficients = rescale(std::move(coefficients));
    }
    if (near_clip_kink(batch, variant, 1e-3)) continue;
    return GradientFixture{std::move(envs), std::move(policy), std::move(batch), std::move(coefficients)};
  }
}

double objective_at(const GradientFixture& fx, const ObjectiveVariant& variant, std::span<const double> theta) {
  PolicyModel policy = fx.policy;
  policy.set_theta(theta);
  Batch batch = fx.batch;
  rescore(batch, policy);
  return objective_value(batch, variant, fx.coefficients);
}

// ------------------------------------------------------------------ rate

std::vector<double> unit_vector(std::vector<double> v) {
  const double n = std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
  if (n > 0.0) {
    for (double& x : v) x /= n;
  }
  return v;
}

// -------------------------------------------------------------- dca golden

CoefficientState replay(const std::vector<std::vector<double>>& samples, const DcaConfig& config,
                        std::vector<AdjustmentEvent>* events) {
  CoefficientState state = make_coefficient_state(config.task_count());
  for (const auto& row : samples) {
    state = record_metrics(std::move(state), row, config);
    if (adjustment_due(state, config)) {
      AdjustmentEvent ev;
      state = adjust(std::move(state), config, &ev);
      if (events) events->push_back(std::move(ev));
    }
  }
  return state;
}

// Appends `count` steps of constant per-task values.
void hold(std::vector<std::vector<double>>& samples, std::size_t count, const std::vector<double>& values) {
  for (std::size_t i = 0; i < count; ++i) samples.push_back(values);
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return INFINITY;
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

std::string join_branches(const AdjustmentEvent& ev) {
  std::string out;
  for (const auto& t : ev.tasks) out += (out.empty() ? "" : ",") + std::string(to_string(t.branch));
  return out;
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"jacobian", "gradients", "dynamics", "dca-golden", "rewards"};
  return names;
}

SuiteReport run_suite(const std::string& name, const VerifyOptions& options) {
  if (name == "jacobian") return verify_jacobian(options);
  if (name == "gradients") return verify_gradients(options);
  if (name == "dynamics") return verify_dynamics(options);
  if (name == "dca-golden") return verify_dca_golden(options);
  if (name == "rewards") return verify_rewards(options);
  throw UsageError("unknown suite '" + name + "'");
}

SuiteReport verify_jacobian(const VerifyOptions& options) {
  SuiteReport suite{"jacobian", {}};
  std::mt19937_64 rng(options.seed);
  constexpr std::size_t kSizes[] = {2, 4, 8, 16};
  for (std::size_t n = 0; n < 50; ++n) {
    const std::size_t g = kSizes[n % 4];
    std::vector<double> rewards(g);
    NormalizedGroup group;
    do {
      const double scale = uniform(rng, 0.1, 3.0);
      for (double& r : rewards) r = scale * normal01(rng) + uniform(rng, -1.0, 1.0);
      group = normalize_group(rewards);
    } while (group.sigma < 1e-3);

    const Matrix j = closed_form_jacobian(group, options.inject_jacobian_fault);
    const double h = 1e-4 * group.sigma;
    const double entry_scale = 1.0 / (static_cast<double>(g) * group.sigma);
    double worst = 0.0;
    std::size_t wi = 0, wj = 0;
    for (std::size_t col = 0; col < g; ++col) {
      std::vector<double> up = rewards, down = rewards;
      up[col] += h;
      down[col] -= h;
      const auto a_up = normalize_group(up).advantages;
      const auto a_down = normalize_group(down).advantages;
      for (std::size_t row = 0; row < g; ++row) {
        const double fd = (a_up[row] - a_down[row]) / (2.0 * h);
        const double err = std::abs(fd - j(row, col)) / std::max(std::abs(j(row, col)), entry_scale);
        if (err > worst) {
          worst = err;
          wi = row;
          wj = col;
        }
      }
    }
    const std::string tag = "group " + std::to_string(n) + " (G=" + std::to_string(g) + ")";
    add(suite, tag + " entries vs finite differences", worst, kJacobianRelTol,
        "worst entry [" + std::to_string(wi) + "][" + std::to_string(wj) + "]");

    double row_sum = 0.0, null = 0.0, norm = 0.0;
    for (std::size_t row = 0; row < g; ++row) {
      double s = 0.0, ja = 0.0;
      for (std::size_t col = 0; col < g; ++col) {
        s += j(row, col);
        ja += j(row, col) * rewards[col];
      }
      row_sum = std::max(row_sum, std::abs(s));
      null = std::max(null, std::abs(ja));
      norm += rewards[row] * rewards[row];
    }
    add(suite, tag + " row sums", row_sum, kJacobianRowSumTol);
    add(suite, tag + " J.A / ||A||", null / std::sqrt(norm), kJacobianNullTol);
  }
  return suite;
}

SuiteReport verify_gradients(const VerifyOptions& options) {
  SuiteReport suite{"gradients", {}};
  std::mt19937_64 rng(options.seed + 1);
  // The last two entries add the exact-KL regularizer to the weighted objective.
  const std::vector<std::pair<ObjectiveVariant, bool>> cases{
      {ObjectiveVariant::grpo(0.2), false},         {ObjectiveVariant::grpo(0.2), true},
      {ObjectiveVariant::gspo(0.2), false},         {ObjectiveVariant::gspo(0.2), true},
      {ObjectiveVariant::sapo(1.0, 1.05), false},   {ObjectiveVariant::sapo(1.0, 1.05), true},
      {ObjectiveVariant::grpo(0.2, 0.05), true},    {ObjectiveVariant::sapo(1.0, 1.05, 0.05), true}};
  constexpr std::size_t kBatches = 20;
  constexpr double kStep = 1e-5;
  for (const auto& [variant, weighted] : cases) {
    {
      const std::string label = (weighted ? "arspo-weighted " : "") + variant.name() +
                                (variant.kl_beta > 0.0 ? " + kl " + fmt(variant.kl_beta) : "");
      double worst = 0.0;
      std::size_t worst_batch = 0;
      for (std::size_t b = 0; b < kBatches; ++b) {
        const GradientFixture fx = make_gradient_fixture(rng, variant, weighted);
        const auto analytic = objective_gradient(fx.batch, variant, fx.coefficients, fx.policy);
        std::vector<double> theta(fx.policy.theta().begin(), fx.policy.theta().end());
        double diff = 0.0, scale = 0.0;
        for (std::size_t i = 0; i < theta.size(); ++i) {
          const double keep = theta[i];
          theta[i] = keep + kStep;
          const double up = objective_at(fx, variant, theta);
          theta[i] = keep - kStep;
          const double down = objective_at(fx, variant, theta);
          theta[i] = keep;
          const double fd = (up - down) / (2.0 * kStep);
          diff = std::max(diff, std::abs(fd - analytic[i]));
          scale = std::max(scale, std::abs(analytic[i]));
        }
        const double rel = diff / std::max(scale, 1e-8);
        if (rel > worst || b == 0) {
          worst = std::max(worst, rel);
          worst_batch = b;
        }
      }
      add(suite, label + " gradient vs finite differences (" + std::to_string(kBatches) + " batches)", worst,
          kGradientRelTol, "worst batch " + std::to_string(worst_batch));
    }
  }
  return suite;
}

SuiteReport verify_rate_decomposition(const VerifyOptions& options) {
  SuiteReport suite{"rate-decomposition", {}};
  std::mt19937_64 rng(options.seed + 2);

  constexpr std::size_t kConfigs = 24;
  std::size_t done = 0;
  double worst = 0.0;
  std::string worst_detail;
  while (done < kConfigs) {
    const bool grid = done % 2 == 1;
    TaskEnv env = grid ? TaskEnv::interval_grid("grid5", 5, {CellSpan{1, 3}})
                       : TaskEnv::classification("cls3", 3, {1});
    PolicyModel policy({env.policy_block()}, uniform(rng, 0.6, 1.5));
    std::vector<double> theta(policy.parameter_count()), old(theta.size());
    for (std::size_t i = 0; i < theta.size(); ++i) {
      theta[i] = 0.8 * normal01(rng);
      old[i] = theta[i] + uniform(rng, -0.3, 0.3);
    }
    policy.set_old_snapshot(old);
    policy.set_reference(old);
    policy.set_theta(theta);

    TaskSpec spec;
    spec.mapping = RewardMapping::exponential(uniform(rng, 1.0, 3.0));
    const std::size_t g = 4 + rng() % 5;
    std::vector<std::vector<std::size_t>> responses(g);
    for (auto& tokens : responses) {
      for (std::size_t t = 0; t < env.positions(); ++t) tokens.push_back(rng() % env.vocab()[t]);
    }
    const ResponseGroup group = make_group(policy, env, spec, 0, 0, responses);

    RateProblem problem;
    problem.env = &env;
    problem.policy = &policy;
    problem.group = &group;
    problem.mapping = spec.mapping;
    problem.variant = ObjectiveVariant::sapo(uniform(rng, 0.5, 2.0), uniform(rng, 0.5, 2.0));
    problem.response = rng() % g;
    problem.token = rng() % env.positions();
    problem.direction.resize(policy.parameter_count());
    for (double& u : problem.direction) u = normal01(rng);
    problem.direction = unit_vector(std::move(problem.direction));

    const NormalizedGroup norm = rate_problem_group(problem, policy.theta());
    if (norm.degenerate || std::abs(norm.advantages[problem.response]) < 0.05) continue;

    const RateDecomposition rate = rate_decomposition(problem);
    const double fd = rate_decomposition_fd(problem);
    const double err = std::abs(rate.total - fd);
    const double tol = std::max(kRateAbsTol, kRateRelTol * std::abs(rate.total));
    const double ratio = err / tol;
    if (ratio > worst || done == 0) {
      worst = std::max(worst, ratio);
      worst_detail = "config " + std::to_string(done) + ": total " + fmt(rate.total) + ", oracle " + fmt(fd);
    }
    add(suite, "config " + std::to_string(done) + (grid ? " (grid)" : " (classification)") + " total vs oracle", err,
        tol, "term_1 " + fmt(rate.term_1) + ", term_2 " + fmt(rate.term_2) + ", oracle " + fmt(fd));
    ++done;
  }

  // Plateau witness: the same direction through an easy and a plateaued hard task.
  std::vector<TaskEnv> envs{TaskEnv::classification("easy", 2, {0}),
                            TaskEnv::interval_grid("hard", 64, {CellSpan{30, 31}})};
  PolicyModel policy({envs[0].policy_block(), envs[1].policy_block()}, 1.0);
  make_plateau_policy(policy, envs[1], 1, 20.0);
  policy.snapshot_old();
  policy.set_reference(policy.theta());
  TaskSpec spec;
  spec.mapping = RewardMapping::exponential(3.0);
  const ResponseGroup easy = make_group(policy, envs[0], spec, 0, 0, {{0}, {1}, {0}, {1}});
  const ResponseGroup hard = make_group(policy, envs[1], spec, 1, 0, {{30, 31}, {29, 31}, {0, 0}, {10, 12}});

  std::vector<double> direction(policy.parameter_count(), 0.0);
  policy.add_log_prob_gradient(0, 0, 0, 0, 1.0, direction);
  policy.add_log_prob_gradient(1, 0, 0, 30, 1.0, direction);
  for (std::size_t k = 0; k < envs.size(); ++k) {
    const Capability cap = expected_capability(policy, envs[k], k, 0);
    for (std::size_t i = 0; i < direction.size(); ++i) direction[i] += cap.gradient[i];
  }
  direction = unit_vector(std::move(direction));

  auto witness = [&](const TaskEnv& env, const ResponseGroup& group) {
    RateProblem p;
    p.env = &env;
    p.policy = &policy;
    p.group = &group;
    p.mapping = spec.mapping;
    p.variant = ObjectiveVariant::sapo(1.0, 1.05);
    p.direction = direction;
    p.response = 0;
    p.token = 0;
    return rate_decomposition(p);
  };
  const RateDecomposition easy_rate = witness(envs[0], easy);
  const RateDecomposition hard_rate = witness(envs[1], hard);
  add(suite, "plateau witness: hard |term_2|", std::abs(hard_rate.term_2), kPlateauHardTol,
      "grad H . u = " + fmt(hard_rate.c_task));
  add(suite, "plateau witness: easy |term_2| exceeds floor", kPlateauEasyMin - std::abs(easy_rate.term_2), 0.0,
      "easy term_2 = " + fmt(easy_rate.term_2) + " (must exceed " + fmt(kPlateauEasyMin) + ")");
  return suite;
}

SuiteReport verify_sensitivity(const VerifyOptions& options) {
  SuiteReport suite{"sensitivity", {}};
  std::mt19937_64 rng(options.seed + 3);
  const RewardMapping identity = RewardMapping::identity();
  const RewardMapping convex = RewardMapping::normalized_exponential(3.0);

  double identity_dev = 0.0;
  std::size_t argmax_misses = 0, non_strict = 0;
  for (std::size_t n = 0; n < 100; ++n) {
    const std::size_t g = n % 2 == 0 ? 4 : 8;
    std::vector<MetricValue> metrics;
    std::vector<double> raw;
    for (;;) {
      raw.assign(g, 0.0);
      for (double& x : raw) x = uniform01(rng);
      std::vector<double> sorted = raw;
      std::sort(sorted.begin(), sorted.end());
      if (sorted[g - 1] - sorted[g - 2] > 1e-6) break;
    }
    metrics.clear();
    for (double x : raw) metrics.push_back(MetricValue::make(x, MetricKind::iou));
    const std::size_t best = static_cast<std::size_t>(std::max_element(raw.begin(), raw.end()) - raw.begin());

    identity_dev = std::max(identity_dev, std::abs(sensitivity_profile(metrics, identity).max_over_mean() - 1.0));
    const SensitivityProfile p = sensitivity_profile(metrics, convex);
    if (p.argmax() != best) ++argmax_misses;
    for (std::size_t i = 0; i < g; ++i) {
      if (i != best && !(p.values[best] > p.values[i])) ++non_strict;
    }
  }
  add(suite, "identity profile max/mean == 1 on 100 groups", identity_dev, 0.0);
  add(suite, "normalized exponential(3): top-metric response is the argmax on 100 groups",
      static_cast<double>(argmax_misses), 0.0);
  add(suite, "normalized exponential(3): maximum is strict", static_cast<double>(non_strict), 0.0);

  {
    const std::vector<MetricValue> m{MetricValue::make(0.2, MetricKind::iou), MetricValue::make(0.8, MetricKind::iou)};
    const auto p = sensitivity_profile(m, RewardMapping::exponential(3.0));
    const double expected = 6.0496474644129461;
    add(suite, "exp(3x) profile ratio on [0.2, 0.8] == e^1.8", std::abs(p.values[1] / p.values[0] - expected) / expected,
        1e-14);
  }

  add(suite, "dominance_ratio(0.9, 0.4, 3) == e^1.5", std::abs(dominance_ratio(0.9, 0.4, 3.0) - 4.4816890703380648),
      1e-14);
  add(suite, "dominance_ratio(0.4, 0.9, 3) == e^-1.5",
      std::abs(dominance_ratio(0.4, 0.9, 3.0) - 0.22313016014842983), 1e-16);

  // Exact-ratio identity and Self/Cross consistency on random groups.
  double ratio_err = 0.0, split_err = 0.0, uniform_err = 0.0;
  for (std::size_t n = 0; n < 50; ++n) {
    const double a = uniform(rng, 0.5, 4.0);
    const RewardMapping g = RewardMapping::exponential(a);
    const std::size_t size = 2 + n % 7;
    std::vector<double> x(size), rewards(size), grads(size);
    const double h_prime = uniform(rng, -2.0, 2.0);
    for (std::size_t i = 0; i < size; ++i) {
      x[i] = uniform01(rng);
      rewards[i] = g(x[i]);
      grads[i] = g.derivative(x[i]) * h_prime;
    }
    const double rel = std::abs((grads[0] / grads[1]) / dominance_ratio(x[0], x[1], a) - 1.0);
    ratio_err = std::max(ratio_err, rel);

    const NormalizedGroup group = normalize_group(rewards);
    if (group.degenerate) continue;
    const auto report = total_advantage_derivative_report(group, grads);
    const auto direct = directional_advantage_derivative(group, grads);
    for (std::size_t i = 0; i < size; ++i) {
      split_err = std::max(split_err, std::abs(report.self_term[i] + report.cross_term[i] - direct[i]));
    }
    const std::vector<double> flat(size, h_prime);
    const auto uniform_report = total_advantage_derivative_report(group, flat);
    for (std::size_t i = 0; i < size; ++i) {
      uniform_err = std::max(uniform_err, std::abs(uniform_report.self_term[i] + uniform_report.cross_term[i]));
    }
  }
  add(suite, "exponential mapping: A'_i/A'_j == dominance_ratio", ratio_err, 8 * DBL_EPSILON);
  add(suite, "self + cross == directional derivative", split_err, kDecompositionTol);
  add(suite, "uniform A': self and cross cancel", uniform_err, kDecompositionTol);
  return suite;
}

SuiteReport verify_dynamics(const VerifyOptions& options) {
  SuiteReport suite{"dynamics", {}};
  for (const SuiteReport& part : {verify_rate_decomposition(options), verify_sensitivity(options)}) {
    for (Check c : part.checks) {
      c.name = part.name + ": " + c.name;
      suite.checks.push_back(std::move(c));
    }
  }
  return suite;
}

SuiteReport verify_dca_golden(const VerifyOptions&) {
  SuiteReport suite{"dca-golden", {}};

  // Worked example: B = {0.5, 0.2}; windows cls (0.62 | 0.55), loc (0.19 | 0.21).
  {
    DcaConfig config;
    config.tau_high = {kTauHighClassification, kTauHighTextVideoLocalization};
    std::vector<std::vector<double>> samples;
    hold(samples, 800, {0.5, 0.2});
    hold(samples, 200, {0.55, 0.21});
    hold(samples, 100, {0.62, 0.19});
    std::vector<AdjustmentEvent> events;
    const CoefficientState state = replay(samples, config, &events);
    add(suite, "worked example: one adjustment at s = 1100",
        events.size() == 1 && events[0].step == 1100 ? 0.0 : 1.0, 0.0);
    const std::vector<double> expected{1.0, 1.1};
    add(suite, "worked example: coefficients {1.0, 1.1}", max_abs_diff(state.coefficients, expected), 0.0);
    add(suite, "worked example: branches momentum, laggard",
        !events.empty() && join_branches(events[0]) == "momentum,laggard" ? 0.0 : 1.0, 0.0,
        events.empty() ? "no event" : join_branches(events[0]));
  }

  // Every branch: momentum, rescue, decay and laggard fire at s = 1100; the
  // second adjustment repeats rescue/decay and resolves a laggard tie.
  {
    DcaConfig config;
    config.tau_high = {kTauHighClassification, kTauHighImageLocalization, kTauHighTextVideoLocalization,
                       kTauHighTextVideoLocalization};
    std::vector<std::vector<double>> samples;
    hold(samples, 800, {0.5, 0.5, 0.2, 0.1});
    hold(samples, 200, {0.5, 0.8, 0.5, 0.1});
    hold(samples, 100, {0.6, 0.6, 0.5, 0.1});
    hold(samples, 100, {0.6, 0.5, 0.5, 0.1});
    std::vector<AdjustmentEvent> events;
    const CoefficientState state = replay(samples, config, &events);
    add(suite, "branch trace: adjustments at 1100 and 1200",
        events.size() == 2 && events[0].step == 1100 && events[1].step == 1200 ? 0.0 : 1.0, 0.0);
    if (events.size() == 2) {
      add(suite, "branch trace: first adjustment fires every branch",
          join_branches(events[0]) == "momentum,rescue,decay,laggard" ? 0.0 : 1.0, 0.0, join_branches(events[0]));
      std::vector<double> first;
      for (const auto& t : events[0].tasks) first.push_back(t.l_after);
      add(suite, "branch trace: coefficients after 1100", max_abs_diff(first, {1.0, 1.1, 1.0, 1.1}), 0.0);
      add(suite, "branch trace: tie goes to the lowest index, which already rescued",
          events[1].laggard == 1 && join_branches(events[1]) == "momentum,rescue,decay,none" ? 0.0 : 1.0, 0.0,
          join_branches(events[1]));
      add(suite, "branch trace: coefficients after 1200",
          max_abs_diff(state.coefficients, {1.0, 1.1 * 1.1, 1.0, 1.1}), 0.0);
    }
    add(suite, "branch trace: baselines frozen", max_abs_diff(state.baselines, {0.5, 0.5, 0.2, 0.1}), 1e-15);
  }

  // Isolated branch examples on a short schedule (t_warm = 2, T = 1): the
  // first adjustment is at s = 5 with mu = sample 5 and mu_past = samples 3-4.
  {
    DcaConfig config;
    config.t_warm = 2;
    config.t_window = 1;
    config.tau_high = {kTauHighClassification};
    CoefficientState flat = make_coefficient_state(1);
    for (double v : {0.5, 0.5, 0.575, 0.575, 0.575}) {
      flat = record_metrics(std::move(flat), std::vector<double>{v}, config);
    }
    AdjustmentEvent ev;
    flat = adjust(std::move(flat), config, &ev);
    add(suite, "decay clamps at 1 (delta_total 0.15 > tau_high 0.10)",
        ev.tasks.size() == 1 && ev.tasks[0].branch == DcaBranch::decay && flat.coefficients[0] == 1.0 ? 0.0 : 1.0,
        0.0);

    DcaConfig three = config;
    three.tau_high.assign(3, kTauHighClassification);
    CoefficientState r = make_coefficient_state(3);
    const std::vector<std::vector<double>> rows{
        {0.5, 0.5, 0.5}, {0.5, 0.5, 0.5}, {0.5, 0.65, 0.525}, {0.5, 0.65, 0.525}, {0.5, 0.5, 0.525}};
    for (const auto& row : rows) r = record_metrics(std::move(r), row, three);
    AdjustmentEvent rev;
    r = adjust(std::move(r), three, &rev);
    // Task 1 drops by 0.15 and is rescued although it ties task 0 as laggard;
    // task 0 takes the laggard boost and task 2 (delta_total 0.05) is untouched.
    add(suite, "rescue fires before the laggard check (delta_recent = -0.15)",
        join_branches(rev) == "laggard,rescue,none" ? 0.0 : 1.0, 0.0, join_branches(rev));
    add(suite, "rescue and laggard coefficients", max_abs_diff(r.coefficients, {1.1, 1.1, 1.0}), 0.0);
  }

  {
    DcaConfig config;
    config.t_warm = 3;
    config.tau_high = {kTauHighClassification};
    CoefficientState s = make_coefficient_state(1);
    for (double v : {0.4, 0.6, 0.9, 0.1}) s = record_metrics(std::move(s), std::vector<double>{v}, config);
    add(suite, "baseline is the warm-up mean and stays frozen", std::abs(s.baselines[0] - 0.5), 0.0);
  }

  add(suite, "rescale [2.0, 1.5, 3.0]", max_abs_diff(rescale({2.0, 1.5, 3.0}), {2.0 / 1.5, 1.0, 2.0}), 0.0);
  add(suite, "rescale [0.9, 1.8]", max_abs_diff(rescale({0.9, 1.8}), {1.0, 2.0}), 0.0);
  add(suite, "rescale [1, 1, 1]", max_abs_diff(rescale({1.0, 1.0, 1.0}), {1.0, 1.0, 1.0}), 0.0);
  return suite;
}

SuiteReport verify_rewards(const VerifyOptions&) {
  SuiteReport suite{"rewards", {}};
  struct FormatCase {
    const char* text;
    double expected;
  };
  const FormatCase cases[] = {
      {"<think>reason</think><answer>[0.1, 0.4]</answer>", 0.2},
      {"<think>a\nb</think><answer>\nc\n</answer>", 0.2},
      {"<think></think><answer></answer>", 0.2},
      {"preamble<think>a</think><answer>b</answer>", 0.0},
      {"<think>a</think><answer>b</answer>trailing", 0.0},
      {"<answer>b</answer><think>a</think>", 0.0},
      {"<think>a</think>", 0.0},
      {"<think>a</think> <answer>b</answer>", 0.0},
  };
  double format_err = 0.0;
  std::string failing;
  for (const auto& c : cases) {
    const double err = std::abs(format_reward(c.text) - c.expected);
    if (err > format_err) failing = c.text;
    format_err = std::max(format_err, err);
  }
  add(suite, "format reward in {0, 0.2} on the pattern fixtures", format_err, 0.0, failing);

  const std::vector<char> abab{'a', 'b', 'a', 'b', 'a', 'b'};
  add(suite, "repetition penalty [a,b,a,b,a,b], n=3 == -0.5",
      std::abs(repetition_penalty(std::span<const char>(abab), 3, -1.0) + 0.5), 0.0);

  const RewardMapping g = RewardMapping::normalized_exponential(3.0);
  add(suite, "normalized exponential(3) at 0 == 0", std::abs(g(0.0)), 0.0);
  add(suite, "normalized exponential(3) at 1 == 1", std::abs(g(1.0) - 1.0), DBL_EPSILON);
  add(suite, "normalized exponential(3) at 0.5", std::abs(g(0.5) - 0.18242552380635634), kMidpointTol,
      "(e^1.5 - 1)/(e^3 - 1) = 0.182425523806356");

  for (double tau : {0.5, 1.0, 2.0, 5.0}) {
    const ObjectiveVariant sapo = ObjectiveVariant::sapo(tau, tau);
    const double worst =
        std::max(std::abs(f_derivative(sapo, 1.0, 1.0) - 1.0), std::abs(f_derivative(sapo, 1.0, -1.0) - 1.0));
    add(suite, "SAPO f'(1) == 1 at tau = " + fmt(tau), worst, DBL_EPSILON);
  }
  return suite;
}

nlohmann::json to_json(const Check& c) {
  return {{"name", c.name},
          {"measured", std::isfinite(c.measured) ? nlohmann::json(c.measured) : nlohmann::json(nullptr)},
          {"tolerance", c.tolerance},
          {"passed", c.passed},
          {"detail", c.detail}};
}

nlohmann::json to_json(const SuiteReport& suite) {
  nlohmann::json checks = nlohmann::json::array();
  for (const Check& c : suite.checks) checks.push_back(to_json(c));
  return {{"name", suite.name}, {"passed", suite.passed()}, {"checks", checks}};
}

nlohmann::json verify_report_json(const std::vector<SuiteReport>& suites) {
  nlohmann::json list = nlohmann::json::array();
  bool ok = !suites.empty();
  for (const SuiteReport& s : suites) {
    list.push_back(to_json(s));
    ok = ok && s.passed();
  }
  return {{"schema_version", kVerifySchemaVersion}, {"passed", ok}, {"suites", list}};
}

}  // namespace arspo
