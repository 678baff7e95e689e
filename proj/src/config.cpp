#include "arspo/config.hpp"

#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "arspo/errors.hpp"
#include "arspo/sampling.hpp"

namespace arspo {
namespace {

using nlohmann::json;

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

std::string index_path(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

// Object reader that tracks consumed keys so leftovers can be rejected.
class Section {
 public:
  Section(const json& doc, std::string path) : doc_(doc), path_(std::move(path)) {
    if (!doc_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
  }

  bool has(const std::string& key) const { return doc_.contains(key); }

  const json& raw(const std::string& key) {
    const auto it = doc_.find(key);
    if (it == doc_.end()) throw ConfigError(path(key), "missing required key");
    seen_.insert(key);
    return *it;
  }

  std::string path(const std::string& key) const { return join(path_, key); }

  double number(const std::string& key, std::optional<double> fallback = std::nullopt) {
    if (!has(key)) return require(key, fallback);
    const json& v = raw(key);
    if (!v.is_number()) throw ConfigError(path(key), "expected a number");
    return v.get<double>();
  }

  std::int64_t integer(const std::string& key, std::optional<std::int64_t> fallback = std::nullopt) {
    if (!has(key)) return require(key, fallback);
    const json& v = raw(key);
    if (!v.is_number_integer()) throw ConfigError(path(key), "expected an integer");
    return v.get<std::int64_t>();
  }

  std::size_t count(const std::string& key, std::optional<std::size_t> fallback = std::nullopt) {
    if (!has(key)) return require(key, fallback);
    const std::int64_t v = integer(key);
    if (v < 0) throw ConfigError(path(key), "must be non-negative");
    return static_cast<std::size_t>(v);
  }

  bool boolean(const std::string& key, std::optional<bool> fallback = std::nullopt) {
    if (!has(key)) return require(key, fallback);
    const json& v = raw(key);
    if (!v.is_boolean()) throw ConfigError(path(key), "expected a boolean");
    return v.get<bool>();
  }

  std::string string(const std::string& key, std::optional<std::string> fallback = std::nullopt) {
    if (!has(key)) return require(key, fallback);
    const json& v = raw(key);
    if (!v.is_string()) throw ConfigError(path(key), "expected a string");
    return v.get<std::string>();
  }

  void finish() const {
    for (const auto& [key, value] : doc_.items()) {
      (void)value;
      if (!seen_.count(key)) throw ConfigError(path(key), "unknown key");
    }
  }

 private:
  template <class T>
  T require(const std::string& key, const std::optional<T>& fallback) const {
    if (!fallback) throw ConfigError(path(key), "missing required key");
    return *fallback;
  }

  const json& doc_;
  std::string path_;
  std::set<std::string> seen_;
};

std::vector<std::vector<double>> number_rows(const json& v, const std::string& path) {
  if (!v.is_array()) throw ConfigError(path, "expected an array");
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const json& row = v[i];
    std::vector<double> values;
    if (row.is_number()) {
      values.push_back(row.get<double>());
    } else if (row.is_array()) {
      for (std::size_t j = 0; j < row.size(); ++j) {
        if (!row[j].is_number()) throw ConfigError(index_path(index_path(path, i), j), "expected a number");
        values.push_back(row[j].get<double>());
      }
    } else {
      throw ConfigError(index_path(path, i), "expected a number or an array of numbers");
    }
    rows.push_back(std::move(values));
  }
  return rows;
}

std::size_t as_index(double v, const std::string& path) {
  if (v < 0.0 || v != static_cast<double>(static_cast<std::int64_t>(v))) {
    throw ConfigError(path, "expected a non-negative integer");
  }
  return static_cast<std::size_t>(v);
}

EnvironmentConfig parse_environment(const json& doc, const std::string& path) {
  Section s(doc, path);
  EnvironmentConfig env;
  env.name = s.string("name");
  if (env.name.empty()) throw ConfigError(s.path("name"), "must not be empty");
  try {
    env.kind = parse_env_kind(s.string("kind"));
  } catch (const UsageError& e) {
    throw ConfigError(s.path("kind"), e.what());
  }
  env.contexts = s.count("contexts", 1);
  env.labels = s.count("labels", 2);
  env.resolution = s.count("resolution", 16);
  env.length = s.count("length", 16);
  env.target_width = s.count("target_width", 1);
  if (s.has("seed")) env.seed = static_cast<std::uint64_t>(s.integer("seed"));
  if (s.has("targets")) env.targets = number_rows(s.raw("targets"), s.path("targets"));
  if (s.has("candidates")) env.candidates = number_rows(s.raw("candidates"), s.path("candidates"));
  s.finish();

  if (env.targets.empty() && !env.seed) {
    throw ConfigError(join(path, "targets"), "give explicit targets or a seed to draw them from");
  }
  if (!env.targets.empty() && env.seed) {
    throw ConfigError(join(path, "seed"), "targets and seed are mutually exclusive");
  }
  if (!env.candidates.empty() && env.kind != EnvKind::interval_grid) {
    throw ConfigError(join(path, "candidates"), "only interval-grid-localization takes candidates");
  }
  if (env.contexts == 0) throw ConfigError(join(path, "contexts"), "must be >= 1");
  if (env.target_width == 0) throw ConfigError(join(path, "target_width"), "must be >= 1");
  return env;
}

// Draws `contexts` targets of width target_width when the config names a seed.
void expand_targets(EnvironmentConfig& env, const std::string& path) {
  if (!env.targets.empty()) return;
  std::mt19937_64 rng(*env.seed);
  auto draw = [&](std::size_t bound) {
    return static_cast<std::size_t>(uniform01(rng) * static_cast<double>(bound));
  };
  for (std::size_t c = 0; c < env.contexts; ++c) {
    switch (env.kind) {
      case EnvKind::classification_bandit:
        env.targets.push_back({static_cast<double>(draw(env.labels))});
        break;
      case EnvKind::interval_grid: {
        if (!env.candidates.empty()) {
          env.targets.push_back(env.candidates[draw(env.candidates.size())]);
          break;
        }
        if (env.target_width > env.resolution) throw ConfigError(join(path, "target_width"), "exceeds resolution");
        const std::size_t first = draw(env.resolution - env.target_width + 1);
        env.targets.push_back({static_cast<double>(first), static_cast<double>(first + env.target_width - 1)});
        break;
      }
      case EnvKind::box_grid: {
        if (env.target_width > env.resolution) throw ConfigError(join(path, "target_width"), "exceeds resolution");
        const std::size_t x = draw(env.resolution - env.target_width + 1);
        const std::size_t y = draw(env.resolution - env.target_width + 1);
        const double w = static_cast<double>(env.target_width - 1);
        env.targets.push_back({static_cast<double>(x), static_cast<double>(y), x + w, y + w});
        break;
      }
      case EnvKind::span_selection: {
        if (env.target_width > env.length) throw ConfigError(join(path, "target_width"), "exceeds length");
        const std::size_t first = draw(env.length - env.target_width + 1);
        std::vector<double> row;
        for (std::size_t i = 0; i < env.target_width; ++i) row.push_back(static_cast<double>(first + i));
        env.targets.push_back(std::move(row));
        break;
      }
    }
  }
  env.seed.reset();
}

TaskEnv build_environment(const EnvironmentConfig& env, const std::string& path) {
  const std::string tpath = join(path, "targets");
  auto expect_width = [&](std::size_t i, std::size_t n) {
    if (env.targets[i].size() != n) {
      throw ConfigError(index_path(tpath, i), "expected " + std::to_string(n) + " values");
    }
  };
  try {
    switch (env.kind) {
      case EnvKind::classification_bandit: {
        std::vector<std::size_t> labels;
        for (std::size_t i = 0; i < env.targets.size(); ++i) {
          expect_width(i, 1);
          labels.push_back(as_index(env.targets[i][0], index_path(tpath, i)));
        }
        return TaskEnv::classification(env.name, env.labels, labels);
      }
      case EnvKind::interval_grid: {
        if (!env.candidates.empty()) {
          auto to_interval = [&](const std::vector<double>& row, const std::string& p) {
            if (row.size() != 2) throw ConfigError(p, "expected [start, end]");
            return Interval{row[0], row[1]};
          };
          std::vector<Interval> candidates, targets;
          for (std::size_t i = 0; i < env.candidates.size(); ++i) {
            candidates.push_back(to_interval(env.candidates[i], index_path(join(path, "candidates"), i)));
          }
          for (std::size_t i = 0; i < env.targets.size(); ++i) {
            targets.push_back(to_interval(env.targets[i], index_path(tpath, i)));
          }
          return TaskEnv::interval_candidates(env.name, candidates, targets);
        }
        std::vector<CellSpan> spans;
        for (std::size_t i = 0; i < env.targets.size(); ++i) {
          expect_width(i, 2);
          const std::string p = index_path(tpath, i);
          spans.push_back(CellSpan{as_index(env.targets[i][0], p), as_index(env.targets[i][1], p)});
        }
        return TaskEnv::interval_grid(env.name, env.resolution, spans);
      }
      case EnvKind::box_grid: {
        std::vector<CellBox> boxes;
        for (std::size_t i = 0; i < env.targets.size(); ++i) {
          expect_width(i, 4);
          const std::string p = index_path(tpath, i);
          const auto& r = env.targets[i];
          boxes.push_back(CellBox{CellSpan{as_index(r[0], p), as_index(r[2], p)},
                                  CellSpan{as_index(r[1], p), as_index(r[3], p)}});
        }
        return TaskEnv::box_grid(env.name, env.resolution, boxes);
      }
      case EnvKind::span_selection: {
        std::vector<TokenIndexSet> sets;
        for (std::size_t i = 0; i < env.targets.size(); ++i) {
          TokenIndexSet set;
          for (double v : env.targets[i]) set.insert(static_cast<std::int64_t>(as_index(v, index_path(tpath, i))));
          sets.push_back(std::move(set));
        }
        return TaskEnv::span_selection(env.name, env.length, sets);
      }
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(path, e.what());
  }
  throw ConfigError(path, "unsupported environment kind");
}

AuxiliaryRewards parse_auxiliary(const json& doc, const std::string& path) {
  Section s(doc, path);
  AuxiliaryRewards aux;
  aux.format = s.boolean("format", aux.format);
  aux.format_bonus = s.number("format_bonus", aux.format_bonus);
  aux.repetition = s.boolean("repetition", aux.repetition);
  aux.ngram = s.count("ngram", aux.ngram);
  aux.lambda_pen = s.number("lambda_pen", aux.lambda_pen);
  s.finish();
  if (aux.ngram == 0) throw ConfigError(join(path, "ngram"), "must be >= 1");
  if (aux.lambda_pen > 0.0) throw ConfigError(join(path, "lambda_pen"), "must be <= 0");
  return aux;
}

ObjectiveVariant parse_objective(const json& doc, const std::string& path) {
  Section s(doc, path);
  const std::string family = s.string("family", "grpo");
  const double kl_beta = s.number("kl_beta", 0.01);
  ObjectiveVariant variant;
  if (family == "grpo" || family == "gspo") {
    variant.family = family == "grpo" ? decltype(variant.family){GrpoFamily{s.number("epsilon", 0.2)}}
                                      : decltype(variant.family){GspoFamily{s.number("epsilon", 0.2)}};
  } else if (family == "sapo") {
    variant.family = SapoFamily{s.number("tau_pos", 1.0), s.number("tau_neg", 1.05)};
  } else {
    throw ConfigError(s.path("family"), "expected grpo, gspo or sapo");
  }
  variant.kl_beta = kl_beta;
  s.finish();
  try {
    variant.validate();
  } catch (const Error& e) {
    throw ConfigError(path, e.what());
  }
  return variant;
}

DcaConfig parse_dca(const json& doc, const std::string& path, bool& enabled) {
  Section s(doc, path);
  DcaConfig dca;
  enabled = s.boolean("enabled", true);
  dca.t_warm = s.integer("t_warm", dca.t_warm);
  dca.t_window = s.integer("t_window", dca.t_window);
  dca.alpha_boost = s.number("alpha_boost", dca.alpha_boost);
  dca.alpha_decay = s.number("alpha_decay", dca.alpha_decay);
  dca.eps_mom = s.number("eps_mom", dca.eps_mom);
  dca.eps_rescue = s.number("eps_rescue", dca.eps_rescue);
  dca.l_max = s.number("l_max", dca.l_max);
  dca.b_floor = s.number("b_floor", dca.b_floor);
  s.finish();
  return dca;
}

TrainingConfig parse_training(const json& doc, const std::string& path) {
  Section s(doc, path);
  TrainingConfig t;
  t.steps = s.integer("steps", t.steps);
  t.step_size = s.number("step_size", t.step_size);
  t.group_size = s.count("group_size", t.group_size);
  t.temperature = s.number("temperature", t.temperature);
  if (s.has("seed") && s.has("seeds")) throw ConfigError(s.path("seeds"), "seed and seeds are mutually exclusive");
  if (s.has("seed")) {
    t.seeds = {static_cast<std::uint64_t>(s.integer("seed"))};
  } else if (s.has("seeds")) {
    const json& v = s.raw("seeds");
    if (!v.is_array() || v.empty()) throw ConfigError(s.path("seeds"), "expected a non-empty array of integers");
    t.seeds.clear();
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number_integer() || v[i].get<std::int64_t>() < 0) {
        throw ConfigError(index_path(s.path("seeds"), i), "expected a non-negative integer");
      }
      t.seeds.push_back(v[i].get<std::uint64_t>());
    }
  }
  t.groups_per_task = s.count("groups_per_task", t.groups_per_task);
  t.inner_steps = s.count("inner_steps", t.inner_steps);
  t.init_scale = s.number("init_scale", t.init_scale);
  t.sigma_floor = s.number("sigma_floor", t.sigma_floor);
  s.finish();
  return t;
}

}  // namespace

RewardMapping parse_mapping(const json& doc, const std::string& path) {
  if (doc.is_string()) {
    const std::string kind = doc.get<std::string>();
    if (kind == "identity") return RewardMapping::identity();
    throw ConfigError(path, "only identity may be given as a bare string");
  }
  Section s(doc, path);
  const std::string kind = s.string("kind");
  RewardMapping mapping;
  try {
    if (kind == "identity") {
      mapping = RewardMapping::identity();
    } else if (kind == "exponential") {
      mapping = RewardMapping::exponential(s.number("a", 3.0));
    } else if (kind == "normalized_exponential") {
      mapping = RewardMapping::normalized_exponential(s.number("alpha", RewardDefaults{}.alpha));
    } else if (kind == "step") {
      mapping = RewardMapping::step(s.number("tau"));
    } else if (kind == "relaxed") {
      const double lambda = s.number("lambda");
      const RewardMapping inner =
          s.has("inner") ? parse_mapping(s.raw("inner"), s.path("inner")) : RewardMapping::identity();
      mapping = RewardMapping::relaxed(lambda, inner);
    } else {
      throw ConfigError(s.path("kind"), "expected identity, exponential, normalized_exponential, step or relaxed");
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(path, e.what());
  }
  s.finish();
  return mapping;
}

void ExperimentConfig::validate() const {
  if (environments.empty()) throw ConfigError("environments", "at least one environment is required");
  if (tasks.empty()) throw ConfigError("tasks", "at least one task is required");
  std::set<std::string> env_names, task_names;
  for (std::size_t i = 0; i < environments.size(); ++i) {
    if (!env_names.insert(environments[i].name).second) {
      throw ConfigError(index_path("environments", i) + ".name", "duplicate environment name");
    }
  }
  for (std::size_t k = 0; k < tasks.size(); ++k) {
    const std::string p = index_path("tasks", k);
    if (!task_names.insert(tasks[k].name).second) throw ConfigError(p + ".name", "duplicate task name");
    if (!env_names.count(tasks[k].env)) throw ConfigError(p + ".env", "unknown environment '" + tasks[k].env + "'");
    if (!(tasks[k].weight > 0.0)) throw ConfigError(p + ".weight", "must be > 0");
    if (!(tasks[k].tau_high > 0.0 && tasks[k].tau_high <= 1.0)) {
      throw ConfigError(p + ".tau_high", "must lie in (0, 1]");
    }
  }
  const auto& t = training;
  if (t.steps < 0) throw ConfigError("training.steps", "must be >= 0");
  if (!(t.step_size > 0.0)) throw ConfigError("training.step_size", "must be > 0");
  if (t.group_size < 2) throw ConfigError("training.group_size", "must be >= 2");
  if (!(t.temperature > 0.0)) throw ConfigError("training.temperature", "must be > 0");
  if (t.groups_per_task < 1) throw ConfigError("training.groups_per_task", "must be >= 1");
  if (t.inner_steps < 1) throw ConfigError("training.inner_steps", "must be >= 1");
  if (t.init_scale < 0.0) throw ConfigError("training.init_scale", "must be >= 0");
  if (!(t.sigma_floor > 0.0)) throw ConfigError("training.sigma_floor", "must be > 0");
  if (t.seeds.empty()) throw ConfigError("training.seeds", "must not be empty");
  if (!(objective.kl_beta >= 0.0)) throw ConfigError("objective.kl_beta", "must be >= 0");
  if (dca_enabled) {
    dca.validate();
  }
}

std::vector<TaskEnv> ExperimentConfig::build_environments() const {
  std::vector<TaskEnv> out;
  for (const TaskSpec& task : tasks) {
    for (std::size_t i = 0; i < environments.size(); ++i) {
      if (environments[i].name == task.env) {
        EnvironmentConfig env = environments[i];
        expand_targets(env, index_path("environments", i));
        out.push_back(build_environment(env, index_path("environments", i)));
        break;
      }
    }
  }
  if (out.size() != tasks.size()) throw ConfigError("tasks", "task references an unknown environment");
  return out;
}

ExperimentConfig parse_config(const json& doc) {
  Section root(doc, "");
  const std::int64_t version = root.integer("schema_version");
  if (version != kConfigSchemaVersion) {
    throw ConfigError("schema_version", "unsupported version " + std::to_string(version));
  }
  ExperimentConfig config;

  const json& envs = root.raw("environments");
  if (!envs.is_array()) throw ConfigError("environments", "expected an array");
  for (std::size_t i = 0; i < envs.size(); ++i) {
    const std::string p = index_path("environments", i);
    config.environments.push_back(parse_environment(envs[i], p));
    expand_targets(config.environments.back(), p);
  }

  std::map<std::string, TaskKind> env_kinds;
  for (std::size_t i = 0; i < config.environments.size(); ++i) {
    env_kinds.emplace(config.environments[i].name,
                      build_environment(config.environments[i], index_path("environments", i)).task_kind());
  }

  const json& tasks = root.raw("tasks");
  if (!tasks.is_array()) throw ConfigError("tasks", "expected an array");
  for (std::size_t k = 0; k < tasks.size(); ++k) {
    const std::string p = index_path("tasks", k);
    Section s(tasks[k], p);
    TaskSpec spec;
    spec.env = s.string("env");
    spec.name = s.string("name", spec.env);
    spec.mapping = s.has("mapping") ? parse_mapping(s.raw("mapping"), s.path("mapping")) : RewardMapping::identity();
    spec.weight = s.number("weight", 1.0);
    const auto kind = env_kinds.find(spec.env);
    if (kind == env_kinds.end()) throw ConfigError(s.path("env"), "unknown environment '" + spec.env + "'");
    spec.tau_high = s.number("tau_high", default_tau_high(kind->second));
    if (s.has("auxiliary")) spec.auxiliary = parse_auxiliary(s.raw("auxiliary"), s.path("auxiliary"));
    s.finish();
    config.tasks.push_back(std::move(spec));
  }

  if (root.has("objective")) config.objective = parse_objective(root.raw("objective"), "objective");
  if (root.has("dca")) config.dca = parse_dca(root.raw("dca"), "dca", config.dca_enabled);
  for (const TaskSpec& t : config.tasks) config.dca.tau_high.push_back(t.tau_high);
  if (root.has("training")) config.training = parse_training(root.raw("training"), "training");
  if (root.has("output")) {
    Section s(root.raw("output"), "output");
    config.output_directory = s.string("directory", "");
    s.finish();
  }
  root.finish();
  config.validate();
  (void)config.build_environments();
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot open " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("<file>", std::string("invalid JSON: ") + e.what());
  }
  return parse_config(doc);
}

json to_json(const RewardMapping& mapping) {
  if (mapping.is_relaxed()) {
    return json{{"kind", "relaxed"}, {"lambda", mapping.relax_lambda()}, {"inner", to_json(mapping.inner())}};
  }
  return std::visit(
      [](const auto& m) -> json {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, IdentityMap>) {
          return json{{"kind", "identity"}};
        } else if constexpr (std::is_same_v<M, ExponentialMap>) {
          return json{{"kind", "exponential"}, {"a", m.a}};
        } else if constexpr (std::is_same_v<M, NormalizedExponentialMap>) {
          return json{{"kind", "normalized_exponential"}, {"alpha", m.alpha}};
        } else {
          return json{{"kind", "step"}, {"tau", m.tau}};
        }
      },
      mapping.base());
}

json to_json(const ExperimentConfig& config) {
  json doc;
  doc["schema_version"] = kConfigSchemaVersion;
  doc["environments"] = json::array();
  for (const EnvironmentConfig& env : config.environments) {
    json e{{"name", env.name}, {"kind", std::string(to_string(env.kind))}, {"contexts", env.contexts}};
    switch (env.kind) {
      case EnvKind::classification_bandit: e["labels"] = env.labels; break;
      case EnvKind::interval_grid:
      case EnvKind::box_grid: e["resolution"] = env.resolution; break;
      case EnvKind::span_selection: e["length"] = env.length; break;
    }
    e["target_width"] = env.target_width;
    if (env.seed) e["seed"] = *env.seed;
    if (!env.targets.empty()) e["targets"] = env.targets;
    if (!env.candidates.empty()) e["candidates"] = env.candidates;
    doc["environments"].push_back(std::move(e));
  }
  doc["tasks"] = json::array();
  for (const TaskSpec& t : config.tasks) {
    const auto& a = t.auxiliary;
    doc["tasks"].push_back(json{{"name", t.name},
                                {"env", t.env},
                                {"mapping", to_json(t.mapping)},
                                {"weight", t.weight},
                                {"tau_high", t.tau_high},
                                {"auxiliary",
                                 {{"format", a.format},
                                  {"format_bonus", a.format_bonus},
                                  {"repetition", a.repetition},
                                  {"ngram", a.ngram},
                                  {"lambda_pen", a.lambda_pen}}}});
  }
  json obj{{"family", config.objective.name()}, {"kl_beta", config.objective.kl_beta}};
  std::visit(
      [&](const auto& f) {
        using F = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<F, SapoFamily>) {
          obj["tau_pos"] = f.tau_pos;
          obj["tau_neg"] = f.tau_neg;
        } else {
          obj["epsilon"] = f.epsilon;
        }
      },
      config.objective.family);
  doc["objective"] = obj;
  const DcaConfig& d = config.dca;
  doc["dca"] = json{{"enabled", config.dca_enabled}, {"t_warm", d.t_warm},       {"t_window", d.t_window},
                    {"alpha_boost", d.alpha_boost},  {"alpha_decay", d.alpha_decay}, {"eps_mom", d.eps_mom},
                    {"eps_rescue", d.eps_rescue},    {"l_max", d.l_max},         {"b_floor", d.b_floor}};
  const TrainingConfig& t = config.training;
  doc["training"] = json{{"steps", t.steps},
                         {"step_size", t.step_size},
                         {"group_size", t.group_size},
                         {"temperature", t.temperature},
                         {"seeds", t.seeds},
                         {"groups_per_task", t.groups_per_task},
                         {"inner_steps", t.inner_steps},
                         {"init_scale", t.init_scale},
                         {"sigma_floor", t.sigma_floor}};
  doc["output"] = json{{"directory", config.output_directory}};
  return doc;
}

}  // namespace arspo
