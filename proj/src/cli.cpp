#include "arspo/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "arspo/config.hpp"
#include "arspo/errors.hpp"
#include "arspo/train.hpp"
#include "arspo/verify.hpp"

namespace arspo {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr const char* kDefaultOutDir = "arspo_out";
constexpr const char* kOutEnv = "ARSPO_LAB_OUT";

struct Options {
  std::vector<std::string> configs;
  std::string out;
  std::string seeds;
  std::size_t workers = 0;
  std::string suite = "all";
  std::string fault;
};

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty() || item.find_first_not_of("0123456789") != std::string::npos) {
      throw UsageError("--seeds expects a comma-separated list of non-negative integers, got '" + text + "'");
    }
    seeds.push_back(std::stoull(item));
  }
  if (seeds.empty()) throw UsageError("--seeds must name at least one seed");
  return seeds;
}

fs::path output_directory(const Options& opt, const ExperimentConfig& config) {
  if (!opt.out.empty()) return opt.out;
  if (!config.output_directory.empty()) return config.output_directory;
  if (const char* env = std::getenv(kOutEnv); env && *env) return env;
  return kDefaultOutDir;
}

std::size_t worker_count(const Options& opt) {
  if (opt.workers > 0) return opt.workers;
  return std::max(1u, std::thread::hardware_concurrency());
}

ExperimentConfig load_with_overrides(const std::string& path, const Options& opt) {
  if (!fs::exists(path)) throw UsageError("config file not found: " + path);
  ExperimentConfig config = load_config(path);
  if (!opt.seeds.empty()) config.training.seeds = parse_seeds(opt.seeds);
  return config;
}

void write_json(const fs::path& path, const json& doc) {
  fs::create_directories(path.parent_path().empty() ? fs::path(".") : path.parent_path());
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot write " + path.string());
  f << doc.dump(2) << '\n';
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int cmd_verify(const Options& opt, std::ostream& out, std::ostream& err) {
  std::vector<std::string> names;
  if (opt.suite == "all") {
    names = suite_names();
  } else {
    const auto& known = suite_names();
    if (std::find(known.begin(), known.end(), opt.suite) == known.end()) {
      err << "error: unknown suite '" << opt.suite << "' (expected one of: all";
      for (const auto& n : known) err << ", " << n;
      err << ")\n";
      return kExitUsage;
    }
    names = {opt.suite};
  }
  if (!opt.fault.empty() && opt.fault != "jacobian") {
    err << "error: unknown fault '" << opt.fault << "'\n";
    return kExitUsage;
  }
  VerifyOptions options;
  options.inject_jacobian_fault = opt.fault == "jacobian";

  std::vector<SuiteReport> reports;
  for (const auto& name : names) {
    const auto t0 = std::chrono::steady_clock::now();
    reports.push_back(run_suite(name, options));
    const SuiteReport& r = reports.back();
    err << (r.passed() ? "PASS " : "FAIL ") << name << " (" << r.checks.size() << " checks, " << seconds_since(t0)
        << " s)";
    if (const Check* c = r.first_failure()) {
      err << ": " << c->name << " measured " << c->measured << " > " << c->tolerance;
      if (!c->detail.empty()) err << " [" << c->detail << "]";
    }
    err << '\n';
  }
  const json report = verify_report_json(reports);
  out << report.dump(2) << '\n';
  if (!opt.out.empty()) write_json(fs::path(opt.out) / "verify_report.json", report);
  return report["passed"].get<bool>() ? kExitOk : kExitFailed;
}

int cmd_run(const Options& opt, std::ostream& out, std::ostream& err) {
  if (opt.configs.size() != 1) throw UsageError("run expects exactly one --config");
  const ExperimentConfig config = load_with_overrides(opt.configs[0], opt);
  const fs::path dir = output_directory(opt, config);
  const auto t0 = std::chrono::steady_clock::now();
  const auto traces = train_seeds(config, config.training.seeds, worker_count(opt));
  for (const TrainingTrace& trace : traces) {
    write_run_outputs(config, trace, dir);
    out << (dir / ("trace_seed" + std::to_string(trace.seed) + ".csv")).string() << '\n';
  }
  err << "wall time " << seconds_since(t0) << " s for " << traces.size() << " run(s)\n";
  return kExitOk;
}

json task_deltas(const TrainingTrace& trace) {
  json d = json::object();
  for (std::size_t k = 0; k < trace.task_names.size(); ++k) d[trace.task_names[k]] = trace.delta_capability(k);
  return d;
}

int cmd_compare(const Options& opt, std::ostream& out, std::ostream& err) {
  if (opt.configs.size() != 2) throw UsageError("compare expects exactly two configs");
  const ExperimentConfig a = load_with_overrides(opt.configs[0], opt);
  const ExperimentConfig b = load_with_overrides(opt.configs[1], opt);
  const json ja = to_json(a), jb = to_json(b);
  if (ja["environments"] != jb["environments"]) throw UsageError("compare: the configs use different environments");
  if (a.tasks.size() != b.tasks.size()) throw UsageError("compare: the configs define different task lists");
  for (std::size_t k = 0; k < a.tasks.size(); ++k) {
    if (a.tasks[k].name != b.tasks[k].name || a.tasks[k].env != b.tasks[k].env) {
      throw UsageError("compare: task " + std::to_string(k) + " differs between the configs");
    }
  }
  if (a.training.steps != b.training.steps) throw UsageError("compare: the configs use different step budgets");
  if (a.training.seeds != b.training.seeds) throw UsageError("compare: the configs use different seed lists");

  const fs::path dir = output_directory(opt, a);
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t workers = worker_count(opt);
  const auto runs_a = train_seeds(a, a.training.seeds, workers);
  const auto runs_b = train_seeds(b, b.training.seeds, workers);
  for (const auto& t : runs_a) write_run_outputs(a, t, dir / "a");
  for (const auto& t : runs_b) write_run_outputs(b, t, dir / "b");

  // The hard task is the one that starts lowest.
  std::size_t hard = 0;
  for (std::size_t k = 1; k < a.tasks.size(); ++k) {
    if (runs_a.front().initial_capability(k) < runs_a.front().initial_capability(hard)) hard = k;
  }

  json seeds = json::array();
  std::size_t wins = 0;
  for (std::size_t i = 0; i < runs_a.size(); ++i) {
    const TrainingTrace& ta = runs_a[i];
    const TrainingTrace& tb = runs_b[i];
    json dd = json::object();
    for (std::size_t k = 0; k < ta.task_names.size(); ++k) {
      dd[ta.task_names[k]] = tb.delta_capability(k) - ta.delta_capability(k);
    }
    const bool win = tb.final_capability(hard) > ta.final_capability(hard);
    wins += win ? 1 : 0;
    seeds.push_back({{"seed", ta.seed},
                     {"delta_H_a", task_deltas(ta)},
                     {"delta_H_b", task_deltas(tb)},
                     {"delta_of_deltas", dd},
                     {"hard_final_a", ta.final_capability(hard)},
                     {"hard_final_b", tb.final_capability(hard)},
                     {"hard_task_win", win}});
  }
  const json report{{"schema_version", kComparisonSchemaVersion},
                    {"config_a", opt.configs[0]},
                    {"config_b", opt.configs[1]},
                    {"method_a", a.objective.name() + (a.dca_enabled ? "+dca" : "")},
                    {"method_b", b.objective.name() + (b.dca_enabled ? "+dca" : "")},
                    {"hard_task", a.tasks[hard].name},
                    {"runs", runs_a.size()},
                    {"hard_task_wins", wins},
                    {"seeds", seeds}};
  write_json(dir / "comparison.json", report);
  out << report.dump(2) << '\n';
  err << "wall time " << seconds_since(t0) << " s for " << 2 * runs_a.size() << " run(s)\n";
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-task RL objective lab: verification suites, experiments and comparisons", "arspo_lab"};
  app.require_subcommand(1);
  Options opt;

  auto* verify = app.add_subcommand("verify", "Run the finite-difference and golden verification suites");
  verify->add_option("--suite", opt.suite, "all, jacobian, gradients, dynamics, dca-golden or rewards");
  verify->add_option("--out", opt.out, "Also write verify_report.json into this directory");
  verify->add_option("--inject-fault", opt.fault, "Mutation fixture (jacobian)")->group("");

  auto* run = app.add_subcommand("run", "Train one config and write traces");
  run->add_option("--config", opt.configs, "Experiment config (JSON)")->required()->expected(1);
  run->add_option("--out", opt.out, "Output directory");
  run->add_option("--seeds", opt.seeds, "Comma-separated seed list overriding the config");
  run->add_option("--workers", opt.workers, "Parallel runs (default: hardware threads)");

  auto* compare = app.add_subcommand("compare", "Run two configs over shared seeds and compare task gains");
  compare->add_option("configs,--config", opt.configs, "Baseline and candidate configs")->required()->expected(2);
  compare->add_option("--out", opt.out, "Output directory");
  compare->add_option("--seeds", opt.seeds, "Comma-separated seed list overriding both configs");
  compare->add_option("--workers", opt.workers, "Parallel runs (default: hardware threads)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kExitUsage;
  }

  try {
    if (verify->parsed()) return cmd_verify(opt, out, err);
    if (run->parsed()) return cmd_run(opt, out, err);
    return cmd_compare(opt, out, err);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const NumericalError& e) {
    err << "numerical error at step " << e.step() << ": " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailed;
  }
}

}  // namespace arspo
