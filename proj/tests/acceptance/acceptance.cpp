// One PASS/FAIL line per acceptance criterion. Exit status 0 only when all pass.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "arspo/cli.hpp"
#include "arspo/config.hpp"
#include "arspo/train.hpp"
#include "arspo/verify.hpp"

#ifndef ARSPO_CONFIG_DIR
#define ARSPO_CONFIG_DIR "configs"
#endif

namespace fs = std::filesystem;
using namespace arspo;

namespace {

// Wall-clock budgets, seconds.
constexpr double kBudgetJacobian = 5.0;
constexpr double kBudgetGradients = 30.0;
constexpr double kBudgetRate = 60.0;
constexpr double kBudgetDca = 1.0;
constexpr double kBudgetRewards = 1.0;
constexpr double kBudgetSensitivity = 1.0;
constexpr double kBudgetImbalance = 600.0;

// Criterion 7.
constexpr std::size_t kSeedsRequired = 4;
constexpr double kEasyDegradationMax = 0.02;

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

Outcome from_suite(const SuiteReport& report) {
  double worst = 0.0;
  for (const auto& c : report.checks) {
    if (c.tolerance > 0.0) worst = std::max(worst, c.measured / c.tolerance);
  }
  std::string detail = std::to_string(report.checks.size()) + " checks, worst error/tolerance " + fmt(worst);
  if (const Check* bad = report.first_failure()) {
    detail += "; first failure: " + bad->name + " (measured " + fmt(bad->measured) + ", tolerance " +
              fmt(bad->tolerance) + ")";
  }
  return {report.passed(), detail};
}

Outcome imbalance(const fs::path& config_dir) {
  const ExperimentConfig grpo = load_config(config_dir / "imbalance_grpo.json");
  const ExperimentConfig arspo = load_config(config_dir / "imbalance_arspo.json");
  const auto& seeds = grpo.training.seeds;
  const auto base = train_seeds(grpo, seeds, std::thread::hardware_concurrency());
  const auto cand = train_seeds(arspo, seeds, std::thread::hardware_concurrency());

  constexpr std::size_t easy = 0, hard = 1;
  std::size_t matthew = 0, hard_wins = 0;
  double worst_easy_drop = 0.0;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    if (base[i].delta_capability(hard) < base[i].delta_capability(easy)) ++matthew;
    if (cand[i].final_capability(hard) > base[i].final_capability(hard)) ++hard_wins;
    worst_easy_drop = std::max(worst_easy_drop, base[i].final_capability(easy) - cand[i].final_capability(easy));
  }
  const bool ok = matthew >= kSeedsRequired && hard_wins >= kSeedsRequired && worst_easy_drop <= kEasyDegradationMax;
  std::ostringstream d;
  d << "GRPO dH_hard < dH_easy on " << matthew << "/" << seeds.size() << " seeds; ARSPO hard H above GRPO on "
    << hard_wins << "/" << seeds.size() << " seeds (seed 1: " << fmt(base[0].final_capability(hard)) << " -> "
    << fmt(cand[0].final_capability(hard)) << "); worst easy drop " << fmt(worst_easy_drop) << " (max "
    << fmt(kEasyDegradationMax) << ")";
  return {ok, d.str()};
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome determinism(const fs::path& config_dir) {
  // A shortened DCA config, so coefficient adjustments land in the compared outputs.
  auto doc = nlohmann::json::parse(read_file(config_dir / "imbalance_arspo.json"));
  doc["training"]["steps"] = 1300;
  doc["training"]["seeds"] = {1, 2};

  const fs::path root = fs::temp_directory_path() /
                        ("arspo_acceptance_" + std::to_string(std::chrono::steady_clock::now().time_since_epoch().count()));
  fs::create_directories(root);
  const fs::path cfg = root / "config.json";
  std::ofstream(cfg) << doc.dump(2);

  std::vector<fs::path> outs{root / "run1", root / "run2"};
  for (const auto& out : outs) {
    const std::string cfg_s = cfg.string(), out_s = out.string();
    const char* argv[] = {"arspo_lab", "run", "--config", cfg_s.c_str(), "--out", out_s.c_str()};
    std::ostringstream so, se;
    const int code = run_cli(6, argv, so, se);
    if (code != kExitOk) {
      fs::remove_all(root);
      return {false, "run exited with " + std::to_string(code) + ": " + se.str()};
    }
  }

  std::vector<std::string> names;
  for (const auto& e : fs::directory_iterator(outs[0])) names.push_back(e.path().filename().string());
  std::sort(names.begin(), names.end());
  std::size_t identical = 0, other_count = 0;
  for (const auto& e : fs::directory_iterator(outs[1])) {
    (void)e;
    ++other_count;
  }
  std::string mismatch;
  for (const auto& n : names) {
    if (read_file(outs[0] / n) == read_file(outs[1] / n)) {
      ++identical;
    } else if (mismatch.empty()) {
      mismatch = n;
    }
  }
  fs::remove_all(root);
  const bool ok = !names.empty() && identical == names.size() && other_count == names.size();
  std::string detail = std::to_string(identical) + "/" + std::to_string(names.size()) + " output files byte-identical";
  if (!mismatch.empty()) detail += "; first difference in " + mismatch;
  return {ok, detail};
}

struct Criterion {
  int id;
  std::string name;
  double budget;  // seconds; 0 means no runtime limit
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::vector<int> only;
  std::string config_dir = ARSPO_CONFIG_DIR;
  app.add_option("--only", only, "Run only these criteria");
  app.add_option("--configs", config_dir, "Directory holding the imbalance configs");
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> criteria{
      {1, "advantage Jacobian matches finite differences", kBudgetJacobian, [] { return from_suite(verify_jacobian()); }},
      {2, "objective gradients match finite differences", kBudgetGradients, [] { return from_suite(verify_gradients()); }},
      {3, "two-term rate decomposition and plateau witness", kBudgetRate,
       [] { return from_suite(verify_rate_decomposition()); }},
      {4, "coefficient scheduler golden traces", kBudgetDca, [] { return from_suite(verify_dca_golden()); }},
      {5, "reward stack unit values", kBudgetRewards, [] { return from_suite(verify_rewards()); }},
      {6, "sensitivity profiles", kBudgetSensitivity, [] { return from_suite(verify_sensitivity()); }},
      {7, "imbalance benchmark: hard-task gain", kBudgetImbalance, [&] { return imbalance(config_dir); }},
      {8, "byte-identical reruns", 0.0, [&] { return determinism(config_dir); }},
  };

  bool all = true;
  for (const auto& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_budget = c.budget == 0.0 || secs < c.budget;
    const bool passed = o.passed && in_budget;
    all = all && passed;
    std::cout << (passed ? "PASS" : "FAIL") << "  criterion " << c.id << ": " << c.name << " | " << o.detail << " | "
              << fmt(secs) << " s";
    if (c.budget > 0.0) std::cout << " (limit " << fmt(c.budget) << " s)";
    if (!in_budget) std::cout << " OVER BUDGET";
    std::cout << "\n" << std::flush;
  }
  return all ? 0 : 1;
}
