#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>

#include <json.hpp>

namespace test_support {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
    path_ = std::filesystem::temp_directory_path() /
            ("arspo_unit_" + std::to_string(stamp) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

// Two-task config small enough for unit tests.
inline nlohmann::json tiny_config(int steps = 60) {
  auto doc = nlohmann::json::parse(R"({
    "schema_version": 1,
    "environments": [
      {"name": "cls2", "kind": "classification-bandit", "labels": 2, "contexts": 2, "targets": [0, 1]},
      {"name": "grid8", "kind": "interval-grid-localization", "resolution": 8, "targets": [[2, 3]]}
    ],
    "tasks": [
      {"name": "easy", "env": "cls2"},
      {"name": "hard", "env": "grid8", "mapping": {"kind": "normalized_exponential", "alpha": 3}}
    ],
    "objective": {"family": "sapo", "tau_pos": 1.0, "tau_neg": 1.05, "kl_beta": 0.01},
    "dca": {"t_warm": 10, "t_window": 5},
    "training": {"steps": 0, "step_size": 0.1, "group_size": 4, "seed": 3}
  })");
  doc["training"]["steps"] = steps;
  return doc;
}

}  // namespace test_support
