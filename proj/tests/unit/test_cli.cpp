#include <doctest.h>

#include <sstream>
#include <string>
#include <vector>

#include "arspo/cli.hpp"
#include "helpers.hpp"

using namespace arspo;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result cli(std::vector<std::string> args) {
  args.insert(args.begin(), "arspo_lab");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("verify") {
    const auto ok = cli({"verify", "--suite", "rewards"});
    CHECK(ok.code == kExitOk);
    CHECK(nlohmann::json::parse(ok.out).at("passed") == true);
    CHECK(ok.err.find("PASS") != std::string::npos);

    CHECK(cli({"verify", "--suite", "jacobian", "--inject-fault", "jacobian"}).code == kExitFailed);
    CHECK(cli({"verify", "--suite", "nonsense"}).code == kExitUsage);
  }

  TEST_CASE("usage errors") {
    CHECK(cli({}).code == kExitUsage);
    CHECK(cli({"frobnicate"}).code == kExitUsage);
    CHECK(cli({"run"}).code == kExitUsage);
    CHECK(cli({"run", "--config", "/nonexistent.json"}).code == kExitUsage);
  }

  TEST_CASE("run writes traces") {
    test_support::TempDir dir;
    const auto cfg = dir.path() / "cfg.json";
    test_support::write_file(cfg, test_support::tiny_config(8).dump());
    const auto r = cli({"run", "--config", cfg.string(), "--out", (dir.path() / "o").string(), "--seeds", "1,2"});
    CHECK(r.code == kExitOk);
    CHECK(std::filesystem::exists(dir.path() / "o" / "trace_seed1.csv"));
    CHECK(std::filesystem::exists(dir.path() / "o" / "summary_seed2.json"));

    CHECK(cli({"run", "--config", cfg.string(), "--seeds", "1,x"}).code == kExitUsage);

    auto bad = test_support::tiny_config(8);
    bad["training"]["bogus"] = true;
    test_support::write_file(cfg, bad.dump());
    const auto b = cli({"run", "--config", cfg.string(), "--out", dir.path().string()});
    CHECK(b.code == kExitUsage);
    CHECK(b.err.find("training.bogus") != std::string::npos);
  }

  TEST_CASE("compare") {
    test_support::TempDir dir;
    const auto a = dir.path() / "a.json", b = dir.path() / "b.json";
    test_support::write_file(a, test_support::tiny_config(6).dump());
    test_support::write_file(b, test_support::tiny_config(6).dump());
    const auto same = cli({"compare", a.string(), b.string(), "--out", (dir.path() / "cmp").string()});
    REQUIRE(same.code == kExitOk);
    const auto report = nlohmann::json::parse(test_support::read_file(dir.path() / "cmp" / "comparison.json"));
    CHECK(report.at("schema_version") == kComparisonSchemaVersion);
    for (const auto& s : report.at("seeds")) {
      for (const auto& d : s.at("delta_of_deltas")) CHECK(d == 0.0);
    }

    auto other = test_support::tiny_config(6);
    other["environments"][1]["resolution"] = 16;
    test_support::write_file(b, other.dump());
    CHECK(cli({"compare", a.string(), b.string(), "--out", (dir.path() / "cmp2").string()}).code == kExitUsage);
  }
}
