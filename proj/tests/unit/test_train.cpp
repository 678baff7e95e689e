#include <doctest.h>

#include <sstream>

#include "arspo/config.hpp"
#include "arspo/train.hpp"
#include "helpers.hpp"

using namespace arspo;

namespace {

std::string trace_text(const TrainingTrace& t) {
  std::ostringstream out;
  write_trace_csv(t, out);
  write_coefficients_csv(t, out);
  return out.str();
}

}  // namespace

TEST_SUITE("train") {
  TEST_CASE("a single bandit improves") {
    auto doc = test_support::tiny_config(500);
    doc["environments"] = nlohmann::json::array(
        {{{"name", "cls2"}, {"kind", "classification-bandit"}, {"labels", 2}, {"targets", {1}}}});
    doc["tasks"] = nlohmann::json::array({{{"name", "only"}, {"env", "cls2"}}});
    doc["dca"] = {{"enabled", false}};
    doc["objective"] = {{"family", "grpo"}};
    const auto trace = train(parse_config(doc), 7);
    CHECK(trace.initial_capability(0) == doctest::Approx(0.5));
    CHECK(trace.final_capability(0) > 0.9);
    CHECK(trace.records.size() == 501);
  }

  TEST_CASE("zero steps records only the initial state") {
    const auto trace = train(parse_config(test_support::tiny_config(0)), 1);
    REQUIRE(trace.records.size() == 1);
    CHECK(trace.records[0].step == 0);
    CHECK(trace.records[0].tasks[0].branch == "init");
    CHECK(trace.delta_capability(1) == 0.0);
  }

  TEST_CASE("deterministic per seed") {
    const auto config = parse_config(test_support::tiny_config(40));
    const auto a = train(config, 5), b = train(config, 5), c = train(config, 6);
    CHECK(trace_text(a) == trace_text(b));
    CHECK(a.final_theta == b.final_theta);
    CHECK(trace_text(a) != trace_text(c));
  }

  TEST_CASE("parallel seeds match serial runs") {
    const auto config = parse_config(test_support::tiny_config(30));
    const auto many = train_seeds(config, {1, 2, 3}, 3);
    REQUIRE(many.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(many[i].seed == i + 1);
      CHECK(trace_text(many[i]) == trace_text(train(config, i + 1)));
    }
  }

  TEST_CASE("coefficient adjustments appear once warm-up and ramp-in pass") {
    const auto trace = train(parse_config(test_support::tiny_config(40)), 2);
    // t_warm 10, T 5: due at 25, 30, 35, 40.
    REQUIRE(trace.adjustments.size() == 4);
    CHECK(trace.adjustments.front().step == 25);
    for (const auto& rec : trace.records) {
      double lo = 1e300;
      for (const auto& t : rec.tasks) lo = std::min(lo, t.coefficient);
      CHECK(lo == 1.0);
    }
  }

  TEST_CASE("outputs") {
    const auto config = parse_config(test_support::tiny_config(12));
    const auto trace = train(config, 4);
    std::ostringstream csv;
    write_trace_csv(trace, csv);
    CHECK(csv.str().rfind("step,task,H,l,objective,grad_norm,branch\n", 0) == 0);

    const auto summary = summary_json(config, trace);
    CHECK(summary.at("schema_version") == 1);
    CHECK(summary.at("tasks").size() == 2);
    CHECK_FALSE(summary.contains("wall_time"));

    test_support::TempDir dir;
    write_run_outputs(config, trace, dir.path());
    CHECK(std::filesystem::exists(dir.path() / "trace_seed4.csv"));
    CHECK(std::filesystem::exists(dir.path() / "coefficients_seed4.csv"));
    CHECK(std::filesystem::exists(dir.path() / "summary_seed4.json"));
    CHECK(nlohmann::json::parse(test_support::read_file(dir.path() / "summary_seed4.json")) == summary);
  }

  TEST_CASE("number formatting round-trips") {
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(1.0) == "1");
    CHECK(std::stod(format_number(1.0 / 3.0)) == 1.0 / 3.0);
  }
}
