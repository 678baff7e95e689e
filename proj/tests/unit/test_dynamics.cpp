#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "arspo/dynamics.hpp"
#include "arspo/errors.hpp"
#include "arspo/sampling.hpp"

using namespace arspo;

namespace {

std::vector<MetricValue> metrics_of(std::initializer_list<double> xs) {
  std::vector<MetricValue> out;
  for (double x : xs) out.push_back(MetricValue::make(x, MetricKind::iou));
  return out;
}

}  // namespace

TEST_SUITE("dynamics") {
  TEST_CASE("stat factor") {
    CHECK(stat_factor(0.0, 4) == 3.0);
    CHECK(stat_factor(std::sqrt(3.0), 4) == doctest::Approx(0.0).scale(1.0));
    CHECK_THROWS_AS(stat_factor(0.0, 1), UsageError);
  }

  TEST_CASE("sensitivity profiles") {
    const auto m = metrics_of({0.1, 0.5, 0.9, 0.3});
    const auto flat = sensitivity_profile(m, RewardMapping::identity());
    CHECK(flat.max_over_mean() == 1.0);
    const auto convex = sensitivity_profile(m, RewardMapping::normalized_exponential(3.0));
    CHECK(convex.argmax() == 2);
    CHECK(convex.max_over_mean() > 1.0);
    CHECK_THROWS_AS(sensitivity_profile(metrics_of({0.2}), RewardMapping::identity()), UsageError);
    CHECK_THROWS_AS(sensitivity_profile(m, RewardMapping::step(0.5)), UsageError);
    CHECK_THROWS_AS(sensitivity_profile(metrics_of({0.4, 0.4}), RewardMapping::identity()), SingularityError);
  }

  TEST_CASE("dominance ratio") {
    CHECK(dominance_ratio(0.9, 0.4, 3.0) == doctest::Approx(std::exp(1.5)).epsilon(1e-15));
    CHECK(dominance_ratio(0.4, 0.9, 3.0) == doctest::Approx(std::exp(-1.5)).epsilon(1e-15));
    CHECK(dominance_ratio(0.5, 0.5, 3.0) == 1.0);
  }

  TEST_CASE("self and cross terms add up to the directional derivative") {
    std::mt19937_64 rng(4);
    for (int n = 0; n < 30; ++n) {
      std::vector<double> r(3 + n % 6), dr(r.size());
      for (std::size_t i = 0; i < r.size(); ++i) {
        r[i] = normal01(rng);
        dr[i] = normal01(rng);
      }
      const auto g = normalize_group(r);
      const auto report = total_advantage_derivative_report(g, dr);
      const auto d = directional_advantage_derivative(g, dr);
      for (std::size_t i = 0; i < r.size(); ++i) {
        CHECK(report.self_term[i] + report.cross_term[i] == doctest::Approx(d[i]).epsilon(1e-12).scale(1e-12));
      }
      CHECK(report.top == static_cast<std::size_t>(std::max_element(r.begin(), r.end()) - r.begin()));
    }
  }

  TEST_CASE("rate decomposition matches its oracle") {
    const auto env = TaskEnv::interval_grid("grid", 5, {CellSpan{1, 3}});
    PolicyModel policy({env.policy_block()}, 1.0);
    std::mt19937_64 rng(21);
    std::vector<double> theta(policy.parameter_count()), old(theta.size()), u(theta.size());
    for (std::size_t i = 0; i < theta.size(); ++i) {
      theta[i] = 0.8 * normal01(rng);
      old[i] = theta[i] + 0.2 * normal01(rng);
      u[i] = normal01(rng);
    }
    policy.set_old_snapshot(old);
    policy.set_reference(old);
    policy.set_theta(theta);
    TaskSpec spec;
    spec.mapping = RewardMapping::exponential(2.0);
    const auto group = make_group(policy, env, spec, 0, 0, {{1, 3}, {0, 4}, {2, 2}, {4, 0}, {1, 2}});

    double norm = 0.0;
    for (double v : u) norm += v * v;
    for (double& v : u) v /= std::sqrt(norm);

    RateProblem p;
    p.env = &env;
    p.policy = &policy;
    p.group = &group;
    p.mapping = spec.mapping;
    p.direction = u;
    for (std::size_t i = 0; i < group.size(); ++i) {
      p.response = i;
      p.token = i % 2;
      const auto rate = rate_decomposition(p);
      CHECK(rate.total == doctest::Approx(rate.term_1 + rate.term_2).epsilon(1e-15));
      CHECK(rate.c_stat == doctest::Approx(stat_factor(rate.advantage, group.size())).epsilon(1e-15));
      const double fd = rate_decomposition_fd(p);
      CHECK(std::abs(rate.total - fd) <= std::max(1e-4, 1e-3 * std::abs(rate.total)));
    }

    RateProblem grpo = p;
    grpo.variant = ObjectiveVariant::grpo(0.2);
    CHECK_THROWS_AS(rate_decomposition(grpo), UsageError);
    RateProblem relaxed = p;
    relaxed.mapping = RewardMapping::relaxed(0.5, RewardMapping::identity());
    CHECK_THROWS_AS(rate_decomposition(relaxed), UsageError);
    RateProblem short_dir = p;
    short_dir.direction.pop_back();
    CHECK_THROWS_AS(rate_decomposition(short_dir), UsageError);
  }

  TEST_CASE("json views") {
    const auto profile = sensitivity_profile(metrics_of({0.2, 0.8}), RewardMapping::exponential(3.0));
    const auto j = to_json(profile);
    CHECK(j.at("argmax") == 1);
    CHECK(j.at("values").size() == 2);
  }
}
