#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "arspo/errors.hpp"
#include "arspo/objectives.hpp"
#include "arspo/sampling.hpp"

using namespace arspo;

namespace {

struct Fixture {
  TaskEnv env = TaskEnv::interval_grid("grid4", 4, {CellSpan{1, 2}, CellSpan{0, 3}});
  PolicyModel policy{{env.policy_block()}, 1.0};
  Batch batch;
};

Fixture make_fixture(std::uint64_t seed) {
  Fixture fx;
  std::mt19937_64 rng(seed);
  std::vector<double> theta(fx.policy.parameter_count()), old(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) {
    old[i] = 0.5 * normal01(rng);
    theta[i] = old[i] + 0.1 * normal01(rng);
  }
  fx.policy.set_theta(old);
  fx.policy.snapshot_old();
  fx.policy.set_reference(old);
  TaskSpec spec;
  spec.mapping = RewardMapping::exponential(2.0);
  for (std::size_t q = 0; q < 2; ++q) fx.batch.groups.push_back(sample_group(fx.policy, fx.env, spec, 0, q, 6, rng(), q));
  fx.batch.task_weights = {1.0};
  fx.policy.set_theta(theta);
  rescore(fx.batch, fx.policy);
  return fx;
}

}  // namespace

TEST_SUITE("objectives") {
  TEST_CASE("clipped surrogate examples") {
    const auto grpo = ObjectiveVariant::grpo(0.2);
    CHECK(f_value(grpo, 1.5, 1.0) == doctest::Approx(1.2).epsilon(1e-15));
    CHECK(f_value(grpo, 0.5, -1.0) == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(f_value(grpo, 1.1, 1.0) == 1.1);
    CHECK(f_value(grpo, 1.5, -1.0) == 1.5);
    CHECK(f_derivative(grpo, 1.5, 1.0) == 0.0);
    CHECK(f_derivative(grpo, 1.1, 1.0) == 1.0);
    CHECK_THROWS_AS(f_derivative(grpo, 1.2, 1.0), BoundaryError);
    CHECK_THROWS_AS(f_value(grpo, 0.0, 1.0), DomainError);
    CHECK_THROWS_AS(f_value(ObjectiveVariant::gspo(0.2), 1.0, 1.0), UsageError);
  }

  TEST_CASE("soft gate") {
    const auto sapo = ObjectiveVariant::sapo(1.0, 1.05);
    CHECK(f_value(sapo, 1.0, 1.0) == 2.0);
    CHECK(f_derivative(sapo, 1.0, 1.0) == 1.0);
    CHECK(f_derivative(sapo, 1.0, -1.0) == 1.0);
    CHECK(f_second_derivative(sapo, 1.0, 1.0) == 0.0);
    for (double r : {0.3, 0.9, 1.7}) {
      const double h = 1e-6;
      CHECK((f_value(sapo, r + h, -1.0) - f_value(sapo, r - h, -1.0)) / (2 * h) ==
            doctest::Approx(f_derivative(sapo, r, -1.0)).epsilon(1e-7));
      CHECK((f_derivative(sapo, r + h, 1.0) - f_derivative(sapo, r - h, 1.0)) / (2 * h) ==
            doctest::Approx(f_second_derivative(sapo, r, 1.0)).epsilon(1e-6));
    }
  }

  TEST_CASE("sequence ratio") {
    const double l = std::log(1.2);
    const std::vector<double> n3{l, l, l}, o3{0, 0, 0};
    CHECK(gspo_sequence_ratio(n3, o3).value == doctest::Approx(1.2).epsilon(1e-14));
    const std::vector<double> n2{std::log(2.0), std::log(0.5)}, o2{0, 0};
    CHECK(gspo_sequence_ratio(n2, o2).value == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS(gspo_sequence_ratio(std::vector<double>{}, std::vector<double>{}), UsageError);
  }

  TEST_CASE("variant validation") {
    CHECK_THROWS(ObjectiveVariant::grpo(-0.1));
    CHECK_THROWS(ObjectiveVariant::sapo(0.0, 1.0));
    CHECK_THROWS(ObjectiveVariant::grpo(0.2, -1.0));
    CHECK(ObjectiveVariant::gspo(0.2).is_gspo());
  }

  TEST_CASE("objective at the old policy") {
    Fixture fx = make_fixture(4);
    fx.policy.set_theta(fx.policy.old_snapshot());
    rescore(fx.batch, fx.policy);
    // r = 1 everywhere and advantages sum to zero, so the clipped surrogate vanishes.
    CHECK(std::abs(objective_value(fx.batch, ObjectiveVariant::grpo(0.2))) < 1e-14);
  }

  TEST_CASE("gradient matches finite differences") {
    for (const auto& variant : {ObjectiveVariant::grpo(0.2, 0.05), ObjectiveVariant::gspo(0.2),
                                ObjectiveVariant::sapo(1.0, 1.05, 0.05)}) {
      Fixture fx = make_fixture(9);
      const auto grad = objective_gradient(fx.batch, variant, {}, fx.policy);
      std::vector<double> theta(fx.policy.theta().begin(), fx.policy.theta().end());
      for (std::size_t i = 0; i < theta.size(); ++i) {
        const double keep = theta[i], h = 1e-6;
        auto eval = [&](double v) {
          theta[i] = v;
          PolicyModel p = fx.policy;
          p.set_theta(theta);
          Batch b = fx.batch;
          rescore(b, p);
          return objective_value(b, variant);
        };
        const double fd = (eval(keep + h) - eval(keep - h)) / (2 * h);
        theta[i] = keep;
        CHECK(fd == doctest::Approx(grad[i]).epsilon(1e-5).scale(1e-8));
      }
    }
  }

  TEST_CASE("coefficients scale task terms linearly") {
    Fixture fx = make_fixture(12);
    const auto variant = ObjectiveVariant::sapo(1.0, 1.05);
    const std::vector<double> two{2.0};
    CHECK(objective_value(fx.batch, variant, two) ==
          doctest::Approx(2.0 * objective_value(fx.batch, variant)).epsilon(1e-14));
  }
}
