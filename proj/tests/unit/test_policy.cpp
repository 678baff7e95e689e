#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "arspo/errors.hpp"
#include "arspo/policy.hpp"

using namespace arspo;

namespace {

PolicyModel random_policy(std::uint64_t seed, double temperature) {
  PolicyModel p({PolicyBlock{2, {3, 4}}, PolicyBlock{1, {2}}}, temperature);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<double> theta(p.parameter_count()), ref(p.parameter_count());
  for (std::size_t i = 0; i < theta.size(); ++i) {
    theta[i] = n(rng);
    ref[i] = n(rng);
  }
  p.set_theta(theta);
  p.set_reference(ref);
  return p;
}

}  // namespace

TEST_SUITE("policy") {
  TEST_CASE("layout") {
    PolicyModel p({PolicyBlock{2, {3, 4}}, PolicyBlock{1, {2}}}, 1.0);
    CHECK(p.parameter_count() == 2 * 7 + 2);
    CHECK(p.task_begin(1) == 14);
    CHECK(p.task_end(1) == 16);
    CHECK(p.offset(0, 1, 1) == 7 + 3);
    CHECK_THROWS_AS(PolicyModel({PolicyBlock{1, {2}}}, 0.0), DomainError);
    CHECK_THROWS_AS(PolicyModel({}, 1.0), UsageError);
  }

  TEST_CASE("uniform at zero logits") {
    PolicyModel p({PolicyBlock{1, {4}}}, 0.7);
    for (double v : p.probabilities(0, 0, 0)) CHECK(v == doctest::Approx(0.25));
    CHECK(p.kl_to_reference(0, 0) == 0.0);
  }

  TEST_CASE("softmax is shift-stable") {
    const std::vector<double> big{1000.0, 1001.0};
    const auto p = softmax(big, 1.0);
    CHECK(p[1] == doctest::Approx(1.0 / (1.0 + std::exp(-1.0))));
    CHECK(std::isfinite(log_sum_exp(big, 0.5)));
  }

  TEST_CASE("log-prob gradient matches finite differences") {
    for (double temp : {0.5, 1.0, 2.0}) {
      PolicyModel p = random_policy(3, temp);
      std::vector<double> grad(p.parameter_count(), 0.0);
      p.add_log_prob_gradient(0, 1, 1, 2, 1.0, grad);
      std::vector<double> theta(p.theta().begin(), p.theta().end());
      for (std::size_t i = 0; i < theta.size(); ++i) {
        const double keep = theta[i], h = 1e-6;
        theta[i] = keep + h;
        p.set_theta(theta);
        const double up = p.log_prob(0, 1, 1, 2);
        theta[i] = keep - h;
        p.set_theta(theta);
        const double down = p.log_prob(0, 1, 1, 2);
        theta[i] = keep;
        p.set_theta(theta);
        CHECK((up - down) / (2 * h) == doctest::Approx(grad[i]).epsilon(1e-6));
      }
    }
  }

  TEST_CASE("KL gradient matches finite differences") {
    PolicyModel p = random_policy(5, 1.3);
    std::vector<double> grad(p.parameter_count(), 0.0);
    p.add_kl_gradient(0, 0, 1.0, grad);
    CHECK(p.kl_to_reference(0, 0) > 0.0);
    std::vector<double> theta(p.theta().begin(), p.theta().end());
    for (std::size_t i = 0; i < theta.size(); ++i) {
      const double keep = theta[i], h = 1e-6;
      theta[i] = keep + h;
      p.set_theta(theta);
      const double up = p.kl_to_reference(0, 0);
      theta[i] = keep - h;
      p.set_theta(theta);
      const double down = p.kl_to_reference(0, 0);
      theta[i] = keep;
      p.set_theta(theta);
      CHECK((up - down) / (2 * h) == doctest::Approx(grad[i]).epsilon(1e-6).scale(1e-9));
    }
  }

  TEST_CASE("snapshots are independent copies") {
    PolicyModel p = random_policy(1, 1.0);
    p.snapshot_old();
    const double before = p.log_prob(1, 0, 0, 1, PolicySource::old_snapshot);
    std::vector<double> theta(p.parameter_count(), 0.0);
    p.set_theta(theta);
    CHECK(p.log_prob(1, 0, 0, 1, PolicySource::old_snapshot) == before);
    CHECK(p.log_prob(1, 0, 0, 1) == doctest::Approx(std::log(0.5)));
  }
}
