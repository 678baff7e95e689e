#include <doctest.h>

#include <random>
#include <string>
#include <vector>

#include "arspo/errors.hpp"
#include "arspo/reward_shaping.hpp"

using namespace arspo;

// High-precision oracle values (tests/oracles/scalar_oracles.py).
constexpr double kNormExpMid = 0.18242552380635634;
constexpr double kNormExpMidDerivative = 0.70446366089283688;
constexpr double kTotalExample = -0.11757447619364366;

TEST_SUITE("reward_shaping") {
  TEST_CASE("mapping values") {
    const auto ne = RewardMapping::normalized_exponential(3.0);
    CHECK(ne(1.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(ne(0.0) == 0.0);
    CHECK(std::abs(ne(0.5) - kNormExpMid) < 1e-15);
    CHECK(RewardMapping::identity()(-2.5) == -2.5);
    CHECK(RewardMapping::exponential(3.0)(0.0) == 1.0);
    CHECK(RewardMapping::step(0.5)(0.5) == 1.0);
    CHECK(RewardMapping::step(0.5)(0.49) == 0.0);
  }

  TEST_CASE("mapping derivatives") {
    CHECK(RewardMapping::identity().derivative(0.3) == 1.0);
    CHECK(RewardMapping::exponential(3.0).derivative(0.0) == 3.0);
    CHECK(std::abs(RewardMapping::normalized_exponential(3.0).derivative(0.5) - kNormExpMidDerivative) < 1e-14);
    CHECK(RewardMapping::step(0.5).derivative(0.2) == 0.0);
    CHECK_THROWS_AS(RewardMapping::step(0.5).derivative(0.5), SingularityError);
  }

  TEST_CASE("derivative matches central differences") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.01, 0.99);
    const std::vector<RewardMapping> maps{RewardMapping::identity(), RewardMapping::exponential(2.0),
                                          RewardMapping::normalized_exponential(3.0),
                                          RewardMapping::relaxed(0.0, RewardMapping::exponential(1.5))};
    for (const auto& g : maps) {
      for (int i = 0; i < 100; ++i) {
        const double x = u(rng), h = 1e-6;
        const double fd = (g(x + h) - g(x - h)) / (2 * h);
        CHECK(fd == doctest::Approx(g.derivative(x)).epsilon(1e-6));
      }
    }
  }

  TEST_CASE("monotone and convex") {
    for (double a : {1.0, 2.0, 5.0}) {
      for (const auto& g : {RewardMapping::exponential(a), RewardMapping::normalized_exponential(a)}) {
        for (int i = 0; i < 100; ++i) {
          const double x1 = i / 100.0, x2 = (i + 1) / 100.0;
          CHECK(g(x2) >= g(x1));
          CHECK(g.derivative(x2) > g.derivative(x1));
        }
      }
    }
  }

  TEST_CASE("domains") {
    CHECK_THROWS_AS(RewardMapping::normalized_exponential(3.0)(1.2), DomainError);
    CHECK_THROWS_AS(RewardMapping::exponential(3.0)(-0.1), DomainError);
    CHECK_THROWS_AS(RewardMapping::relaxed(0.5, RewardMapping::identity())(0.5, 1.5), DomainError);
    CHECK_THROWS_AS(RewardMapping::relaxed(0.5, RewardMapping::relaxed(0.1, RewardMapping::identity())), UsageError);
    CHECK_THROWS(RewardMapping::exponential(0.0));
    CHECK_THROWS(RewardMapping::step(1.5));
  }

  TEST_CASE("relaxation") {
    CHECK(relax_metric(0, 0.3, 0) == 0.0);
    CHECK(relax_metric(1, 0.0, 0.5) == 1.0);
    CHECK(relax_metric(0, 0.6, 0.5) == doctest::Approx(0.3).epsilon(1e-15));
    const auto g = RewardMapping::relaxed(0.5, RewardMapping::identity());
    CHECK(g(0.0, 0.6) == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(g.is_relaxed());
    CHECK(g.inner().is_identity());
  }

  TEST_CASE("format reward") {
    CHECK(format_reward("<think>abc</think><answer>x</answer>") == 0.2);
    CHECK(format_reward("<think>abc</think><answer>x</answer> ") == 0.0);
    CHECK(format_reward("<answer>x</answer>") == 0.0);
    CHECK(format_reward("<think>a\nb</think><answer>c</answer>") == 0.2);
    CHECK(format_reward("<think>a</think><answer>b</answer>", 0.5) == 0.5);
  }

  TEST_CASE("repetition penalty") {
    const std::vector<char> abab{'a', 'b', 'a', 'b', 'a', 'b'};
    CHECK(repetition_penalty(std::span<const char>(abab), 3, -1.0) == -0.5);
    const std::vector<int> distinct{1, 2, 3, 4, 5};
    CHECK(repetition_penalty(std::span<const int>(distinct), 3, -1.0) == 0.0);
    const std::vector<int> two{1, 1};
    CHECK(repetition_penalty(std::span<const int>(two), 3, -1.0) == 0.0);
    CHECK_THROWS_AS(repetition_penalty(std::span<const int>(two), 0, -1.0), UsageError);
  }

  TEST_CASE("repetition penalty stays within [lambda, 0]") {
    std::mt19937_64 rng(2);
    for (int i = 0; i < 300; ++i) {
      std::vector<int> t(rng() % 12);
      for (int& v : t) v = static_cast<int>(rng() % 3);
      const double p = repetition_penalty(std::span<const int>(t), 1 + rng() % 3, -0.7);
      CHECK(p <= 0.0);
      CHECK(p >= -0.7);
    }
  }

  TEST_CASE("total reward") {
    CHECK(total_reward(1.0, 0.2, 0.0).total == doctest::Approx(1.2).epsilon(1e-15));
    CHECK(total_reward(0, 0, 0).total == 0.0);
    const auto b = total_reward(RewardMapping::normalized_exponential(3.0)(0.5), 0.2, -0.5);
    CHECK(std::abs(b.total - kTotalExample) < 1e-15);
    CHECK(b.total == b.r_task + b.r_fmt + b.r_rep);
  }
}
