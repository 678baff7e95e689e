#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "arspo/errors.hpp"
#include "arspo/group_norm.hpp"

using namespace arspo;

constexpr double kZ = 1.224744871391589;
constexpr double kSigma123 = 0.81649658092772603;

TEST_SUITE("group_norm") {
  TEST_CASE("z-scores of [1, 2, 3]") {
    const std::vector<double> r{1, 2, 3};
    const auto g = normalize_group(r);
    CHECK(g.mu == 2.0);
    CHECK(g.sigma == doctest::Approx(kSigma123).epsilon(1e-15));
    CHECK(g.advantages[0] == doctest::Approx(-kZ).epsilon(1e-14));
    CHECK(g.advantages[1] == 0.0);
    CHECK(g.advantages[2] == doctest::Approx(kZ).epsilon(1e-14));
  }

  TEST_CASE("two-point groups and degenerate groups") {
    const auto two = normalize_group(std::vector<double>{0, 1});
    CHECK(two.advantages[0] == -1.0);
    CHECK(two.advantages[1] == 1.0);
    const auto flat = normalize_group(std::vector<double>{0.3, 0.3, 0.3});
    CHECK(flat.degenerate);
    for (double a : flat.advantages) CHECK(a == 0.0);
    CHECK_THROWS_AS(normalize_group(std::vector<double>{1.0}), UsageError);
    CHECK_THROWS_AS(advantage_jacobian(flat), SingularityError);
    CHECK_THROWS_AS(directional_advantage_derivative(flat, std::vector<double>{1, 2, 3}), SingularityError);
  }

  TEST_CASE("Jacobian entries for [1, 2, 3]") {
    const auto j = advantage_jacobian(normalize_group(std::vector<double>{1, 2, 3}));
    CHECK(j(1, 1) == doctest::Approx(0.81649658092772603).epsilon(1e-14));
    CHECK(j(1, 0) == doctest::Approx(-0.40824829046386302).epsilon(1e-14));
  }

  TEST_CASE("invariants on random groups") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> n(0.0, 2.0);
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<double> r(2 + trial % 15);
      for (double& v : r) v = n(rng);
      const auto g = normalize_group(r);
      double mean = 0, var = 0;
      for (double a : g.advantages) mean += a;
      mean /= static_cast<double>(r.size());
      for (double a : g.advantages) var += (a - mean) * (a - mean);
      CHECK(std::abs(mean) < 1e-12);
      CHECK(std::abs(std::sqrt(var / static_cast<double>(r.size())) - 1.0) < 1e-9);

      std::vector<double> shifted = r, scaled = r;
      for (double& v : shifted) v += 3.7;
      for (double& v : scaled) v *= 2.5;
      const auto gs = normalize_group(shifted), gc = normalize_group(scaled);
      for (std::size_t i = 0; i < r.size(); ++i) {
        CHECK(std::abs(gs.advantages[i] - g.advantages[i]) < 1e-12);
        CHECK(std::abs(gc.advantages[i] - g.advantages[i]) < 1e-12);
      }
      CHECK(gc.sigma == doctest::Approx(2.5 * g.sigma).epsilon(1e-12));

      const auto j = advantage_jacobian(g);
      for (std::size_t i = 0; i < r.size(); ++i) {
        double row = 0, ja = 0;
        for (std::size_t c = 0; c < r.size(); ++c) {
          row += j(i, c);
          ja += j(i, c) * r[c];
        }
        CHECK(std::abs(row) < 1e-10);
        CHECK(std::abs(ja) < 1e-9 * std::sqrt(std::inner_product(r.begin(), r.end(), r.begin(), 0.0)));
      }
    }
  }

  TEST_CASE("directional derivative") {
    const std::vector<double> r{1, 2, 3};
    const auto g = normalize_group(r);
    for (double a : directional_advantage_derivative(g, std::vector<double>{0.4, 0.4, 0.4})) {
      CHECK(std::abs(a) < 1e-14);
    }
    for (double a : directional_advantage_derivative(g, r)) CHECK(std::abs(a) < 1e-14);

    // Column 3 of J, against finite differences perturbing only A_3.
    const auto d = directional_advantage_derivative(g, std::vector<double>{0, 0, 1});
    const auto j = advantage_jacobian(g);
    const double h = 1e-6;
    const auto up = normalize_group(std::vector<double>{1, 2, 3 + h}).advantages;
    const auto down = normalize_group(std::vector<double>{1, 2, 3 - h}).advantages;
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(d[i] == doctest::Approx(j(i, 2)).epsilon(1e-14));
      CHECK((up[i] - down[i]) / (2 * h) == doctest::Approx(j(i, 2)).epsilon(1e-5));
    }
  }
}
