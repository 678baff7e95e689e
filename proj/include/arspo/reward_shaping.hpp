#pragma once

#include <cstddef>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "arspo/errors.hpp"

namespace arspo {

// Reward mapping g_k: turns a task metric into the raw reward that the group
// normalization sees. Its curvature decides how strongly the best responses of
// a group are amplified.
struct IdentityMap {};
struct ExponentialMap {
  double a = 3.0;
};
struct NormalizedExponentialMap {
  double alpha = 3.0;
};
struct StepMap {
  double tau = 0.5;
};

class RewardMapping {
 public:
  RewardMapping() = default;

  static RewardMapping identity();
  static RewardMapping exponential(double a);
  static RewardMapping normalized_exponential(double alpha);
  static RewardMapping step(double tau);
  /// Applies `inner` to x + lambda * proxy. `inner` may not itself be relaxed.
  static RewardMapping relaxed(double lambda, const RewardMapping& inner);

  bool is_identity() const noexcept { return std::holds_alternative<IdentityMap>(base_) && !relaxed_; }
  bool is_relaxed() const noexcept { return relaxed_; }
  bool is_step() const noexcept { return std::holds_alternative<StepMap>(base_); }
  /// True for the variants with a derivative everywhere on their domain.
  bool is_differentiable() const noexcept { return !is_step(); }
  double relax_lambda() const noexcept { return lambda_; }
  RewardMapping inner() const;

  /// Raw reward for metric x. Ratio mappings require x in [0, 1]; relaxed
  /// mappings also require the proxy in [0, 1].
  double operator()(double x, double proxy = 0.0) const;
  /// d g / d x, evaluated at the relaxed metric for relaxed mappings.
  double derivative(double x, double proxy = 0.0) const;
  /// d^2 g / d x^2 (used by the dynamics analyzer).
  double second_derivative(double x, double proxy = 0.0) const;

  std::string describe() const;

  const std::variant<IdentityMap, ExponentialMap, NormalizedExponentialMap, StepMap>& base() const noexcept {
    return base_;
  }

 private:
  std::variant<IdentityMap, ExponentialMap, NormalizedExponentialMap, StepMap> base_{IdentityMap{}};
  bool relaxed_ = false;
  double lambda_ = 0.0;

  void check_domain(double x, double proxy) const;
  double eval_base(double x) const;
  double eval_base_derivative(double x) const;
};

double map_reward(const RewardMapping& g, double x, double proxy = 0.0);
double map_reward_derivative(const RewardMapping& g, double x, double proxy = 0.0);

/// Continuous relaxation of a discrete metric: x + lambda * x_proxy.
double relax_metric(double x, double x_proxy, double lambda);

struct RewardDefaults {
  std::size_t ngram = 3;
  double lambda_pen = -1.0;
  double format_bonus = 0.2;
  double alpha = 3.0;
};

/// format_bonus iff text is exactly <think>...</think><answer>...</answer>
/// with nothing before or after; 0 otherwise.
double format_reward(std::string_view text, double format_bonus = RewardDefaults{}.format_bonus);

/// lambda_pen * (1 - unique/total) over contiguous n-grams; 0 with no n-grams.
/// N-gram identity is exact sequence equality.
template <class Token>
double repetition_penalty(std::span<const Token> tokens, std::size_t n, double lambda_pen) {
  if (n == 0) throw UsageError("repetition_penalty: n must be >= 1");
  if (lambda_pen > 0.0) throw DomainError("repetition_penalty: lambda_pen must be <= 0");
  if (tokens.size() < n) return 0.0;
  const std::size_t total = tokens.size() - n + 1;
  std::set<std::vector<Token>> unique;
  for (std::size_t i = 0; i < total; ++i) {
    unique.emplace(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                   tokens.begin() + static_cast<std::ptrdiff_t>(i + n));
  }
  const double ratio = static_cast<double>(unique.size()) / static_cast<double>(total);
  return lambda_pen * (1.0 - ratio);
}

struct RewardBreakdown {
  double r_task = 0.0;
  double r_fmt = 0.0;
  double r_rep = 0.0;
  double total = 0.0;
};

RewardBreakdown total_reward(double r_task, double r_fmt, double r_rep);

}  // namespace arspo
