#include "arspo/group_norm.hpp"

#include <cmath>
#include <string>

#include "arspo/errors.hpp"

namespace arspo {

namespace {

void require_regular(const NormalizedGroup& group, const char* what) {
  if (group.size() < 2) throw UsageError(std::string(what) + ": group needs at least 2 rewards");
  if (group.degenerate) throw SingularityError(std::string(what) + ": degenerate group (sigma below floor)");
}

}  // namespace

NormalizedGroup normalize_group(std::span<const double> rewards, double sigma_floor) {
  const std::size_t g = rewards.size();
  if (g < 2) throw UsageError("normalize_group: group needs at least 2 rewards, got " + std::to_string(g));
  for (double a : rewards) {
    if (!std::isfinite(a)) throw DomainError("normalize_group: non-finite reward");
  }

  NormalizedGroup out;
  out.raw.assign(rewards.begin(), rewards.end());
  double sum = 0.0;
  for (double a : rewards) sum += a;
  out.mu = sum / static_cast<double>(g);
  double ss = 0.0;
  for (double a : rewards) ss += (a - out.mu) * (a - out.mu);
  out.sigma = std::sqrt(ss / static_cast<double>(g));

  out.advantages.assign(g, 0.0);
  if (out.sigma < sigma_floor) {
    out.degenerate = true;
    return out;
  }
  for (std::size_t i = 0; i < g; ++i) out.advantages[i] = (rewards[i] - out.mu) / out.sigma;
  return out;
}

Matrix advantage_jacobian(const NormalizedGroup& group) {
  require_regular(group, "advantage_jacobian");
  const std::size_t g = group.size();
  const double scale = 1.0 / (static_cast<double>(g) * group.sigma);
  const auto& adv = group.advantages;
  Matrix jac(g, g);
  for (std::size_t i = 0; i < g; ++i) {
    for (std::size_t j = 0; j < g; ++j) {
      jac(i, j) = i == j ? scale * ((static_cast<double>(g) - 1.0) - adv[i] * adv[i])
                         : -scale * (1.0 + adv[i] * adv[j]);
    }
  }
  return jac;
}

std::vector<double> directional_advantage_derivative(const NormalizedGroup& group,
                                                     std::span<const double> reward_grads) {
  require_regular(group, "directional_advantage_derivative");
  const std::size_t g = group.size();
  if (reward_grads.size() != g) throw UsageError("directional_advantage_derivative: reward_grads size mismatch");
  const double scale = 1.0 / (static_cast<double>(g) * group.sigma);
  const auto& adv = group.advantages;

  std::vector<double> out(g, 0.0);
  for (std::size_t i = 0; i < g; ++i) {
    const double self_term = scale * ((static_cast<double>(g) - 1.0) - adv[i] * adv[i]) * reward_grads[i];
    double cross = 0.0;
    for (std::size_t j = 0; j < g; ++j) {
      if (j != i) cross += (1.0 + adv[i] * adv[j]) * reward_grads[j];
    }
    out[i] = self_term - scale * cross;
  }
  return out;
}

}  // namespace arspo
