#include "arspo/reward_shaping.hpp"

#include <cmath>
#include <regex>
#include <sstream>

namespace arspo {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

RewardMapping RewardMapping::identity() { return RewardMapping{}; }

RewardMapping RewardMapping::exponential(double a) {
  if (!finite_positive(a)) throw DomainError("Exponential mapping requires a > 0");
  RewardMapping g;
  g.base_ = ExponentialMap{a};
  return g;
}

RewardMapping RewardMapping::normalized_exponential(double alpha) {
  if (!finite_positive(alpha)) throw DomainError("NormalizedExponential mapping requires alpha > 0");
  RewardMapping g;
  g.base_ = NormalizedExponentialMap{alpha};
  return g;
}

RewardMapping RewardMapping::step(double tau) {
  if (!(tau >= 0.0 && tau <= 1.0)) throw DomainError("Step mapping requires tau in [0, 1]");
  RewardMapping g;
  g.base_ = StepMap{tau};
  return g;
}

RewardMapping RewardMapping::relaxed(double lambda, const RewardMapping& inner) {
  if (!(std::isfinite(lambda) && lambda >= 0.0)) throw DomainError("Relaxed mapping requires lambda >= 0");
  if (inner.relaxed_) throw UsageError("Relaxed mapping cannot wrap another relaxed mapping");
  RewardMapping g = inner;
  g.relaxed_ = true;
  g.lambda_ = lambda;
  return g;
}

RewardMapping RewardMapping::inner() const {
  RewardMapping g = *this;
  g.relaxed_ = false;
  g.lambda_ = 0.0;
  return g;
}

void RewardMapping::check_domain(double x, double proxy) const {
  if (!std::isfinite(x)) throw DomainError("reward mapping: metric is not finite");
  if (relaxed_) {
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError("relaxed mapping: metric outside [0, 1]");
    if (!(proxy >= 0.0 && proxy <= 1.0)) throw DomainError("relaxed mapping: proxy outside [0, 1]");
    return;
  }
  if (std::holds_alternative<IdentityMap>(base_)) return;
  if (!(x >= 0.0 && x <= 1.0)) {
    throw DomainError("reward mapping " + describe() + ": metric " + std::to_string(x) + " outside [0, 1]");
  }
}

double RewardMapping::eval_base(double x) const {
  return std::visit(overloaded{
                        [&](const IdentityMap&) { return x; },
                        [&](const ExponentialMap& m) { return std::exp(m.a * x); },
                        [&](const NormalizedExponentialMap& m) {
                          return std::expm1(m.alpha * x) / std::expm1(m.alpha);
                        },
                        [&](const StepMap& m) { return x >= m.tau ? 1.0 : 0.0; },
                    },
                    base_);
}

double RewardMapping::eval_base_derivative(double x) const {
  return std::visit(overloaded{
                        [&](const IdentityMap&) { return 1.0; },
                        [&](const ExponentialMap& m) { return m.a * std::exp(m.a * x); },
                        [&](const NormalizedExponentialMap& m) {
                          return m.alpha * std::exp(m.alpha * x) / std::expm1(m.alpha);
                        },
                        [&](const StepMap& m) -> double {
                          if (x == m.tau) throw SingularityError("Step mapping has no derivative at tau");
                          return 0.0;
                        },
                    },
                    base_);
}

double RewardMapping::operator()(double x, double proxy) const {
  check_domain(x, proxy);
  return eval_base(relaxed_ ? relax_metric(x, proxy, lambda_) : x);
}

double RewardMapping::derivative(double x, double proxy) const {
  check_domain(x, proxy);
  return eval_base_derivative(relaxed_ ? relax_metric(x, proxy, lambda_) : x);
}

double RewardMapping::second_derivative(double x, double proxy) const {
  check_domain(x, proxy);
  const double z = relaxed_ ? relax_metric(x, proxy, lambda_) : x;
  return std::visit(overloaded{
                        [&](const IdentityMap&) { return 0.0; },
                        [&](const ExponentialMap& m) { return m.a * m.a * std::exp(m.a * z); },
                        [&](const NormalizedExponentialMap& m) {
                          return m.alpha * m.alpha * std::exp(m.alpha * z) / std::expm1(m.alpha);
                        },
                        [&](const StepMap& m) -> double {
                          if (z == m.tau) throw SingularityError("Step mapping has no derivative at tau");
                          return 0.0;
                        },
                    },
                    base_);
}

std::string RewardMapping::describe() const {
  std::ostringstream out;
  std::visit(overloaded{
                 [&](const IdentityMap&) { out << "identity"; },
                 [&](const ExponentialMap& m) { out << "exponential(a=" << m.a << ")"; },
                 [&](const NormalizedExponentialMap& m) { out << "normalized_exponential(alpha=" << m.alpha << ")"; },
                 [&](const StepMap& m) { out << "step(tau=" << m.tau << ")"; },
             },
             base_);
  if (relaxed_) {
    std::string inner_text = out.str();
    out.str("");
    out << "relaxed(lambda=" << lambda_ << ", " << inner_text << ")";
  }
  return out.str();
}

double map_reward(const RewardMapping& g, double x, double proxy) { return g(x, proxy); }

double map_reward_derivative(const RewardMapping& g, double x, double proxy) { return g.derivative(x, proxy); }

double relax_metric(double x, double x_proxy, double lambda) { return x + lambda * x_proxy; }

double format_reward(std::string_view text, double format_bonus) {
  static const std::regex pattern(R"(<think>[\s\S]*</think><answer>[\s\S]*</answer>)");
  return std::regex_match(text.begin(), text.end(), pattern) ? format_bonus : 0.0;
}

RewardBreakdown total_reward(double r_task, double r_fmt, double r_rep) {
  return RewardBreakdown{r_task, r_fmt, r_rep, r_task + r_fmt + r_rep};
}

}  // namespace arspo
