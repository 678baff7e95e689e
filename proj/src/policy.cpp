#include "arspo/policy.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "arspo/errors.hpp"

namespace arspo {

std::vector<double> softmax(std::span<const double> logits, double temperature) {
  std::vector<double> p(logits.size());
  if (logits.empty()) return p;
  const double top = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (std::size_t a = 0; a < logits.size(); ++a) {
    p[a] = std::exp((logits[a] - top) / temperature);
    total += p[a];
  }
  for (double& v : p) v /= total;
  return p;
}

double log_sum_exp(std::span<const double> logits, double temperature) {
  const double top = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (double z : logits) total += std::exp((z - top) / temperature);
  return top / temperature + std::log(total);
}

PolicyModel::PolicyModel(std::vector<PolicyBlock> blocks, double temperature)
    : blocks_(std::move(blocks)), temperature_(temperature) {
  if (!(std::isfinite(temperature) && temperature > 0.0)) throw DomainError("policy temperature must be > 0");
  if (blocks_.empty()) throw UsageError("policy needs at least one task block");
  std::size_t cursor = 0;
  task_offsets_.push_back(0);
  for (const auto& b : blocks_) {
    if (b.contexts == 0 || b.vocab.empty()) throw UsageError("policy block needs >= 1 context and >= 1 position");
    std::vector<std::size_t> prefix{0};
    for (std::size_t v : b.vocab) {
      if (v == 0) throw UsageError("policy block position with empty action space");
      prefix.push_back(prefix.back() + v);
    }
    cursor += b.contexts * prefix.back();
    position_offsets_.push_back(std::move(prefix));
    task_offsets_.push_back(cursor);
  }
  theta_.assign(cursor, 0.0);
  old_ = theta_;
  reference_ = theta_;
}

void PolicyModel::set_theta(std::span<const double> values) {
  if (values.size() != theta_.size()) throw UsageError("set_theta: size mismatch");
  std::copy(values.begin(), values.end(), theta_.begin());
}

void PolicyModel::snapshot_old() { old_ = theta_; }

void PolicyModel::set_old_snapshot(std::span<const double> values) {
  if (values.size() != old_.size()) throw UsageError("set_old_snapshot: size mismatch");
  old_.assign(values.begin(), values.end());
}

void PolicyModel::set_reference(std::span<const double> values) {
  if (values.size() != reference_.size()) throw UsageError("set_reference: size mismatch");
  reference_.assign(values.begin(), values.end());
}

std::span<const double> PolicyModel::parameters(PolicySource source) const noexcept {
  switch (source) {
    case PolicySource::current: return theta_;
    case PolicySource::old_snapshot: return old_;
    case PolicySource::reference: return reference_;
  }
  return theta_;
}

std::size_t PolicyModel::offset(std::size_t task, std::size_t context, std::size_t position) const {
  const auto& b = blocks_.at(task);
  if (context >= b.contexts) throw UsageError("context " + std::to_string(context) + " out of range");
  const auto& prefix = position_offsets_[task];
  if (position >= b.vocab.size()) throw UsageError("position " + std::to_string(position) + " out of range");
  return task_offsets_[task] + context * prefix.back() + prefix[position];
}

std::vector<double> PolicyModel::probabilities(std::size_t task, std::size_t context, std::size_t position,
                                               PolicySource source) const {
  const std::size_t off = offset(task, context, position);
  const std::size_t v = blocks_[task].vocab[position];
  return softmax(parameters(source).subspan(off, v), temperature_);
}

double PolicyModel::log_prob(std::size_t task, std::size_t context, std::size_t position, std::size_t action,
                             PolicySource source) const {
  const std::size_t off = offset(task, context, position);
  const std::size_t v = blocks_[task].vocab[position];
  if (action >= v) throw UsageError("action out of range");
  const auto row = parameters(source).subspan(off, v);
  return row[action] / temperature_ - log_sum_exp(row, temperature_);
}

void PolicyModel::add_log_prob_gradient(std::size_t task, std::size_t context, std::size_t position,
                                        std::size_t action, double scale, std::span<double> grad) const {
  const std::size_t off = offset(task, context, position);
  const std::size_t v = blocks_[task].vocab[position];
  const auto p = softmax(std::span<const double>(theta_).subspan(off, v), temperature_);
  const double s = scale / temperature_;
  for (std::size_t b = 0; b < v; ++b) grad[off + b] -= s * p[b];
  grad[off + action] += s;
}

double PolicyModel::kl_to_reference(std::size_t task, std::size_t context) const {
  double kl = 0.0;
  const auto& b = blocks_.at(task);
  for (std::size_t t = 0; t < b.vocab.size(); ++t) {
    const std::size_t off = offset(task, context, t);
    const auto cur = std::span<const double>(theta_).subspan(off, b.vocab[t]);
    const auto ref = std::span<const double>(reference_).subspan(off, b.vocab[t]);
    const auto p = softmax(cur, temperature_);
    const double lse_cur = log_sum_exp(cur, temperature_);
    const double lse_ref = log_sum_exp(ref, temperature_);
    for (std::size_t a = 0; a < b.vocab[t]; ++a) {
      const double log_ratio = (cur[a] - ref[a]) / temperature_ - lse_cur + lse_ref;
      kl += p[a] * log_ratio;
    }
  }
  return kl;
}

void PolicyModel::add_kl_gradient(std::size_t task, std::size_t context, double scale, std::span<double> grad) const {
  // d KL / d z_a = (1/T) p_a (log(p_a / r_a) - KL_row)
  const auto& b = blocks_.at(task);
  for (std::size_t t = 0; t < b.vocab.size(); ++t) {
    const std::size_t off = offset(task, context, t);
    const auto cur = std::span<const double>(theta_).subspan(off, b.vocab[t]);
    const auto ref = std::span<const double>(reference_).subspan(off, b.vocab[t]);
    const auto p = softmax(cur, temperature_);
    const double lse_cur = log_sum_exp(cur, temperature_);
    const double lse_ref = log_sum_exp(ref, temperature_);
    std::vector<double> log_ratio(b.vocab[t]);
    double row_kl = 0.0;
    for (std::size_t a = 0; a < b.vocab[t]; ++a) {
      log_ratio[a] = (cur[a] - ref[a]) / temperature_ - lse_cur + lse_ref;
      row_kl += p[a] * log_ratio[a];
    }
    for (std::size_t a = 0; a < b.vocab[t]; ++a) {
      grad[off + a] += scale * p[a] * (log_ratio[a] - row_kl) / temperature_;
    }
  }
}

}  // namespace arspo
