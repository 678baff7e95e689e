#pragma once

#include <cstddef>
#include <string>

#include "arspo/reward_shaping.hpp"

namespace arspo {

/// Auxiliary reward terms applied to every response of a task.
struct AuxiliaryRewards {
  bool format = true;
  double format_bonus = RewardDefaults{}.format_bonus;
  bool repetition = true;
  std::size_t ngram = RewardDefaults{}.ngram;
  double lambda_pen = RewardDefaults{}.lambda_pen;
};

/// One task k: its environment, reward mapping g_k, dataset weight |D_k|/|D|
/// and DCA high-performance threshold.
struct TaskSpec {
  std::string name;
  std::string env;
  RewardMapping mapping;
  double weight = 1.0;
  double tau_high = 0.10;
  AuxiliaryRewards auxiliary;
};

}  // namespace arspo
