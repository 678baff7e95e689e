#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "arspo/env.hpp"
#include "arspo/objectives.hpp"
#include "arspo/policy.hpp"
#include "arspo/task.hpp"

namespace arspo {

/// Uniform double in [0, 1) built from the top 53 bits of one engine draw.
double uniform01(std::mt19937_64& rng);

/// Standard normal via Box-Muller on uniform01 (two draws), portable across
/// standard libraries.
double normal01(std::mt19937_64& rng);

/// Inverse-CDF draw; consumes exactly one uniform regardless of the weights,
/// so random streams stay aligned across different policies.
std::size_t sample_categorical(std::span<const double> probs, double u);

/// Text form of a toy response, scored by the format reward:
/// "<think></think><answer>t0 t1 ...</answer>".
std::string render_response(std::span<const std::size_t> tokens);

/// Builds a group from explicit responses: metrics, proxies, reward
/// breakdowns, old log-probs from the snapshot, new log-probs from the
/// current parameters, and normalized advantages.
ResponseGroup make_group(const PolicyModel& policy, const TaskEnv& env, const TaskSpec& spec, std::size_t task,
                         std::size_t query, const std::vector<std::vector<std::size_t>>& responses,
                         std::size_t group_id = 0, double sigma_floor = kDefaultSigmaFloor);

/// Draws G responses for `query` from the old-policy snapshot.
ResponseGroup sample_group(const PolicyModel& policy, const TaskEnv& env, const TaskSpec& spec, std::size_t task,
                           std::size_t query, std::size_t group_size, std::uint64_t rng_seed,
                           std::size_t group_id = 0);

/// Deterministic seed for one (run, step, task, slot) draw.
std::uint64_t derive_seed(std::uint64_t run_seed, std::uint64_t step, std::uint64_t task, std::uint64_t slot);

}  // namespace arspo
