#pragma once

#include <cstdint>
#include <random>

namespace xrl {

using Rng = std::mt19937_64;

// splitmix64 finalizer.
std::uint64_t splitmix64(std::uint64_t x);

// Child seed for an independent stream. Streams never perturb each other:
// the result depends only on (master, stream, index).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                          std::uint64_t index = 0);

// Environment reset seeds. Training episodes always get even seeds and
// evaluation episodes odd ones, so the two sets are disjoint.
std::uint64_t training_episode_seed(std::uint64_t raw);
std::uint64_t evaluation_episode_seed(std::uint64_t base_seed,
                                      std::uint64_t episode);

// Named stream identifiers used by the training loops.
namespace streams {
inline constexpr std::uint64_t kInit = 1;
inline constexpr std::uint64_t kProtagonistRollout = 2;
inline constexpr std::uint64_t kProtagonistUpdate = 3;
inline constexpr std::uint64_t kAdversaryRollout = 4;
inline constexpr std::uint64_t kAdversaryUpdate = 5;
inline constexpr std::uint64_t kAdversaryActions = 6;
inline constexpr std::uint64_t kCurriculum = 7;
inline constexpr std::uint64_t kAdversaryInit = 8;
}  // namespace streams

}  // namespace xrl
