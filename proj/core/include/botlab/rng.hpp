#pragma once

#include <cstdint>
#include <random>

namespace botlab {

using Rng = std::mt19937_64;

// Every random draw in the library comes from a named stream. A stream is
// identified by (base seed, replication index, role) and its engine seed is a
// hash of the triple, so replications never share state and results do not
// depend on how replications are scheduled onto workers.
enum class StreamRole : std::uint64_t {
    replication = 1,
    trajectory_noise = 2,
    observation_noise = 3,
    dependence = 4,
    multistart = 5,
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

std::uint64_t stream_seed(std::uint64_t base_seed, std::uint64_t replication, StreamRole role) noexcept;

Rng make_stream(std::uint64_t base_seed, std::uint64_t replication, StreamRole role);

}  // namespace botlab
