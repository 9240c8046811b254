#include "botlab/rng.hpp"

namespace botlab {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t stream_seed(std::uint64_t base_seed, std::uint64_t replication, StreamRole role) noexcept {
    std::uint64_t h = splitmix64(base_seed);
    h = splitmix64(h ^ replication);
    return splitmix64(h ^ static_cast<std::uint64_t>(role));
}

Rng make_stream(std::uint64_t base_seed, std::uint64_t replication, StreamRole role) {
    return Rng(stream_seed(base_seed, replication, role));
}

}  // namespace botlab
