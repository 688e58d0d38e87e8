#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace looplab {

inline constexpr std::string_view kRngAlgorithm =
    "mt19937_64 per stream, seed_seq{seed_lo,seed_hi,index_lo,index_hi}, u=(x>>11)*2^-53";

// Independent stream for (seed, index): trial number, photon chunk, etc.
std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t index);
double unit_uniform(std::mt19937_64& rng);  // [0,1)

}  // namespace looplab
