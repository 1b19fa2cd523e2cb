#pragma once

#include <cstdint>

namespace dsbm {

// Counter-based stream: the value for (seed, counter) does not depend on the
// order of draws, so sampling can be split across threads deterministically.
std::uint64_t splitmix64(std::uint64_t x) noexcept;
std::uint64_t counter_bits(std::uint64_t seed, std::uint64_t counter) noexcept;
// Uniform in [0, 1) with 53 random bits.
double counter_uniform(std::uint64_t seed, std::uint64_t counter) noexcept;

}  // namespace dsbm
