#include "dsbm/random.hpp"

namespace dsbm {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t counter_bits(std::uint64_t seed, std::uint64_t counter) noexcept {
  return splitmix64(splitmix64(seed) ^ splitmix64(counter + 0x632be59bd9b4e019ULL));
}

double counter_uniform(std::uint64_t seed, std::uint64_t counter) noexcept {
  return static_cast<double>(counter_bits(seed, counter) >> 11) * 0x1.0p-53;
}

}  // namespace dsbm
