#include "sarquad/random.hpp"

#include <cmath>
#include <numbers>

namespace sarquad {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kSlotMul = 0xD1B54A32D192ED03ULL;
constexpr double kInv53 = 1.0 / 9007199254740992.0;  // 2^-53
}  // namespace

std::uint64_t mix64(std::uint64_t x) {
    x += kGolden;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

CounterRng::CounterRng(std::uint64_t seed, StreamId stream)
    : seed_(seed), stream_(stream),
      key_(mix64(mix64(seed) ^ (static_cast<std::uint64_t>(stream) * kGolden))) {}

std::uint64_t CounterRng::bits(std::uint64_t index, std::uint64_t slot) const {
    return mix64(mix64(key_ ^ index) + slot * kSlotMul);
}

double CounterRng::uniform(std::uint64_t index, std::uint64_t slot) const {
    return static_cast<double>(bits(index, slot) >> 11) * kInv53;
}

double CounterRng::gaussian(std::uint64_t index, std::uint64_t slot) const {
    // u1 in (0, 1] keeps the log finite.
    const double u1 = static_cast<double>((bits(index, 2 * slot) >> 11) + 1) * kInv53;
    const double u2 = uniform(index, 2 * slot + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace sarquad
