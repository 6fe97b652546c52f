#pragma once

#include <cstdint>

namespace sarquad {

/// Identifies an independent random stream inside one mission. Each subsystem
/// draws from its own stream so that changing how much randomness one of them
/// consumes never shifts the draws of another.
enum class StreamId : std::uint64_t {
    GyroNoise = 1,
    GyroBias = 2,
    AccelNoise = 3,
    AccelSpike = 4,
    Ultrasonic = 5,
    DetectionHit = 6,
    DetectionConfidence = 7,
    FalsePositive = 8,
};

/// Counter-based generator: every draw is a pure function of
/// (seed, stream, index, slot). There is no hidden state to advance, so two
/// runs that ask for the same key always see the same number.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, StreamId stream);

    std::uint64_t bits(std::uint64_t index, std::uint64_t slot = 0) const;

    /// Uniform in [0, 1).
    double uniform(std::uint64_t index, std::uint64_t slot = 0) const;

    /// Standard normal via Box-Muller; consumes slots 2*slot and 2*slot+1.
    double gaussian(std::uint64_t index, std::uint64_t slot = 0) const;

    std::uint64_t seed() const { return seed_; }
    StreamId stream() const { return stream_; }

private:
    std::uint64_t seed_;
    StreamId stream_;
    std::uint64_t key_;
};

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

}  // namespace sarquad
