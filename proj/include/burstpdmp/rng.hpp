#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace burstpdmp {

// Seedable counter-style random stream: a (seed, stream_id) pair selects an
// independent xoshiro256++ state via SplitMix64 expansion.  Identical pairs
// reproduce identical sequences bit for bit; distinct stream ids under the
// same seed give statistically independent streams, so ensemble workers can
// run in parallel and merge deterministically by stream id.
//
// Variate transforms are implemented here rather than through <random>
// distributions, whose output is implementation defined; this keeps
// trajectories reproducible across standard libraries.
class RngStream {
  public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id) : seed_(seed), stream_id_(stream_id) {
        std::uint64_t z = splitmix64(seed);
        z ^= splitmix64(0x9E3779B97F4A7C15ULL * (stream_id + 1));
        for (auto& w : state_) {
            w = splitmix64(z);
            z += 0x9E3779B97F4A7C15ULL; // advance the SplitMix64 counter
        }
        // all-zero state is invalid for xoshiro; unreachable for splitmix
        // output but cheap to guard
        if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
    }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

    // xoshiro256++ (Blackman, Vigna; public domain reference sequence)
    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // uniform on [0, 1) with 53 random bits
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // uniform on [a, b)
    double uniform(double a, double b) { return a + (b - a) * uniform01(); }

    // Exponential with the given mean; uses -log1p(-u) so u = 0 is safe and
    // the result is always finite and nonnegative.
    double exponential_mean(double mean) { return -mean * std::log1p(-uniform01()); }

    // Exponential with the given rate.
    double exponential_rate(double rate) { return -std::log1p(-uniform01()) / rate; }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    static std::uint64_t splitmix64(std::uint64_t x) {
        x += 0x9E3779B97F4A7C15ULL;
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
        return x ^ (x >> 31);
    }

    std::array<std::uint64_t, 4> state_;
    std::uint64_t seed_;
    std::uint64_t stream_id_;
};

}  // namespace burstpdmp
