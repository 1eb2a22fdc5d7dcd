#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace dlms::rng {

/// SplitMix64 step. Used both as a standalone mixer and to expand seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// xoshiro256++ (Blackman/Vigna). State is seeded through SplitMix64 so that
/// any 64-bit key, including 0, yields a well-mixed stream. Sequences are
/// bit-reproducible for a fixed key on every platform.
class Xoshiro256pp {
public:
    explicit Xoshiro256pp(std::uint64_t key = 0) { reseed(key); }

    void reseed(std::uint64_t key) {
        for (auto& word : state_) word = splitmix64(key);
    }

    std::uint64_t next() {
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

    /// Uniform in [0, 1), 53-bit resolution.
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Standard normal via Box-Muller (no cached second value; one draw
    /// consumes exactly two uniforms, which keeps stream accounting simple).
    double gaussian() {
        const double u1 = static_cast<double>((next() >> 11) + 1) * 0x1.0p-53; // (0, 1]
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    double gaussian(double mean, double stddev) { return mean + stddev * gaussian(); }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t state_[4];
};

/// Roles of the per-node substreams inside one trial.
enum class StreamRole : std::uint64_t { Input = 1, Noise = 2, Scenario = 3 };

/// Absorb a sequence of fields into a 64-bit key (SplitMix64 sponge).
inline std::uint64_t derive_key(std::uint64_t master, std::initializer_list<std::uint64_t> fields) {
    std::uint64_t h = master;
    std::uint64_t mixed = splitmix64(h);
    for (std::uint64_t f : fields) {
        h = mixed ^ (f + 0x9e3779b97f4a7c15ULL + (mixed << 6) + (mixed >> 2));
        mixed = splitmix64(h);
    }
    return mixed;
}

/// Key of the (trial, node, role) substream under a master seed. Trials,
/// nodes and roles all get statistically independent streams, so trials can
/// run concurrently without sharing generator state.
inline std::uint64_t substream_key(std::uint64_t master, std::uint64_t trial,
                                   std::uint64_t node, StreamRole role) {
    return derive_key(master, {trial, node, static_cast<std::uint64_t>(role)});
}

} // namespace dlms::rng
