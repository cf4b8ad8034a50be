#pragma once

#include <cmath>
#include <cstdint>

namespace elastic_reflect {

/// Counter-based random stream keyed by (seed, stream).
///
/// Each draw is a pure function of (key, draw_counter), so a stream can be
/// recreated at any point and identical (seed, stream) pairs yield identical
/// sequences no matter how many other streams are being consumed in parallel.
/// The output function is the splitmix64 finalizer over a Weyl sequence,
/// which is a bijection on 64-bit words.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t substream = 0) {
        std::uint64_t k = mix(seed + kGolden);
        k = mix(k ^ (stream + kGolden));
        key_ = mix(k ^ (substream + kGolden));
    }

    std::uint64_t next_u64() { return mix(key_ + (++counter_) * kGolden); }

    /// Uniform double strictly inside (0, 1); safe to pass to log().
    double uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller; consumes two counter values.
    double normal() {
        const double u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
    }

    std::uint64_t draws() const { return counter_; }

private:
    static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;
    static constexpr double kPi = 3.14159265358979323846;

    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ull;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBull;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t key_ = 0;
    std::uint64_t counter_ = 0;
};

}  // namespace elastic_reflect
