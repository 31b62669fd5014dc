#pragma once

#include <cstdint>

namespace ucrlb {

/// Counter-based random stream. Each draw hashes (key, counter) with the
/// SplitMix64 finalizer, so a stream is fully described by two integers and
/// can be split into independent child streams without shared state.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed = 0) : key_(mix(seed ^ 0x6a09e667f3bcc909ULL)) {}

    std::uint64_t next_u64() { return mix(key_ + golden * ++counter_); }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n). n must be positive.
    std::uint64_t below(std::uint64_t n) {
        // Lemire-style rejection keeps the draw unbiased.
        const std::uint64_t limit = (~std::uint64_t{0}) - (~std::uint64_t{0}) % n;
        std::uint64_t x = next_u64();
        while (x >= limit) x = next_u64();
        return x % n;
    }

    /// Independent child stream; does not advance this stream.
    RandomStream split(std::uint64_t index) const {
        RandomStream child;
        child.key_ = mix(key_ ^ mix(index + 0x9e3779b97f4a7c15ULL));
        return child;
    }

    std::uint64_t counter() const { return counter_; }

private:
    static constexpr std::uint64_t golden = 0x9e3779b97f4a7c15ULL;

    static constexpr std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t key_ = 0;
    std::uint64_t counter_ = 0;
};

} // namespace ucrlb
