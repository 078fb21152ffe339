#pragma once

#include <cstdint>
#include <limits>

namespace prewet {

// SplitMix64 finaliser.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Derive an independent stream key from a parent key and a tag. Keys for
/// (seed, replica, sweep, parity) are built by chaining derive_key.
constexpr std::uint64_t derive_key(std::uint64_t parent, std::uint64_t tag) {
    return mix64(mix64(parent) ^ (tag * 0xd1b54a32d192ed03ULL + 0x8cb92ba72f3d8dd7ULL));
}

/// Stateless draw number `counter` of stream `key`.
constexpr std::uint64_t counter_bits(std::uint64_t key, std::uint64_t counter) {
    return mix64(key + counter * 0x9e3779b97f4a7c15ULL);
}

constexpr double bits_to_unit(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Counter-based generator satisfying UniformRandomBitGenerator. The whole
/// state is (key, counter), so streams can be forked and replayed exactly.
class CounterRng {
public:
    using result_type = std::uint64_t;

    explicit CounterRng(std::uint64_t key = 0, std::uint64_t counter = 0)
        : key_(key), counter_(counter) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() { return counter_bits(key_, counter_++); }

    /// Uniform on [0, 1).
    double uniform() { return bits_to_unit((*this)()); }

    /// Independent child stream.
    CounterRng fork(std::uint64_t tag) const { return CounterRng(derive_key(key_, tag)); }

    std::uint64_t key() const { return key_; }
    std::uint64_t counter() const { return counter_; }

    friend bool operator==(const CounterRng&, const CounterRng&) = default;

private:
    std::uint64_t key_;
    std::uint64_t counter_;
};

}  // namespace prewet
