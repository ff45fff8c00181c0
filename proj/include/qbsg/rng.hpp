#pragma once

#include <cstdint>

namespace qbsg {

/// 64-bit avalanche finalizer (splitmix64 output stage).  Used both as the
/// generator output function and to derive decorrelated child seeds, so two
/// streams keyed by different (lane, index) pairs never share state.
constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

/// Deterministic pseudo-random stream with a fixed cross-platform definition.
///
/// The simulator never uses the <random> distribution adaptors because their
/// output is implementation defined; identical seeds must reproduce identical
/// runs on any toolchain.  The generator is splitmix64: a 64-bit counter fed
/// through mix64.  Doubles take the top 53 bits, normals use Box-Muller.
class RngStream {
  public:
    explicit RngStream(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() { return mix64(state_++); }

    /// Uniform double in [0, 1) with 53-bit resolution.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Single unbiased bit.
    bool next_bit() { return (next_u64() >> 63) != 0; }

    /// Bernoulli(p) draw; p outside [0,1] saturates.
    bool bernoulli(double p) { return next_double() < p; }

    /// Gaussian draw via the Box-Muller transform (one fresh pair per call;
    /// no cached spare, so the draw count per event is deterministic).
    double normal(double mean, double sigma);

    // UniformRandomBitGenerator interface, handy for std::shuffle and tests.
    using result_type = std::uint64_t;
    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~0ull; }
    result_type operator()() { return next_u64(); }

  private:
    std::uint64_t state_;
};

/// Child stream for a (seed, lane, index) triple.  Lanes separate roles
/// (Alice draws, Bob draws, detector draws, trial seeding, ...) and the index
/// separates rounds or trials inside a lane, so any round can be replayed in
/// isolation without generating its predecessors.
inline RngStream derive_stream(std::uint64_t seed, std::uint64_t lane,
                               std::uint64_t index = 0) {
    return RngStream(mix64(mix64(seed ^ 0x517cc1b727220a95ull) ^
                           mix64(lane * 0xd1342543de82ef95ull + index)));
}

}  // namespace qbsg
