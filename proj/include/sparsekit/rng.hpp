#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>
#include <string_view>

namespace sparsekit {

/// Deterministic random stream used everywhere in the toolkit.
///
/// The generator is SplitMix64 (Steele, Lea & Flood 2014): a 64-bit counter
/// advanced by the golden-ratio increment and passed through a bijective
/// finalizer. Every draw is a pure function of (seed, position), so streams
/// can be split by key and parallel schedules reproduce serial output.
///
/// Distributions are implemented here rather than taken from <random>
/// because the standard distributions are not bit-identical across library
/// implementations.
class Rng {
public:
    using result_type = std::uint64_t;

    /// Identifier written into benchmark metadata. Bump when any draw changes.
    static constexpr std::string_view kVersion = "splitmix64-v1";

    explicit Rng(std::uint64_t seed) noexcept : state_(seed) {}

    /// Independent substream keyed by (seed, path...).
    static Rng derive(std::uint64_t seed, std::initializer_list<std::uint64_t> path) noexcept;

    /// Substream of this stream's seed keyed by `tag`; does not advance *this.
    Rng fork(std::uint64_t tag) const noexcept { return derive(origin_key(), {tag}); }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept;

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() noexcept;

    /// Standard normal via Box-Muller; the second variate of each pair is cached.
    double normal() noexcept;

    /// Unbiased integer in [0, bound). bound must be positive.
    std::uint64_t below(std::uint64_t bound) noexcept;

    /// Stateless finalizer shared by the stream and key derivation.
    static std::uint64_t mix(std::uint64_t z) noexcept;

private:
    std::uint64_t origin_key() const noexcept { return state_ ^ 0x5851F42D4C957F2DULL; }

    std::uint64_t state_;
    double cached_normal_ = 0.0;
    bool has_cached_normal_ = false;
};

}  // namespace sparsekit
