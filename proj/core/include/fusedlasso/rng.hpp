#pragma once

#include <cstdint>
#include <limits>

namespace fusedlasso {

/**
 * Counter-based generator: output i of stream s under seed k is
 * mix(key(k, s) + (i + 1) * golden), where mix is the SplitMix64 finalizer and
 * key(k, s) = mix(k) ^ mix(s * golden + 1). Any (seed, stream) pair is an
 * independent, reproducible sequence, so a row can be regenerated without
 * replaying the rows before it. Satisfies UniformRandomBitGenerator.
 */
class CounterRng {
public:
    using result_type = std::uint64_t;

    CounterRng(std::uint64_t seed, std::uint64_t stream);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()();

    std::uint64_t counter() const noexcept { return counter_; }

    static std::uint64_t mix(std::uint64_t z) noexcept;

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

} // namespace fusedlasso
