#include "fusedlasso/rng.hpp"

namespace fusedlasso {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t CounterRng::mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : key_(mix(seed) ^ mix(stream * kGolden + 1)) {}

CounterRng::result_type CounterRng::operator()() {
    ++counter_;
    return mix(key_ + counter_ * kGolden);
}

} // namespace fusedlasso
