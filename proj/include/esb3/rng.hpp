#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace esb3 {

/// Seedable 64-bit source used by every sampler. The engine is the standard
/// std::mt19937_64 and the conversion to (0, 1) is fixed here, so a seed maps
/// to the same stream on every conforming platform.
class Rng {
public:
    static constexpr std::string_view kAlgorithm = "mt19937_64/open53";

    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform draw on the open interval (0, 1) with 53 random bits.
    double uniform_open() {
        const std::uint64_t bits = engine_() >> 11;
        return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
    }

    std::uint64_t next_u64() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

} // namespace esb3
