#pragma once

#include <array>
#include <cstdint>

namespace fraclaws {

/// Philox4x32-10 counter-based block cipher. Stateless: a (counter, key)
/// pair maps to four 32-bit words, so any (seed, replica, k, step) address
/// regenerates its random draw bit-exactly regardless of evaluation order.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Standard normal draw addressed by (seed, replica, k, step), via Box-Muller
/// on two uniforms taken from one Philox block.
double counter_gaussian(std::uint64_t seed, std::uint32_t replica, std::uint32_t k,
                        std::uint64_t step);

/// Uniform in (0,1) addressed the same way (word 2 of the block).
double counter_uniform(std::uint64_t seed, std::uint32_t replica, std::uint32_t k,
                       std::uint64_t step);

/// Seeded Brownian increments for the truncated cylindrical Wiener process.
/// increment(k, step, dt) ~ Normal(0, dt); a shortened step draws from the
/// same counter address with variance equal to the shortened dt.
struct SamplePath {
    std::uint64_t seed = 0;
    std::uint32_t replica = 0;
    std::uint32_t truncation = 0;   // K
    std::uint64_t num_steps = 0;    // metadata only; generation is lazy

    double increment(std::uint32_t k, std::uint64_t step, double dt) const;
};

}  // namespace fraclaws
