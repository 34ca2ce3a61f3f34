#include "fraclaws/rng.hpp"

#include <cmath>
#include <numbers>

namespace fraclaws {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) {
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kPhiloxM0, ctr[0], hi0, lo0);
        mulhilo(kPhiloxM1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += kWeyl0;
        key[1] += kWeyl1;
    }
    return ctr;
}

namespace {

inline std::array<std::uint32_t, 4> block_for(std::uint64_t seed, std::uint32_t replica,
                                              std::uint32_t k, std::uint64_t step) {
    const std::array<std::uint32_t, 4> ctr = {
        static_cast<std::uint32_t>(step), static_cast<std::uint32_t>(step >> 32), k, replica};
    const std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(seed),
                                              static_cast<std::uint32_t>(seed >> 32)};
    return philox4x32(ctr, key);
}

inline double to_unit(std::uint32_t w) {
    // (0,1), never exactly 0 or 1
    return (static_cast<double>(w) + 0.5) * 0x1p-32;
}

}  // namespace

double counter_gaussian(std::uint64_t seed, std::uint32_t replica, std::uint32_t k,
                        std::uint64_t step) {
    const auto b = block_for(seed, replica, k, step);
    const double u1 = to_unit(b[0]);
    const double u2 = to_unit(b[1]);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double counter_uniform(std::uint64_t seed, std::uint32_t replica, std::uint32_t k,
                       std::uint64_t step) {
    return to_unit(block_for(seed, replica, k, step)[2]);
}

double SamplePath::increment(std::uint32_t k, std::uint64_t step, double dt) const {
    return std::sqrt(dt) * counter_gaussian(seed, replica, k, step);
}

}  // namespace fraclaws
