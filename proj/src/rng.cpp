#include "phasesim/rng.hpp"

#include <cmath>

namespace phasesim {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;  // golden ratio fraction
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;  // sqrt(3) - 1 fraction

inline void round_once(std::array<std::uint32_t, 4>& x,
                       const std::array<std::uint32_t, 2>& k) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * x[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * x[2];
    const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
    const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
    x = {hi1 ^ x[1] ^ k[0], lo1, hi0 ^ x[3] ^ k[1], lo0};
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(const std::array<std::uint32_t, 4>& counter,
                                        const std::array<std::uint32_t, 2>& key) {
    std::array<std::uint32_t, 4> x = counter;
    std::array<std::uint32_t, 2> k = key;
    round_once(x, k);
    for (int r = 1; r < 10; ++r) {
        k[0] += kWeyl0;
        k[1] += kWeyl1;
        round_once(x, k);
    }
    return x;
}

std::array<double, 2> uniform_pair(std::uint64_t seed, std::uint32_t stream,
                                   std::uint64_t index) {
    const std::array<std::uint32_t, 4> counter = {
        static_cast<std::uint32_t>(index),
        static_cast<std::uint32_t>(index >> 32),
        stream,
        0u,
    };
    const std::array<std::uint32_t, 2> key = {
        static_cast<std::uint32_t>(seed),
        static_cast<std::uint32_t>(seed >> 32),
    };
    const std::array<std::uint32_t, 4> w = philox4x32(counter, key);
    const std::uint64_t a = (static_cast<std::uint64_t>(w[0]) << 32) | w[1];
    const std::uint64_t b = (static_cast<std::uint64_t>(w[2]) << 32) | w[3];
    // Map to (0, 1): keep the 53 high bits and centre within the spacing so
    // neither endpoint is ever produced.
    const double scale = 1.0 / 9007199254740992.0;  // 2^-53
    return {(static_cast<double>(a >> 11) + 0.5) * scale,
            (static_cast<double>(b >> 11) + 0.5) * scale};
}

std::array<double, 2> normal_pair(std::uint64_t seed, std::uint32_t stream,
                                  std::uint64_t index) {
    const std::array<double, 2> u = uniform_pair(seed, stream, index);
    const double two_pi = 6.28318530717958647692;
    const double r = std::sqrt(-2.0 * std::log(u[0]));
    return {r * std::cos(two_pi * u[1]), r * std::sin(two_pi * u[1])};
}

}  // namespace phasesim
