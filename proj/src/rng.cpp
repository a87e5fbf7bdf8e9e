#include "prunebound/rng.hpp"

#include <cmath>
#include <numbers>

namespace prunebound {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

PhiloxCounter block_at(const RngHandle& h, std::uint64_t k) {
    const PhiloxCounter ctr{static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32),
                            static_cast<std::uint32_t>(h.stream),
                            static_cast<std::uint32_t>(h.stream >> 32)};
    const PhiloxKey key{static_cast<std::uint32_t>(h.seed), static_cast<std::uint32_t>(h.seed >> 32)};
    return philox4x32_10(ctr, key);
}

inline double to_unit(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

}  // namespace

PhiloxCounter philox4x32_10(PhiloxCounter ctr, PhiloxKey key) {
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            key[0] += kWeyl0;
            key[1] += kWeyl1;
        }
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kMul0, ctr[0], hi0, lo0);
        mulhilo(kMul1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
}

RngHandle RngHandle::derive(std::uint64_t index) const {
    return RngHandle{seed, splitmix64(stream ^ splitmix64(index + 0x632BE59BD9B4E019ull))};
}

std::uint64_t bits_at(const RngHandle& h, std::uint64_t k) {
    const auto b = block_at(h, k);
    return (static_cast<std::uint64_t>(b[1]) << 32) | b[0];
}

double uniform_at(const RngHandle& h, std::uint64_t k) {
    return to_unit(bits_at(h, k));
}

double normal_at(const RngHandle& h, std::uint64_t k) {
    // Box-Muller on the two 64-bit halves of one block; u1 is kept away from 0.
    const auto b = block_at(h, k);
    const std::uint64_t w0 = (static_cast<std::uint64_t>(b[1]) << 32) | b[0];
    const std::uint64_t w1 = (static_cast<std::uint64_t>(b[3]) << 32) | b[2];
    const double u1 = (static_cast<double>(w0 >> 11) + 0.5) * 0x1.0p-53;
    const double u2 = to_unit(w1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t Rng::below(std::uint64_t n) {
    // Rejection on the top of the range keeps the draw exactly uniform.
    const std::uint64_t limit = (~std::uint64_t{0}) - ((~std::uint64_t{0}) % n);
    std::uint64_t x;
    do {
        x = next_u64();
    } while (x >= limit);
    return x % n;
}

}  // namespace prunebound
