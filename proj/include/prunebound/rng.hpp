#pragma once

#include <array>
#include <cstdint>

namespace prunebound {

// Philox4x32-10 counter-based generator. A (seed, stream) pair names an
// infinite, random-access sequence of 128-bit blocks; block k is a pure
// function of (seed, stream, k), so draws are reproducible across platforms
// and independent of thread scheduling.
using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

PhiloxCounter philox4x32_10(PhiloxCounter ctr, PhiloxKey key);

struct RngHandle {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;

    // Child stream for sub-task `index` (trial, layer, epoch...).
    RngHandle derive(std::uint64_t index) const;

    bool operator==(const RngHandle&) const = default;
};

// Stateless access to the k-th draw of a handle.
std::uint64_t bits_at(const RngHandle& h, std::uint64_t k);
double uniform_at(const RngHandle& h, std::uint64_t k);  // [0, 1), 53-bit
double normal_at(const RngHandle& h, std::uint64_t k);   // standard normal

// Sequential engine over a handle's draw sequence.
class Rng {
public:
    explicit Rng(RngHandle h) : handle_(h) {}

    std::uint64_t next_u64() { return bits_at(handle_, counter_++); }
    double uniform() { return uniform_at(handle_, counter_++); }
    double normal() { return normal_at(handle_, counter_++); }
    // Uniform integer in [0, n); n > 0.
    std::uint64_t below(std::uint64_t n);

    const RngHandle& handle() const { return handle_; }
    std::uint64_t position() const { return counter_; }

private:
    RngHandle handle_;
    std::uint64_t counter_ = 0;
};

}  // namespace prunebound
