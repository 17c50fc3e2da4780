// SPDX-License-Identifier: Apache-2.0
#include "thznoma/rng.hpp"

#include <cmath>
#include <stdexcept>

#include "thznoma/constants.hpp"

namespace thznoma {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

inline void philox_round(std::array<std::uint32_t, 4>& c, const std::array<std::uint32_t, 2>& k) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * c[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * c[2];
    const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
    const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

}  // namespace

std::array<std::uint32_t, 4> RngStream::philox4x32(std::array<std::uint32_t, 4> counter,
                                                   std::array<std::uint32_t, 2> key) {
    for (int round = 0; round < 10; ++round) {
        philox_round(counter, key);
        key[0] += kPhiloxW0;
        key[1] += kPhiloxW1;
    }
    return counter;
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t domain, std::uint64_t index)
    : seed_(seed), domain_(domain), index_(index) {
    const std::uint64_t k = splitmix64(seed ^ splitmix64(domain));
    key_ = {static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
    stream_hi_ = {static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
}

void RngStream::refill() {
    const std::array<std::uint32_t, 4> ctr = {
        static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
        stream_hi_[0], stream_hi_[1]};
    buf_ = philox4x32(ctr, key_);
    ++block_;
    avail_ = 4;
}

std::uint32_t RngStream::next_u32() {
    if (avail_ == 0) refill();
    return buf_[4 - avail_--];
}

std::uint64_t RngStream::next_u64() {
    const std::uint64_t hi = next_u32();
    const std::uint64_t lo = next_u32();
    return (hi << 32) | lo;
}

double RngStream::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform();
}

double RngStream::normal() {
    if (have_spare_normal_) {
        have_spare_normal_ = false;
        return spare_normal_;
    }
    // u1 in (0,1] keeps the log finite.
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    spare_normal_ = radius * std::sin(2.0 * kPi * u2);
    have_spare_normal_ = true;
    return radius * std::cos(2.0 * kPi * u2);
}

std::complex<double> RngStream::complex_normal() {
    const double re = normal();
    const double im = normal();
    return {re * 0x1.6a09e667f3bcdp-1, im * 0x1.6a09e667f3bcdp-1};  // 1/sqrt(2)
}

std::uint64_t RngStream::uniform_int(std::uint64_t bound) {
    if (bound == 0) throw std::domain_error("uniform_int: bound must be positive");
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * bound) >> 64);
}

}  // namespace thznoma
