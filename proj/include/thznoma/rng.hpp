// SPDX-License-Identifier: Apache-2.0
//
// Counter-based random streams (Philox4x32-10, Salmon et al., SC'11).
// A stream is addressed by (seed, domain, index); draws depend only on the
// address and the draw sequence, never on thread scheduling, so experiments
// produce identical output for any worker count.
#pragma once

#include <array>
#include <complex>
#include <cstdint>

namespace thznoma {

class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t domain, std::uint64_t index);

    std::uint32_t next_u32();
    std::uint64_t next_u64();

    /// Uniform double in [0, 1) with 53-bit resolution.
    double uniform();
    double uniform(double lo, double hi);

    /// Standard normal via Box-Muller (pairs cached).
    double normal();

    /// Circularly-symmetric complex normal, unit total variance.
    std::complex<double> complex_normal();

    /// Uniform integer in [0, bound), bound > 0.
    std::uint64_t uniform_int(std::uint64_t bound);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t domain() const { return domain_; }
    std::uint64_t index() const { return index_; }

    /// One Philox4x32-10 block; exposed for known-answer tests.
    static std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                                   std::array<std::uint32_t, 2> key);

private:
    void refill();

    std::uint64_t seed_, domain_, index_;
    std::array<std::uint32_t, 2> key_;
    std::array<std::uint32_t, 2> stream_hi_;  // counter words c2, c3
    std::uint64_t block_ = 0;                 // counter words c0, c1
    std::array<std::uint32_t, 4> buf_{};
    int avail_ = 0;
    bool have_spare_normal_ = false;
    double spare_normal_ = 0.0;
};

}  // namespace thznoma
