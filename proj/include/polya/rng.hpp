#pragma once

#include <array>
#include <cstdint>

namespace polya {

// Identifies one reproducible substream: (seed, stream_index) fixes the whole
// step sequence on any platform.
struct RngStreamSpec {
    std::uint64_t seed = 0;
    std::uint64_t stream_index = 0;
};

// Philox4x32-10 counter-based generator. The 128-bit counter is partitioned
// as (stream_index : 64 | position : 64), so distinct stream indices are
// disjoint by construction and substreams never overlap.
class PhiloxRng {
public:
    explicit PhiloxRng(RngStreamSpec spec) : key_(spec.seed), stream_(spec.stream_index) {}
    PhiloxRng(std::uint64_t seed, std::uint64_t stream_index) : key_(seed), stream_(stream_index) {}

    inline std::uint32_t next_u32() {
        if (have_ == 0) block();
        return buf_[--have_];
    }

    inline std::uint64_t next_u64() {
        std::uint64_t hi = next_u32();
        return hi << 32 | next_u32();
    }

    // Uniform on {0..n-1} via multiply-shift; fixed draw consumption
    // (one 32-bit word) with bias below n / 2^32.
    inline std::uint32_t uniform_below(std::uint32_t n) {
        return static_cast<std::uint32_t>((static_cast<std::uint64_t>(next_u32()) * n) >> 32);
    }

    // Uniform double in [0,1) with 53 random bits.
    inline double next_unit() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

private:
    static inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                               std::uint32_t& lo) {
        std::uint64_t p = static_cast<std::uint64_t>(a) * b;
        hi = static_cast<std::uint32_t>(p >> 32);
        lo = static_cast<std::uint32_t>(p);
    }

    void block() {
        std::uint32_t c0 = static_cast<std::uint32_t>(ctr_);
        std::uint32_t c1 = static_cast<std::uint32_t>(ctr_ >> 32);
        std::uint32_t c2 = static_cast<std::uint32_t>(stream_);
        std::uint32_t c3 = static_cast<std::uint32_t>(stream_ >> 32);
        std::uint32_t k0 = static_cast<std::uint32_t>(key_);
        std::uint32_t k1 = static_cast<std::uint32_t>(key_ >> 32);
        for (int r = 0; r < 10; ++r) {
            std::uint32_t hi0, lo0, hi1, lo1;
            mulhilo(0xD2511F53u, c0, hi0, lo0);
            mulhilo(0xCD9E8D57u, c2, hi1, lo1);
            std::uint32_t n0 = hi1 ^ c1 ^ k0;
            std::uint32_t n1 = lo1;
            std::uint32_t n2 = hi0 ^ c3 ^ k1;
            std::uint32_t n3 = lo0;
            c0 = n0; c1 = n1; c2 = n2; c3 = n3;
            k0 += 0x9E3779B9u;
            k1 += 0xBB67AE85u;
        }
        buf_ = {c0, c1, c2, c3};
        ++ctr_;
        have_ = 4;
    }

    std::uint64_t key_;
    std::uint64_t stream_;
    std::uint64_t ctr_ = 0;
    std::array<std::uint32_t, 4> buf_{};
    int have_ = 0;
};

}  // namespace polya
