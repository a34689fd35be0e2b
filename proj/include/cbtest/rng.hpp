#pragma once

#include <array>
#include <cstdint>

namespace cbtest {

// Philox4x32-10 counter-based generator. Output is a pure function of
// (key, counter), so replicate streams derived from (seed, replicate) are
// bitwise reproducible no matter how work is scheduled across threads.
// Constants and round structure follow the published generator; the known
// answer vectors are pinned in the unit tests.
class philox4x32 {
public:
    philox4x32(std::uint64_t seed, std::uint64_t stream)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          ctr_{0u, 0u,
               static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)} {}

    std::uint32_t next_u32() {
        if (have_ == 0) refill();
        return out_[4 - have_--];
    }

    std::uint64_t next_u64() {
        std::uint64_t lo = next_u32();
        std::uint64_t hi = next_u32();
        return lo | (hi << 32);
    }

    // uniform in [0,1) with 53 random bits
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // one raw 4-word block for a given counter; exposed for the answer-vector tests
    static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr,
                                              std::array<std::uint32_t, 2> key) {
        for (int round = 0; round < 10; ++round) {
            ctr = one_round(ctr, key);
            key[0] += 0x9E3779B9u;
            key[1] += 0xBB67AE85u;
        }
        return ctr;
    }

private:
    static std::array<std::uint32_t, 4> one_round(const std::array<std::uint32_t, 4>& x,
                                                  const std::array<std::uint32_t, 2>& k) {
        std::uint64_t p0 = 0xD2511F53ull * x[0];
        std::uint64_t p1 = 0xCD9E8D57ull * x[2];
        std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
        std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
        std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
        std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
        return {hi1 ^ x[1] ^ k[0], lo1, hi0 ^ x[3] ^ k[1], lo0};
    }

    void refill() {
        out_ = block(ctr_, key_);
        have_ = 4;
        if (++ctr_[0] == 0) ++ctr_[1];  // 64-bit block counter; words 2,3 stay the stream id
    }

    std::array<std::uint32_t, 2> key_;
    std::array<std::uint32_t, 4> ctr_;
    std::array<std::uint32_t, 4> out_{};
    int have_ = 0;
};

}  // namespace cbtest
