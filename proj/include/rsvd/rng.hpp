#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace rsvd {

// Philox4x32-10 counter-based generator. Streams are addressed by
// (seed, block_id, column): the key holds the seed, two counter words hold
// the stream address and the remaining two count draws within the stream.
// Any value of the stream can therefore be produced independently of
// generation order, which is what makes sketch generation reproducible
// under parallel column fill.
class Philox {
  public:
    Philox(std::uint64_t seed, std::uint32_t block_id, std::uint32_t column)
        : key_{std::uint32_t(seed), std::uint32_t(seed >> 32)},
          base_{0, 0, column, block_id} {}

    std::uint32_t next_u32() {
        if (pos_ == 4) refill();
        return out_[pos_++];
    }

    std::uint64_t next_u64() {
        std::uint64_t lo = next_u32();
        return lo | (std::uint64_t(next_u32()) << 32);
    }

    // Uniform on the open interval (0,1); never exactly 0 or 1, so logs are
    // always finite.
    double next_unit() {
        return (double(next_u64() >> 11) + 0.5) * 0x1p-53;
    }

    // Box-Muller pair, cached. Exact zeros are redrawn so sparse sketch
    // values stay nonzero.
    double next_gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            if (spare_ != 0.0) return spare_;
        }
        for (;;) {
            double u1 = next_unit();
            double u2 = next_unit();
            double r = std::sqrt(-2.0 * std::log(u1));
            double a = 6.283185307179586476925286766559 * u2;
            double z0 = r * std::cos(a);
            double z1 = r * std::sin(a);
            spare_ = z1;
            have_spare_ = true;
            if (z0 != 0.0) return z0;
            have_spare_ = false;
        }
    }

  private:
    static constexpr std::uint32_t kM0 = 0xD2511F53u;
    static constexpr std::uint32_t kM1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kW0 = 0x9E3779B9u;
    static constexpr std::uint32_t kW1 = 0xBB67AE85u;

    void refill() {
        std::array<std::uint32_t, 4> c = base_;
        std::uint32_t k0 = key_[0], k1 = key_[1];
        for (int round = 0; round < 10; ++round) {
            std::uint64_t p0 = std::uint64_t(kM0) * c[0];
            std::uint64_t p1 = std::uint64_t(kM1) * c[2];
            std::array<std::uint32_t, 4> next = {
                std::uint32_t(p1 >> 32) ^ c[1] ^ k0, std::uint32_t(p1),
                std::uint32_t(p0 >> 32) ^ c[3] ^ k1, std::uint32_t(p0)};
            c = next;
            k0 += kW0;
            k1 += kW1;
        }
        out_ = c;
        pos_ = 0;
        if (++base_[0] == 0) ++base_[1];
    }

    std::array<std::uint32_t, 2> key_;
    std::array<std::uint32_t, 4> base_;
    std::array<std::uint32_t, 4> out_{};
    int pos_ = 4;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace rsvd
