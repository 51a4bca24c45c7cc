#pragma once

// Counter-based random streams. A stream is fully determined by
// (master_seed, replication_index, substream); streams for distinct pairs are
// disjoint blocks of one Philox4x32-10 sequence, so replications can run on any
// thread in any order and reproduce bit for bit.

#include <array>
#include <cstdint>
#include <limits>
#include <random>

namespace hcdep {

class Philox4x32 {
public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter apply(Counter ctr, Key key) {
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += kWeyl0;
                key[1] += kWeyl1;
            }
            const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
            const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
            ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
                   static_cast<std::uint32_t>(p1),
                   static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
                   static_cast<std::uint32_t>(p0)};
        }
        return ctr;
    }

private:
    static constexpr std::uint32_t kMul0 = 0xD2511F53u;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
};

/// Uniform random bit generator over one (seed, replication, substream) block.
class RngStream {
public:
    using result_type = std::uint64_t;

    RngStream(std::uint64_t master_seed, std::uint64_t replication, std::uint32_t substream)
        : key_{static_cast<std::uint32_t>(master_seed),
               static_cast<std::uint32_t>(master_seed >> 32)},
          replication_(replication),
          substream_(substream) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() {
        if (cursor_ == 2) refill();
        return buffer_[cursor_++];
    }

    /// Uniform on the open interval (0, 1).
    double uniform() {
        return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
    }

    double normal() { return normal_(*this); }

    std::uint64_t replication() const { return replication_; }
    std::uint32_t substream() const { return substream_; }

private:
    void refill() {
        // Counter words: block (64 bit), substream, low 32 bits of replication.
        // The high replication bits are folded into the key so that any
        // 64-bit replication index maps to a distinct stream.
        const Philox4x32::Counter ctr{static_cast<std::uint32_t>(block_),
                                      static_cast<std::uint32_t>(block_ >> 32), substream_,
                                      static_cast<std::uint32_t>(replication_)};
        const Philox4x32::Key key{key_[0], key_[1] ^ static_cast<std::uint32_t>(replication_ >> 32)};
        const auto out = Philox4x32::apply(ctr, key);
        buffer_[0] = (std::uint64_t{out[0]} << 32) | out[1];
        buffer_[1] = (std::uint64_t{out[2]} << 32) | out[3];
        ++block_;
        cursor_ = 0;
    }

    Philox4x32::Key key_;
    std::uint64_t replication_;
    std::uint32_t substream_;
    std::uint64_t block_ = 0;
    std::array<std::uint64_t, 2> buffer_{};
    int cursor_ = 2;
    std::normal_distribution<double> normal_{};
};

inline RngStream rng_stream(std::uint64_t master_seed, std::uint64_t replication_index,
                            std::uint32_t substream) {
    return RngStream(master_seed, replication_index, substream);
}

}  // namespace hcdep
