#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

namespace telegraph_kit {

/// Philox4x32-10 counter-based generator. Every (seed, stream) pair names an
/// independent sequence, so a path can be regenerated from its index alone.
class PhiloxStream {
public:
    using result_type = std::uint64_t;
    using Block = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    PhiloxStream(std::uint64_t seed, std::uint64_t stream)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          stream_(stream) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() {
        if (cached_ == 0) {
            const Block counter{static_cast<std::uint32_t>(draw_), static_cast<std::uint32_t>(draw_ >> 32),
                                static_cast<std::uint32_t>(stream_),
                                static_cast<std::uint32_t>(stream_ >> 32)};
            buffer_ = philox(counter, key_);
            ++draw_;
            cached_ = 2;
        }
        --cached_;
        const std::size_t i = cached_ == 1 ? 0 : 2;
        return (static_cast<std::uint64_t>(buffer_[i + 1]) << 32) | buffer_[i];
    }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    /// Exponential with the given rate; finite for every draw.
    double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

    /// Fair coin.
    bool bernoulli_half() { return ((*this)() >> 63) != 0; }

    /// Raw Philox4x32-10 bijection.
    static Block philox(Block counter, Key key) {
        constexpr std::uint32_t kMul0 = 0xD2511F53u;
        constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
        constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
        constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * counter[0];
            const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * counter[2];
            counter = {static_cast<std::uint32_t>(p1 >> 32) ^ counter[1] ^ key[0],
                       static_cast<std::uint32_t>(p1),
                       static_cast<std::uint32_t>(p0 >> 32) ^ counter[3] ^ key[1],
                       static_cast<std::uint32_t>(p0)};
            key[0] += kWeyl0;
            key[1] += kWeyl1;
        }
        return counter;
    }

private:
    Key key_;
    std::uint64_t stream_;
    std::uint64_t draw_ = 0;
    Block buffer_{};
    int cached_ = 0;
};

}  // namespace telegraph_kit
