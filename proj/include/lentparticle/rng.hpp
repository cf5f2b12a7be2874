#pragma once

// Counter-based random streams (Philox-4x32-10).
//
// A stream is addressed by (master seed, path index, substream); its state is
// just a block counter, so any path can be regenerated independently of the
// order in which other paths were processed.

#include <array>
#include <cstdint>
#include <limits>

namespace lp {

namespace substream {
inline constexpr std::uint32_t configuration = 0;
inline constexpr std::uint32_t marks = 1;
inline constexpr std::uint32_t auxiliary = 2;
}  // namespace substream

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

class RandomStream {
public:
    using result_type = std::uint64_t;

    RandomStream(std::uint64_t seed, std::uint64_t path_index, std::uint32_t substream = 0)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          path_index_(path_index),
          substream_(substream) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()();

    // Uniform on the open interval (0, 1), 53 bits of resolution.
    double uniform() { return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53; }

    std::uint64_t path_index() const { return path_index_; }

private:
    std::array<std::uint32_t, 2> key_;
    std::uint64_t path_index_;
    std::uint32_t substream_;
    std::uint32_t block_ = 0;
    std::array<std::uint32_t, 4> buffer_{};
    int used_ = 4;  // 64-bit words are taken in pairs; 4 means empty
};

}  // namespace lp
