#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <span>

namespace subsim {

// Seeded xoshiro256** stream (period 2^256 - 1).
//
// A stream is identified by a 64-bit key. The generator state is expanded
// from the key with splitmix64, so two streams built from the same key
// produce the same sequence. Child streams are derived from the key (not
// from the consumed state), so derive() never advances the parent and the
// children of one parent are distinct for distinct labels.
//
// Not thread-safe: one owner per stream. Parallel workers derive their own.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) noexcept;

    [[nodiscard]] std::uint64_t key() const noexcept { return key_; }

    /// Child stream keyed by (this key, label).
    [[nodiscard]] RandomStream derive(std::uint64_t label) const noexcept;

    /// Child stream keyed by a label path, equivalent to chained derive() calls.
    [[nodiscard]] RandomStream derive(std::initializer_list<std::uint64_t> path) const noexcept;

    std::uint64_t next_u64() noexcept;

    /// Uniform on [0, 1) with 53 random bits.
    double next_unit() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform on (0, 1); never returns zero, safe as a log() argument.
    double next_open_unit() noexcept {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Standard normal variate (256-layer ziggurat, fixed tables).
    double next_normal() noexcept;

    using result_type = std::uint64_t;
    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return ~result_type{0}; }
    result_type operator()() noexcept { return next_u64(); }

private:
    std::uint64_t key_;
    std::array<std::uint64_t, 4> state_;
};

/// Standard normal draw; advances the stream.
double draw_standard_normal(RandomStream& stream) noexcept;

/// Uniform draw on [a, b). Throws DomainError unless a < b.
double draw_uniform(RandomStream& stream, double a, double b);

/// Fills `out` with i.i.d. standard normal coordinates, in index order.
void draw_standard_point(RandomStream& stream, std::span<double> out) noexcept;

/// splitmix64 finalizer; a bijection on 64-bit words.
[[nodiscard]] std::uint64_t mix64(std::uint64_t x) noexcept;

}  // namespace subsim
