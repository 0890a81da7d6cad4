#include "subsim/random_stream.hpp"

#include <cmath>

#include "subsim/errors.hpp"

namespace subsim {

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }

// Marsaglia-Tsang ziggurat for exp(-x^2/2), 256 layers of equal area.
struct ZigguratTables {
    static constexpr int kLayers = 256;
    static constexpr double kTailStart = 3.6541528853610088;
    static constexpr double kLayerArea = 4.92867323399e-3;

    std::array<double, kLayers + 1> x{};
    std::array<double, kLayers + 1> fx{};

    ZigguratTables() {
        auto f = [](double t) { return std::exp(-0.5 * t * t); };
        x[0] = kLayerArea / f(kTailStart);
        x[1] = kTailStart;
        for (int i = 1; i < kLayers - 1; ++i) {
            x[i + 1] = std::sqrt(-2.0 * std::log(kLayerArea / x[i] + f(x[i])));
        }
        x[kLayers] = 0.0;
        for (int i = 0; i <= kLayers; ++i) fx[i] = f(x[i]);
    }
};

const ZigguratTables& ziggurat() {
    static const ZigguratTables tables;
    return tables;
}

}  // namespace

std::uint64_t mix64(std::uint64_t x) noexcept {
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
}

RandomStream::RandomStream(std::uint64_t seed) noexcept : key_(seed) {
    std::uint64_t s = seed;
    for (auto& word : state_) {
        s += kGolden;
        word = mix64(s);
    }
}

RandomStream RandomStream::derive(std::uint64_t label) const noexcept {
    // For a fixed parent key the map label -> child key is a bijection.
    return RandomStream(mix64(mix64(key_ ^ 0x5851f42d4c957f2dULL) + label * kGolden));
}

RandomStream RandomStream::derive(std::initializer_list<std::uint64_t> path) const noexcept {
    RandomStream out = *this;
    for (auto label : path) out = out.derive(label);
    return out;
}

std::uint64_t RandomStream::next_u64() noexcept {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
}

double RandomStream::next_normal() noexcept {
    const auto& z = ziggurat();
    for (;;) {
        const std::uint64_t bits = next_u64();
        const auto layer = static_cast<int>(bits & 0xff);
        const double u = (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-52 - 1.0;
        const double x = u * z.x[layer];
        if (std::fabs(x) < z.x[layer + 1]) return x;

        if (layer == 0) {
            double a = 0.0;
            double b = 0.0;
            do {
                a = -std::log(next_open_unit()) / ZigguratTables::kTailStart;
                b = -std::log(next_open_unit());
            } while (b + b < a * a);
            return u > 0.0 ? ZigguratTables::kTailStart + a : -(ZigguratTables::kTailStart + a);
        }

        const double y = z.fx[layer] + next_unit() * (z.fx[layer + 1] - z.fx[layer]);
        if (y < std::exp(-0.5 * x * x)) return x;
    }
}

double draw_standard_normal(RandomStream& stream) noexcept { return stream.next_normal(); }

double draw_uniform(RandomStream& stream, double a, double b) {
    if (!(a < b)) throw DomainError("draw_uniform: requires a < b");
    return a + (b - a) * stream.next_unit();
}

void draw_standard_point(RandomStream& stream, std::span<double> out) noexcept {
    for (auto& v : out) v = stream.next_normal();
}

}  // namespace subsim
