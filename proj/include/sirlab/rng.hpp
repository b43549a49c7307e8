#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace sirlab {

// Counter-based seed splitting: a master seed expands into named substreams,
// each substream into per-index streams. Documented in docs/config.md; the
// scheme is what makes every pipeline replayable from one integer.

inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ull;
    }
    return h;
}

inline std::uint64_t substream_seed(std::uint64_t master, std::string_view tag, std::uint64_t index) {
    return mix64(mix64(master ^ fnv1a64(tag)) + index);
}

/// mt19937_64 with explicit floating-point transforms. The engine sequence is
/// fixed by the standard; keeping the transforms in-house makes draws
/// reproducible independent of the standard library's distribution details.
class RngStream {
public:
    RngStream() : eng_(0) {}
    explicit RngStream(std::uint64_t seed) : eng_(seed) {}

    static RngStream from(std::uint64_t master, std::string_view tag, std::uint64_t index = 0) {
        return RngStream(substream_seed(master, tag, index));
    }

    std::uint64_t raw() { return eng_(); }

    /// Uniform on [0,1) with 53 random bits.
    double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    /// Uniform on (0,1]; never zero, safe under log().
    double uniform01_open() { return 1.0 - uniform01(); }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    double exponential(double rate) { return -std::log(uniform01_open()) / rate; }

    /// Standard exponential waiting value (rate applied by the caller).
    double exponential1() { return -std::log(uniform01_open()); }

    std::uint64_t uniform_index(std::uint64_t n) {
        // rejection to avoid modulo bias
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v;
        do {
            v = eng_();
        } while (v >= limit);
        return v % n;
    }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform01() - 1.0;
            v = 2.0 * uniform01() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        have_spare_ = true;
        return u * f;
    }

    /// Gamma(shape, 1) via Marsaglia-Tsang, with the boost trick for shape < 1.
    double gamma(double shape) {
        if (shape < 1.0) {
            const double u = uniform01_open();
            return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, t;
            do {
                x = normal();
                t = 1.0 + c * x;
            } while (t <= 0.0);
            const double v = t * t * t;
            const double u = uniform01_open();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

private:
    std::mt19937_64 eng_;
    bool have_spare_{false};
    double spare_{0.0};
};

}  // namespace sirlab
