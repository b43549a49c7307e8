#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace sirlab {

inline constexpr int kMaxDim = 3;

/// Spatial point, zero-padded beyond `dim` so norms over the full array stay valid.
struct Point {
    std::array<double, kMaxDim> c{0.0, 0.0, 0.0};
    int dim{1};

    static Point of(double x) { return Point{{x, 0.0, 0.0}, 1}; }
    static Point of(double x, double y) { return Point{{x, y, 0.0}, 2}; }
    static Point of(double x, double y, double z) { return Point{{x, y, z}, 3}; }

    double operator[](int i) const { return c[static_cast<std::size_t>(i)]; }
    double& operator[](int i) { return c[static_cast<std::size_t>(i)]; }

    double norm2() const { return c[0] * c[0] + c[1] * c[1] + c[2] * c[2]; }
    double norm() const { return std::sqrt(norm2()); }
};

inline double squared_distance(const Point& a, const Point& b) {
    const double d0 = a.c[0] - b.c[0];
    const double d1 = a.c[1] - b.c[1];
    const double d2 = a.c[2] - b.c[2];
    return d0 * d0 + d1 * d1 + d2 * d2;
}

inline double distance(const Point& a, const Point& b) { return std::sqrt(squared_distance(a, b)); }

inline double dot(const Point& a, const Point& b) {
    return a.c[0] * b.c[0] + a.c[1] * b.c[1] + a.c[2] * b.c[2];
}

/// The five measures the toolkit evaluates, on both the empirical and the
/// limit side.
enum class MeasureKind { S, I, R, ForceOfInfection, Total };

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct ParameterError : std::runtime_error {
    explicit ParameterError(const std::string& what) : std::runtime_error(what) {}
};

/// A quadrature normalizer fell below the configured floor; signals a grid
/// too coarse for the kernel/density combination, never clamped.
struct SingularNormalizerError : std::runtime_error {
    explicit SingularNormalizerError(const std::string& what) : std::runtime_error(what) {}
};

struct StabilityError : std::runtime_error {
    StabilityError(const std::string& what, double suggested)
        : std::runtime_error(what), suggested_dt(suggested) {}
    double suggested_dt;
};

struct SolverDefectError : std::runtime_error {
    explicit SolverDefectError(const std::string& what) : std::runtime_error(what) {}
};

struct RunawayError : std::runtime_error {
    explicit RunawayError(const std::string& what) : std::runtime_error(what) {}
};

struct UsageError : std::runtime_error {
    explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

void check_dims(const Point& a, const Point& b, const char* where);

/// Volume of the d-ball of radius r.
double ball_volume(int dim, double r);

}  // namespace sirlab
