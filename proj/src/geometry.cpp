#include "sirlab/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace sirlab {

void check_dims(const Point& a, const Point& b, const char* where) {
    if (a.dim != b.dim) {
        throw ConfigError(std::string(where) + ": dimension mismatch between points (" +
                          std::to_string(a.dim) + " vs " + std::to_string(b.dim) + ")");
    }
}

double ball_volume(int dim, double r) {
    switch (dim) {
        case 1: return 2.0 * r;
        case 2: return M_PI * r * r;
        case 3: return 4.0 / 3.0 * M_PI * r * r * r;
        default: throw ParameterError("ball_volume: dimension must be 1, 2 or 3");
    }
}

bool DomainSpec::contains(const Point& x) const {
    if (shape == DomainShape::HalfSpace) return x.c[0] >= 0.0;
    return true;
}

Point DomainSpec::cone_direction(const Point& y) const {
    Point d;
    d.dim = dim;
    double n2 = 0.0;
    for (int k = 0; k < dim; ++k) {
        d[k] = anchor[k] - y[k];
        n2 += d[k] * d[k];
    }
    if (n2 == 0.0) {
        d[0] = shape == DomainShape::HalfSpace ? 1.0 : -1.0;
        for (int k = 1; k < dim; ++k) d[k] = 0.0;
        return d;
    }
    const double inv = 1.0 / std::sqrt(n2);
    for (int k = 0; k < dim; ++k) d[k] *= inv;
    return d;
}

bool DomainSpec::in_cone_ball(const Point& y, const Point& z) const {
    const double dist = distance(y, z);
    if (dist > cone_r) return false;
    if (dist == 0.0) return true;
    const Point l = cone_direction(y);
    Point diff;
    diff.dim = dim;
    for (int k = 0; k < dim; ++k) diff[k] = z[k] - y[k];
    return dot(diff, l) / dist >= std::cos(cone_alpha);
}

double DomainSpec::cone_ball_volume() const {
    const double alpha = std::min(cone_alpha, M_PI);
    switch (dim) {
        case 1: return alpha < M_PI / 2.0 ? cone_r : 2.0 * cone_r;
        case 2: return alpha * cone_r * cone_r;
        case 3: return 2.0 * M_PI / 3.0 * cone_r * cone_r * cone_r * (1.0 - std::cos(alpha));
        default: throw ParameterError("cone_ball_volume: dimension must be 1, 2 or 3");
    }
}

Point DomainSpec::sample_cone_ball(const Point& y, RngStream& rng) const {
    for (int attempt = 0; attempt < 100000; ++attempt) {
        Point z;
        z.dim = dim;
        double n2 = 0.0;
        for (int k = 0; k < dim; ++k) {
            z[k] = rng.uniform(-cone_r, cone_r);
            n2 += z[k] * z[k];
        }
        if (n2 > cone_r * cone_r) continue;
        for (int k = 0; k < dim; ++k) z[k] += y[k];
        if (in_cone_ball(y, z)) return z;
    }
    throw ParameterError("sample_cone_ball: rejection sampling failed; cone too thin");
}

void DomainSpec::validate() const {
    if (dim < 1 || dim > kMaxDim)
        throw ConfigError("domain dimension must lie in {1, 2, 3}");
    if (!(cone_alpha > 0.0 && cone_alpha < M_PI))
        throw ConfigError("cone angle alpha must lie in (0, pi)");
    if (!(cone_r > 0.0)) throw ConfigError("cone radius r must be positive");
    if (truncation_radii.empty())
        throw ConfigError("truncation ladder M must contain at least one radius");
    for (std::size_t i = 1; i < truncation_radii.size(); ++i) {
        if (!(truncation_radii[i] > truncation_radii[i - 1]))
            throw ConfigError("M ladder must be strictly increasing");
    }
    if (!contains(anchor)) throw ConfigError("domain anchor must lie inside the domain");
}

bool cone_condition_holds(const DomainSpec& domain, const std::vector<Point>& vertices,
                          int samples, RngStream& rng, std::optional<double> truncation) {
    for (const Point& y : vertices) {
        if (!domain.contains(y)) continue;
        if (truncation && y.norm() > *truncation) continue;
        for (int s = 0; s < samples; ++s) {
            const Point z = domain.sample_cone_ball(y, rng);
            if (!domain.contains(z)) return false;
            if (truncation && z.norm() > *truncation) return false;
        }
    }
    return true;
}

}  // namespace sirlab
