#include "sirlab/density.hpp"

#include <cmath>

namespace sirlab {

namespace {

double sphere_surface(int dim) {
    // |S^{d-1}|
    switch (dim) {
        case 1: return 2.0;
        case 2: return 2.0 * M_PI;
        case 3: return 4.0 * M_PI;
        default: throw ParameterError("sphere_surface: dimension must be 1, 2 or 3");
    }
}

/// Normalizer of exp(-a*|x|^delta) over R^d: S_{d-1} * Gamma(d/delta) / (delta * a^{d/delta}).
double envelope_normalizer(int dim, DomainShape shape, double a, double delta) {
    const double k = static_cast<double>(dim) / delta;
    double z = sphere_surface(dim) * std::tgamma(k) / (delta * std::pow(a, k));
    if (shape == DomainShape::HalfSpace) z *= 0.5;
    return z;
}

double box_volume(int dim, double halfwidth) {
    return std::pow(2.0 * halfwidth, dim);
}

}  // namespace

BaselineDensity BaselineDensity::make(int dim, DomainShape shape, double a, double delta,
                                      std::array<double, 3> fractions,
                                      std::array<CompartmentDensity, 3> pi) {
    BaselineDensity d;
    d.dim = dim;
    d.shape = shape;
    d.envelope_a = a;
    d.envelope_delta = delta;
    d.fractions = fractions;
    d.pi = pi;
    d.validate();
    d.envelope_Z = envelope_normalizer(dim, shape, a, delta);

    // Envelope constants: each envelope component contributes w/Z to both
    // bounds; a uniform component contributes only to the upper bound (its
    // density vanishes outside the box, so the lower envelope fails there).
    double c0 = 0.0, C0 = 0.0;
    bool ok = true;
    for (int c = 0; c < 3; ++c) {
        const double w = fractions[static_cast<std::size_t>(c)];
        if (w == 0.0) continue;
        const CompartmentDensity& f = pi[static_cast<std::size_t>(c)];
        if (f.family == DensityFamily::EnvelopePower) {
            c0 += w / d.envelope_Z;
            C0 += w / d.envelope_Z;
        } else {
            ok = false;
            const double corner = f.box_halfwidth * std::sqrt(static_cast<double>(dim));
            C0 += w / box_volume(dim, f.box_halfwidth) * std::exp(a * std::pow(corner, delta));
        }
    }
    d.envelope_c0 = c0;
    d.envelope_C0 = C0;
    d.envelope_ok = ok && c0 > 0.0;
    return d;
}

BaselineDensity BaselineDensity::envelope(int dim, DomainShape shape, double a, double delta,
                                          std::array<double, 3> fractions) {
    std::array<CompartmentDensity, 3> pi;
    pi.fill(CompartmentDensity{DensityFamily::EnvelopePower, 0.0});
    return make(dim, shape, a, delta, fractions, pi);
}

BaselineDensity BaselineDensity::uniform_box(int dim, double halfwidth,
                                             std::array<double, 3> fractions) {
    std::array<CompartmentDensity, 3> pi;
    pi.fill(CompartmentDensity{DensityFamily::UniformBox, halfwidth});
    return make(dim, DomainShape::FullSpace, 1.0, 1.0, fractions, pi);
}

double BaselineDensity::pi_density(Compartment c, const Point& x) const {
    if (shape == DomainShape::HalfSpace && x.c[0] < 0.0) return 0.0;
    const CompartmentDensity& f = pi[static_cast<std::size_t>(c)];
    if (f.family == DensityFamily::EnvelopePower) {
        return std::exp(-envelope_a * std::pow(x.norm(), envelope_delta)) / envelope_Z;
    }
    for (int k = 0; k < dim; ++k) {
        if (std::abs(x[k]) > f.box_halfwidth) return 0.0;
    }
    return 1.0 / box_volume(dim, f.box_halfwidth);
}

double BaselineDensity::mu(const Point& x) const {
    double m = 0.0;
    for (int c = 0; c < 3; ++c) {
        const double w = fractions[static_cast<std::size_t>(c)];
        if (w > 0.0) m += w * pi_density(static_cast<Compartment>(c), x);
    }
    return m;
}

double BaselineDensity::share(Compartment c, const Point& x) const {
    const double m = mu(x);
    if (m <= 0.0) return 0.0;
    return fraction(c) * pi_density(c, x) / m;
}

Point BaselineDensity::sample_position(Compartment c, RngStream& rng) const {
    const CompartmentDensity& f = pi[static_cast<std::size_t>(c)];
    Point x;
    x.dim = dim;
    if (f.family == DensityFamily::UniformBox) {
        for (int k = 0; k < dim; ++k) x[k] = rng.uniform(-f.box_halfwidth, f.box_halfwidth);
    } else {
        // radius: a*r^delta ~ Gamma(d/delta), direction uniform on the sphere
        const double g = rng.gamma(static_cast<double>(dim) / envelope_delta);
        const double radius = std::pow(g / envelope_a, 1.0 / envelope_delta);
        if (dim == 1) {
            x[0] = rng.uniform01() < 0.5 ? -radius : radius;
        } else {
            double n2 = 0.0;
            for (int k = 0; k < dim; ++k) {
                x[k] = rng.normal();
                n2 += x[k] * x[k];
            }
            const double scale = radius / std::sqrt(n2);
            for (int k = 0; k < dim; ++k) x[k] *= scale;
        }
    }
    if (shape == DomainShape::HalfSpace) x[0] = std::abs(x[0]);
    return x;
}

void BaselineDensity::validate() const {
    if (dim < 1 || dim > kMaxDim) throw ConfigError("density dimension must lie in {1, 2, 3}");
    if (!(envelope_a > 0.0)) throw ConfigError("envelope exponent a must be positive");
    if (!(envelope_delta > 0.0)) throw ConfigError("envelope power delta must be positive");
    double sum = 0.0;
    for (double w : fractions) {
        if (w < 0.0 || w > 1.0) throw ConfigError("fractions must lie in [0,1]");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw ConfigError("fractions must sum to 1");
    for (int c = 0; c < 3; ++c) {
        const CompartmentDensity& f = pi[static_cast<std::size_t>(c)];
        if (f.family == DensityFamily::UniformBox) {
            if (!(f.box_halfwidth > 0.0))
                throw ConfigError("uniform box halfwidth must be positive");
            if (shape == DomainShape::HalfSpace)
                throw ConfigError("uniform box densities require the full-space domain");
        }
    }
}

}  // namespace sirlab
