#pragma once

#include <array>

#include "sirlab/geometry.hpp"
#include "sirlab/rng.hpp"

namespace sirlab {

enum class Compartment { S = 0, I = 1, R = 2 };

enum class DensityFamily {
    EnvelopePower,  // density proportional to exp(-a*|x|^delta) on D
    UniformBox,     // uniform on the centered box [-halfwidth, halfwidth]^d
};

struct CompartmentDensity {
    DensityFamily family{DensityFamily::EnvelopePower};
    double box_halfwidth{1.0};  // UniformBox only
};

/// Limiting population density mu(x) = S(0)*pi_S + I(0)*pi_I + R(0)*pi_R with
/// its exponential-power envelope constants. Uniform components are accepted
/// as a desk-scale surrogate and flagged in `envelope_ok`.
struct BaselineDensity {
    int dim{1};
    DomainShape shape{DomainShape::FullSpace};
    double envelope_a{1.0};
    double envelope_delta{1.0};
    std::array<double, 3> fractions{1.0, 0.0, 0.0};  // (S(0), I(0), R(0))
    std::array<CompartmentDensity, 3> pi{};

    // Derived on construction.
    double envelope_c0{0.0};
    double envelope_C0{0.0};
    bool envelope_ok{true};
    double envelope_Z{1.0};  // normalizer of exp(-a*|x|^delta) on D

    static BaselineDensity make(int dim, DomainShape shape, double a, double delta,
                                std::array<double, 3> fractions,
                                std::array<CompartmentDensity, 3> pi);

    /// Convenience: all three compartments drawn from the shared envelope.
    static BaselineDensity envelope(int dim, DomainShape shape, double a, double delta,
                                    std::array<double, 3> fractions);

    /// Convenience: all three compartments uniform on the same box.
    static BaselineDensity uniform_box(int dim, double halfwidth, std::array<double, 3> fractions);

    double pi_density(Compartment c, const Point& x) const;

    /// Total density mu(x).
    double mu(const Point& x) const;

    /// Compartment share, e.g. S(0,x) = S(0)*pi_S(x)/mu(x); zero where mu vanishes.
    double share(Compartment c, const Point& x) const;

    double fraction(Compartment c) const { return fractions[static_cast<std::size_t>(c)]; }

    Point sample_position(Compartment c, RngStream& rng) const;

    void validate() const;
};

}  // namespace sirlab
