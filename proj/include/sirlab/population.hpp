#pragma once

#include <cstdint>
#include <vector>

#include "sirlab/density.hpp"
#include "sirlab/infectivity.hpp"

namespace sirlab {

enum class Health : std::uint8_t { Susceptible = 0, Infected = 1, Recovered = 2 };

/// A frozen population draw: positions, initial states, and the per-individual
/// randomness assignments (infectivity curve and thinning stream). Curves and
/// streams are fixed at initialization so that full-domain and truncated
/// simulations of the same Population share their driving noise.
struct Population {
    int dim{1};
    std::size_t N{0};
    double gamma{0.0};
    std::uint64_t seed{0};
    std::uint64_t identity{0};  // hash of (seed, N, gamma, positions) for usage checks

    std::vector<double> coords;           // N * dim, row-major per individual
    std::vector<Health> state0;           // initial compartment
    std::vector<SampledCurve> curve;      // per individual; empty for initially recovered
    std::vector<std::uint64_t> thinning_seed;  // per individual stream seed

    std::size_t count0(Health h) const;

    Point position(std::size_t i) const {
        Point p;
        p.dim = dim;
        for (int k = 0; k < dim; ++k) p[k] = coords[i * static_cast<std::size_t>(dim) + static_cast<std::size_t>(k)];
        return p;
    }
};

/// Draws (state, position) pairs i.i.d. per the initial-data assumption and
/// pre-assigns curves and thinning streams. Deterministic given the seed.
Population init_population(const BaselineDensity& density, const InfectivityModel& infectivity,
                           std::size_t N, double gamma, std::uint64_t seed);

/// Test/oracle construction from explicit positions and states; curves and
/// streams are assigned with the same splitting rule as init_population.
Population population_from_explicit(int dim, const std::vector<Point>& positions,
                                    const std::vector<Health>& states,
                                    const InfectivityModel& infectivity, double gamma,
                                    std::uint64_t seed);

}  // namespace sirlab
