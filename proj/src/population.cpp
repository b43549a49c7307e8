#include "sirlab/population.hpp"

#include <cmath>
#include <cstring>

#include "sirlab/weights.hpp"

namespace sirlab {

namespace {

void assign_noise(Population& pop, const InfectivityModel& infectivity) {
    pop.curve.resize(pop.N);
    pop.thinning_seed.resize(pop.N);
    for (std::size_t i = 0; i < pop.N; ++i) {
        pop.thinning_seed[i] = substream_seed(pop.seed, "thinning", i);
        if (pop.state0[i] == Health::Recovered) continue;
        RngStream cs = RngStream::from(pop.seed, "curve", i);
        pop.curve[i] = infectivity.sample_curve(pop.state0[i] == Health::Infected
                                                    ? InfectivityModel::Cohort::InitiallyInfected
                                                    : InfectivityModel::Cohort::NewlyInfected,
                                                cs);
    }
}

std::uint64_t population_hash(const Population& pop) {
    std::uint64_t h = mix64(pop.seed ^ (pop.N * 0x9E3779B97F4A7C15ull));
    h = mix64(h ^ static_cast<std::uint64_t>(pop.gamma * (1ull << 32)));
    for (std::size_t i = 0; i < pop.coords.size(); ++i) {
        std::uint64_t bits;
        static_assert(sizeof(double) == sizeof(std::uint64_t));
        std::memcpy(&bits, &pop.coords[i], sizeof(bits));
        h = mix64(h ^ bits);
    }
    for (Health s : pop.state0) h = mix64(h ^ static_cast<std::uint64_t>(s));
    return h;
}

}  // namespace

std::size_t Population::count0(Health h) const {
    std::size_t n = 0;
    for (Health s : state0)
        if (s == h) ++n;
    return n;
}

Population init_population(const BaselineDensity& density, const InfectivityModel& infectivity,
                           std::size_t N, double gamma, std::uint64_t seed) {
    if (N < 1) throw ConfigError("population size N must be at least 1");
    require_valid_gamma(gamma);
    density.validate();

    Population pop;
    pop.dim = density.dim;
    pop.N = N;
    pop.gamma = gamma;
    pop.seed = seed;
    pop.coords.resize(N * static_cast<std::size_t>(density.dim));
    pop.state0.resize(N);

    RngStream init_rng = RngStream::from(seed, "init");
    const double fS = density.fraction(Compartment::S);
    const double fI = density.fraction(Compartment::I);
    for (std::size_t i = 0; i < N; ++i) {
        const double u = init_rng.uniform01();
        Compartment c;
        if (u < fS) {
            c = Compartment::S;
            pop.state0[i] = Health::Susceptible;
        } else if (u < fS + fI) {
            c = Compartment::I;
            pop.state0[i] = Health::Infected;
        } else {
            c = Compartment::R;
            pop.state0[i] = Health::Recovered;
        }
        const Point x = density.sample_position(c, init_rng);
        for (int k = 0; k < density.dim; ++k)
            pop.coords[i * static_cast<std::size_t>(density.dim) + static_cast<std::size_t>(k)] = x[k];
    }
    assign_noise(pop, infectivity);
    pop.identity = population_hash(pop);
    return pop;
}

Population population_from_explicit(int dim, const std::vector<Point>& positions,
                                    const std::vector<Health>& states,
                                    const InfectivityModel& infectivity, double gamma,
                                    std::uint64_t seed) {
    if (positions.size() != states.size() || positions.empty())
        throw UsageError("population_from_explicit: positions and states must match and be nonempty");
    require_valid_gamma(gamma);
    Population pop;
    pop.dim = dim;
    pop.N = positions.size();
    pop.gamma = gamma;
    pop.seed = seed;
    pop.coords.resize(pop.N * static_cast<std::size_t>(dim));
    pop.state0 = states;
    for (std::size_t i = 0; i < pop.N; ++i) {
        for (int k = 0; k < dim; ++k)
            pop.coords[i * static_cast<std::size_t>(dim) + static_cast<std::size_t>(k)] = positions[i][k];
    }
    assign_noise(pop, infectivity);
    pop.identity = population_hash(pop);
    return pop;
}

}  // namespace sirlab
