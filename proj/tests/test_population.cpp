#include <doctest.h>

#include <cmath>

#include "sirlab/population.hpp"

using namespace sirlab;

namespace {

InfectivityModel default_model() {
    return InfectivityModel(2.0, CurveSpec{}, DurationSpec{DurationLaw::Exponential, 1, 1, 1, 2},
                            CurveSpec{}, DurationSpec{DurationLaw::Exponential, 1, 1, 1, 2});
}

}  // namespace

TEST_CASE("degenerate fractions make everyone susceptible") {
    const BaselineDensity mu =
        BaselineDensity::envelope(1, DomainShape::FullSpace, 1.0, 1.0, {1.0, 0.0, 0.0});
    const Population pop = init_population(mu, default_model(), 500, 0.5, 1);
    CHECK(pop.count0(Health::Susceptible) == 500);
    CHECK(pop.count0(Health::Infected) == 0);
    CHECK(pop.count0(Health::Recovered) == 0);
}

TEST_CASE("same seed yields a bit-identical population") {
    const BaselineDensity mu =
        BaselineDensity::envelope(2, DomainShape::FullSpace, 1.0, 1.0, {0.8, 0.1, 0.1});
    const InfectivityModel m = default_model();
    const Population a = init_population(mu, m, 300, 0.5, 77);
    const Population b = init_population(mu, m, 300, 0.5, 77);
    CHECK(a.coords == b.coords);
    CHECK(a.state0 == b.state0);
    CHECK(a.thinning_seed == b.thinning_seed);
    CHECK(a.identity == b.identity);
    REQUIRE(a.curve.size() == b.curve.size());
    for (std::size_t i = 0; i < a.curve.size(); ++i) {
        CHECK(a.curve[i].eta == b.curve[i].eta);
        CHECK(a.curve[i].level == b.curve[i].level);
    }
    const Population c = init_population(mu, m, 300, 0.5, 78);
    CHECK(c.identity != a.identity);
}

TEST_CASE("initial states follow the configured fractions (binomial oracle)") {
    const BaselineDensity mu =
        BaselineDensity::envelope(1, DomainShape::FullSpace, 1.0, 1.0, {0.9, 0.05, 0.05});
    const std::size_t N = 10000;
    const Population pop = init_population(mu, default_model(), N, 0.0, 5);
    const double frac = static_cast<double>(pop.count0(Health::Susceptible)) / N;
    const double half_width = 4.0 * std::sqrt(0.9 * 0.1 / N);
    CHECK(std::abs(frac - 0.9) <= half_width);
}

TEST_CASE("partition of the index set") {
    const BaselineDensity mu =
        BaselineDensity::envelope(1, DomainShape::FullSpace, 1.0, 1.0, {0.6, 0.3, 0.1});
    const Population pop = init_population(mu, default_model(), 1000, 0.0, 9);
    CHECK(pop.count0(Health::Susceptible) + pop.count0(Health::Infected) +
              pop.count0(Health::Recovered) ==
          pop.N);
}

TEST_CASE("curves are assigned per cohort; recovered get none") {
    const BaselineDensity mu =
        BaselineDensity::envelope(1, DomainShape::FullSpace, 1.0, 1.0, {0.5, 0.25, 0.25});
    const InfectivityModel m(2.0, CurveSpec{}, DurationSpec{DurationLaw::Fixed, 1.0, 1, 1, 2},
                             CurveSpec{}, DurationSpec{DurationLaw::Fixed, 3.0, 1, 1, 2});
    const Population pop = init_population(mu, m, 400, 0.0, 13);
    for (std::size_t i = 0; i < pop.N; ++i) {
        switch (pop.state0[i]) {
            case Health::Susceptible: CHECK(pop.curve[i].eta == 1.0); break;
            case Health::Infected: CHECK(pop.curve[i].eta == 3.0); break;
            case Health::Recovered: CHECK(pop.curve[i].eta == 0.0); break;
        }
    }
}

TEST_CASE("explicit construction keeps positions and validates sizes") {
    const InfectivityModel m = default_model();
    const Population pop = population_from_explicit(
        1, {Point::of(0.0), Point::of(0.5), Point::of(10.0)},
        {Health::Infected, Health::Susceptible, Health::Susceptible}, m, 0.0, 3);
    CHECK(pop.N == 3);
    CHECK(pop.position(2)[0] == 10.0);
    CHECK_THROWS_AS(population_from_explicit(1, {Point::of(0.0)}, {}, m, 0.0, 3), UsageError);
}

TEST_CASE("invalid arguments are rejected") {
    const BaselineDensity mu =
        BaselineDensity::envelope(1, DomainShape::FullSpace, 1.0, 1.0, {1.0, 0.0, 0.0});
    CHECK_THROWS_AS(init_population(mu, default_model(), 0, 0.0, 1), ConfigError);
    CHECK_THROWS_AS(init_population(mu, default_model(), 10, 1.0, 1), ParameterError);
}
