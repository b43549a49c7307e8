#include <doctest.h>

#include <cmath>

#include "sirlab/density.hpp"
#include "sirlab/quadrature.hpp"

using namespace sirlab;

namespace {

DomainSpec domain_of(int dim) {
    DomainSpec d;
    d.dim = dim;
    d.cone_alpha = M_PI / 4.0;
    d.cone_r = 1.0;
    d.truncation_radii = {3.0};
    return d;
}

}  // namespace

TEST_CASE("envelope density integrates to one on the grid") {
    for (int dim : {1, 2}) {
        const BaselineDensity mu =
            BaselineDensity::envelope(dim, DomainShape::FullSpace, 1.5, 1.0, {0.9, 0.05, 0.05});
        const QuadratureGrid grid =
            QuadratureGrid::build(domain_of(dim), mu, 10.0, dim == 1 ? 0.01 : 0.05);
        const double mass = grid.integrate_mu([](const Point&) { return 1.0; });
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-3));
        CHECK(mu.envelope_ok);
        CHECK(mu.envelope_c0 == doctest::Approx(mu.envelope_C0));
    }
}

TEST_CASE("envelope bounds hold with the analytic normalizer") {
    const BaselineDensity mu =
        BaselineDensity::envelope(2, DomainShape::FullSpace, 1.0, 1.5, {1.0, 0.0, 0.0});
    RngStream rng(5);
    for (int k = 0; k < 300; ++k) {
        const Point x = Point::of(rng.uniform(-4, 4), rng.uniform(-4, 4));
        const double e = std::exp(-1.0 * std::pow(x.norm(), 1.5));
        CHECK(mu.mu(x) >= mu.envelope_c0 * e * (1 - 1e-12));
        CHECK(mu.mu(x) <= mu.envelope_C0 * e * (1 + 1e-12));
    }
}

TEST_CASE("uniform box is flagged as envelope surrogate") {
    const BaselineDensity mu = BaselineDensity::uniform_box(1, 5.0, {0.9, 0.1, 0.0});
    CHECK_FALSE(mu.envelope_ok);
    CHECK(mu.mu(Point::of(0.0)) == doctest::Approx(0.1));
    CHECK(mu.mu(Point::of(5.5)) == 0.0);
    const QuadratureGrid grid = QuadratureGrid::build(domain_of(1), mu, 5.0, 0.01);
    CHECK(grid.integrate_mu([](const Point&) { return 1.0; }) == doctest::Approx(1.0));
}

TEST_CASE("shares sum to one wherever mu is positive") {
    std::array<CompartmentDensity, 3> pi;
    pi[0] = {DensityFamily::EnvelopePower, 0.0};
    pi[1] = {DensityFamily::UniformBox, 0.5};
    pi[2] = {DensityFamily::EnvelopePower, 0.0};
    const BaselineDensity mu =
        BaselineDensity::make(1, DomainShape::FullSpace, 1.0, 1.0, {0.8, 0.15, 0.05}, pi);
    RngStream rng(9);
    for (int k = 0; k < 200; ++k) {
        const Point x = Point::of(rng.uniform(-3, 3));
        if (mu.mu(x) <= 0.0) continue;
        const double s = mu.share(Compartment::S, x) + mu.share(Compartment::I, x) +
                         mu.share(Compartment::R, x);
        CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(mu.mu(x) == doctest::Approx(0.8 * mu.pi_density(Compartment::S, x) +
                                          0.15 * mu.pi_density(Compartment::I, x) +
                                          0.05 * mu.pi_density(Compartment::R, x)));
    }
    // mixed envelope + uniform keeps a positive lower envelope constant
    CHECK(mu.envelope_ok);
}

TEST_CASE("position sampling matches the radial law") {
    // delta = 1, d = 1: |X| ~ Gamma(1)/a, so E|X| = 1/a
    const double a = 2.0;
    const BaselineDensity mu =
        BaselineDensity::envelope(1, DomainShape::FullSpace, a, 1.0, {1.0, 0.0, 0.0});
    RngStream rng(17);
    const int n = 40000;
    double mean_abs = 0.0, mean = 0.0;
    for (int k = 0; k < n; ++k) {
        const Point x = mu.sample_position(Compartment::S, rng);
        mean_abs += std::abs(x[0]);
        mean += x[0];
    }
    mean_abs /= n;
    mean /= n;
    CHECK(mean_abs == doctest::Approx(1.0 / a).epsilon(0.03));
    CHECK(std::abs(mean) < 4.0 * (1.0 / a) / std::sqrt(double(n)));  // symmetric
}

TEST_CASE("half-space sampling stays in the domain") {
    const BaselineDensity mu =
        BaselineDensity::envelope(2, DomainShape::HalfSpace, 1.0, 1.0, {1.0, 0.0, 0.0});
    RngStream rng(23);
    for (int k = 0; k < 1000; ++k) {
        CHECK(mu.sample_position(Compartment::S, rng)[0] >= 0.0);
    }
    CHECK(mu.mu(Point::of(-0.1, 0.0)) == 0.0);
    // half-space normalizer is half of the full-space one
    const BaselineDensity full =
        BaselineDensity::envelope(2, DomainShape::FullSpace, 1.0, 1.0, {1.0, 0.0, 0.0});
    CHECK(mu.mu(Point::of(0.5, 0.0)) == doctest::Approx(2.0 * full.mu(Point::of(0.5, 0.0))));
}

TEST_CASE("density validation names the violated clause") {
    CHECK_THROWS_WITH_AS(
        BaselineDensity::envelope(1, DomainShape::FullSpace, 1.0, 1.0, {0.5, 0.2, 0.2}),
        doctest::Contains("fractions must sum to 1"), ConfigError);
    CHECK_THROWS_AS(BaselineDensity::envelope(1, DomainShape::FullSpace, -1.0, 1.0, {1, 0, 0}),
                    ConfigError);
}
