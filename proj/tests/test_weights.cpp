#include <doctest.h>

#include <cmath>

#include "sirlab/weights.hpp"

using namespace sirlab;

namespace {

DomainSpec full_domain(int dim) {
    DomainSpec d;
    d.dim = dim;
    d.cone_alpha = M_PI / 4.0;
    d.cone_r = 1.0;
    d.truncation_radii = {2.5, 3.5, 5.0};
    return d;
}

struct Uniform5 {
    // mu uniform on [-5,5], indicator kernel C=1, Rbar=1; grid aligned so the
    // kernel support boundary falls on cell edges
    BaselineDensity mu = BaselineDensity::uniform_box(1, 5.0, {1.0, 0.0, 0.0});
    KernelSpec kernel{KernelFamily::Indicator, 1.0, 1.0, 1.0, 1.0};
    DomainSpec domain = full_domain(1);
    QuadratureGrid grid = QuadratureGrid::build(domain, mu, 5.0, 0.025);
};

}  // namespace

TEST_CASE("normalizer of a probability density under a covering kernel is one") {
    const BaselineDensity mu = BaselineDensity::uniform_box(1, 0.5, {1.0, 0.0, 0.0});
    KernelSpec k{KernelFamily::Indicator, 1.0, 1.0, 2.0, 2.0};
    const QuadratureGrid grid = QuadratureGrid::build(full_domain(1), mu, 0.5, 1.0 / 64);
    for (double y : {-0.4, 0.0, 0.3}) {
        CHECK(normalizer(k, grid, Point::of(y)) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("normalizer closed form: uniform density on [-5,5], indicator kernel") {
    Uniform5 u;
    const double nu0 = normalizer(u.kernel, u.grid, Point::of(0.0));
    CHECK(nu0 == doctest::Approx(0.2).epsilon(1e-12));

    // independent fine-grid oracle
    double oracle = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const double z = -5.0 + 10.0 * (i + 0.5) / n;
        if (std::abs(z) <= 1.0) oracle += 0.1;
    }
    oracle *= 10.0 / n;
    CHECK(nu0 == doctest::Approx(oracle).epsilon(1e-4));
}

TEST_CASE("normalizer with irrelevant truncation matches the full integral") {
    Uniform5 u;
    // supp K(.,y) n D inside B(0, M): y = 0.5, M = 2.5 covers [-0.5, 1.5]
    const double full = normalizer(u.kernel, u.grid, Point::of(0.5));
    const double trunc = normalizer(u.kernel, u.grid, Point::of(0.5), 2.5);
    CHECK(full == trunc);
}

TEST_CASE("normalizer floor triggers the singular error, never a clamp") {
    Uniform5 u;
    CHECK_THROWS_AS(normalizer(u.kernel, u.grid, Point::of(9.0)), SingularNormalizerError);
}

TEST_CASE("lambda weight: gamma = 0 degenerates to K*mu, support respected") {
    Uniform5 u;
    RngStream rng(3);
    for (int k = 0; k < 100; ++k) {
        const Point x = Point::of(rng.uniform(-4, 4));
        const Point y = Point::of(rng.uniform(-4, 4));
        const double lam = lambda_weight(u.kernel, u.mu, u.grid, 0.0, x, y);
        CHECK(lam == kernel_eval(u.kernel, x, y) * u.mu.mu(y));
    }
    CHECK(lambda_weight(u.kernel, u.mu, u.grid, 0.5, Point::of(0.0), Point::of(1.5)) == 0.0);
}

TEST_CASE("lambda weight closed form at gamma = 1/2") {
    Uniform5 u;
    const double lam = lambda_weight(u.kernel, u.mu, u.grid, 0.5, Point::of(0.0), Point::of(0.5));
    CHECK(lam == doctest::Approx(0.1 / std::sqrt(0.2)).epsilon(1e-12));
}

TEST_CASE("gamma outside [0,1) is rejected") {
    Uniform5 u;
    CHECK_THROWS_WITH_AS(
        lambda_weight(u.kernel, u.mu, u.grid, 1.0, Point::of(0.0), Point::of(0.5)),
        doctest::Contains("gamma must lie in [0,1)"), ParameterError);
    CHECK_THROWS_AS(lambda_weight(u.kernel, u.mu, u.grid, -0.1, Point::of(0.0), Point::of(0.5)),
                    ParameterError);
}

TEST_CASE("omega weight identities") {
    const BaselineDensity mu =
        BaselineDensity::envelope(1, DomainShape::FullSpace, 1.5, 1.0, {0.9, 0.05, 0.05});
    const DomainSpec domain = full_domain(1);
    KernelSpec kernel{KernelFamily::Indicator, 1.0, 1.0, 1.0, 1.0};
    const QuadratureGrid grid = QuadratureGrid::build(domain, mu, 8.0, 0.05);
    RngStream rng(5);
    for (int k = 0; k < 50; ++k) {
        const Point x = Point::of(rng.uniform(-2, 2));
        const Point y = Point::of(rng.uniform(-2, 2));
        const double om = omega_weight(kernel, mu, grid, 0.5, x, y);
        const double lam = lambda_weight(kernel, mu, grid, 0.5, x, y);
        // swap identity from the definitions
        CHECK(om * mu.mu(y) == doctest::Approx(lam * mu.mu(x)).epsilon(1e-12));
        // gamma = 0 unfolds
        CHECK(omega_weight(kernel, mu, grid, 0.0, x, y) ==
              doctest::Approx(kernel_eval(kernel, x, y) * mu.mu(x)));
    }
    // x = y makes the numerators coincide
    const Point p = Point::of(0.7);
    CHECK(omega_weight(kernel, mu, grid, 0.5, p, p) ==
          doctest::Approx(lambda_weight(kernel, mu, grid, 0.5, p, p)));
}

TEST_CASE("operator bounds: numeric sups stay below the proof-chain constants") {
    const DomainSpec domain = full_domain(1);
    const BaselineDensity mu =
        BaselineDensity::envelope(1, DomainShape::FullSpace, 1.5, 1.0, {0.9, 0.05, 0.05});
    KernelSpec kernel{KernelFamily::Indicator, 1.0, 1.0, 1.0, 1.0};
    const QuadratureGrid grid = QuadratureGrid::build(domain, mu, 8.0, 0.05);
    for (double gamma : {0.0, 0.5}) {
        const WeightMatrix w = WeightMatrix::build(kernel, grid, gamma);
        const OperatorBounds b = operator_bound_constants(kernel, mu, domain, gamma);
        CHECK(w.max_row_sum() > 0.0);
        CHECK(w.max_row_sum() <= b.lambda_bound);
        CHECK(w.max_omega_column_sum() > 0.0);
        CHECK(w.max_omega_column_sum() <= b.omega_bound);
    }
    // delta > 1 branch of the constants
    const BaselineDensity mu2 =
        BaselineDensity::envelope(1, DomainShape::FullSpace, 1.0, 2.0, {0.9, 0.05, 0.05});
    const QuadratureGrid grid2 = QuadratureGrid::build(domain, mu2, 6.0, 0.05);
    const WeightMatrix w2 = WeightMatrix::build(kernel, grid2, 0.5);
    const OperatorBounds b2 = operator_bound_constants(kernel, mu2, domain, 0.5);
    CHECK(w2.max_row_sum() <= b2.lambda_bound);
    CHECK(w2.max_omega_column_sum() <= b2.omega_bound);
}

TEST_CASE("power-splitting inequality with the explicit constant") {
    RngStream rng(13);
    for (int k = 0; k < 5000; ++k) {
        const double x = rng.uniform(0.0, 20.0);
        const double y = rng.uniform(0.0, 20.0);
        const double d1 = rng.uniform(0.05, 1.0);
        CHECK(std::pow(x + y, d1) <= std::pow(x, d1) + std::pow(y, d1) + 1e-9);
        const double d2 = rng.uniform(1.0, 4.0);
        const double eps = rng.uniform(0.05, 3.0);
        const double ce = power_split_constant(eps, d2);
        CHECK(std::pow(x + y, d2) <=
              (1.0 + eps) * std::pow(x, d2) + ce * std::pow(y, d2) + 1e-9);
    }
    // the fixed-epsilon rules keep the exponent chains valid
    CHECK(epsilon_linear(0.5) == doctest::Approx(0.5));
    CHECK(0.5 * (1.0 + epsilon_linear(0.5)) < 1.0);
    CHECK(0.5 * std::pow(1.0 + epsilon_quadratic(0.5), 2) < 1.0);
    CHECK(epsilon_linear(0.0) == 1.0);
}

TEST_CASE("weight matrix apply matches direct summation") {
    const DomainSpec domain = full_domain(1);
    const BaselineDensity mu =
        BaselineDensity::envelope(1, DomainShape::FullSpace, 1.5, 1.0, {0.9, 0.05, 0.05});
    KernelSpec kernel{KernelFamily::Indicator, 1.0, 1.0, 1.0, 1.0};
    const QuadratureGrid grid = QuadratureGrid::build(domain, mu, 4.0, 0.1);
    const WeightMatrix w = WeightMatrix::build(kernel, grid, 0.5);

    std::vector<double> field(grid.size());
    RngStream rng(1);
    for (double& v : field) v = rng.uniform01();
    std::vector<double> out;
    w.apply(field, out);

    for (std::size_t i = 0; i < grid.size(); i += 13) {
        double direct = 0.0;
        for (std::size_t j = 0; j < grid.size(); ++j) {
            const double k = kernel.eval_at_distance(distance(grid.node(i), grid.node(j)));
            if (k == 0.0 || grid.mu(j) == 0.0) continue;
            direct += k * grid.mu(j) /
                      std::pow(normalizer(kernel, grid, grid.node(j)), 0.5) * field[j];
        }
        direct *= grid.cell_weight();
        CHECK(out[i] == doctest::Approx(direct).epsilon(1e-12));
    }
}
