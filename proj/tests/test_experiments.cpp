#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "sirlab/experiments.hpp"

using namespace sirlab;

namespace {

ModelInstance small_instance(double gamma, double lambda_star) {
    DomainSpec domain;
    domain.dim = 1;
    domain.cone_alpha = M_PI / 4.0;
    domain.cone_r = 1.0;
    domain.truncation_radii = {2.5, 3.5, 5.0};
    const BaselineDensity mu =
        BaselineDensity::envelope(1, DomainShape::FullSpace, 1.5, 1.0, {0.9, 0.05, 0.05});
    KernelSpec kernel{KernelFamily::Indicator, 1.0, 1.0, 1.0, 1.0};
    const DurationSpec dur{DurationLaw::Exponential, 1.0, 1.0, 1.0, 2.0};
    InfectivityModel inf(lambda_star, CurveSpec{}, dur, CurveSpec{}, dur);
    return ModelInstance{domain, kernel, mu, inf, gamma};
}

SolveOptions small_solver() {
    SolveOptions o;
    o.dt = 5e-3;
    o.spacing = 2.0 / 33.0;
    o.halfwidth = 6.0;
    o.truncation = 5.0;
    o.store_every = 8;
    return o;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("replicate seeds follow the documented splitting rule") {
    CHECK(replicate_seed(42, 0) == substream_seed(42, "replicate", 0));
    CHECK(replicate_seed(42, 1) != replicate_seed(42, 0));
    CHECK(replicate_seed(43, 0) != replicate_seed(42, 0));
}

TEST_CASE("loglog slope recovers a known power law") {
    std::vector<std::pair<double, double>> pts;
    for (double n : {250.0, 1000.0, 4000.0}) pts.emplace_back(n, 3.0 * std::pow(n, -0.5));
    CHECK(fit_loglog_slope(pts) == doctest::Approx(-0.5).epsilon(1e-9));
    CHECK(std::isnan(fit_loglog_slope({{100.0, 0.0}, {200.0, 0.0}})));
}

TEST_CASE("transmission-free LLN reduces to initial-sampling fluctuation (CLT oracle)") {
    const ModelInstance inst = small_instance(0.0, 0.0);
    const TestFunctionSuite suite = TestFunctionSuite::standard(1, {-1.0, 0.0, 1.0}, 1.0, 4.0);
    ExperimentOptions opts;
    opts.N_list = {100, 400, 1600};
    opts.seeds = 12;
    opts.t_points = 5;
    opts.t_end = 1.0;
    opts.workers = 2;
    const LlnReport report = lln_experiment(inst, small_solver(), suite, opts, 2024);

    // S-compartment slope: pure i.i.d. sampling error scales like 1/sqrt(N)
    double slope_S = 0.0;
    for (const auto& [comp, slope] : report.slopes) {
        if (comp == "S") slope_S = slope;
    }
    CHECK(slope_S >= -0.7);
    CHECK(slope_S <= -0.3);

    // strict decrease of the mean S-error across N
    std::vector<double> means;
    for (const LlnAggregate& a : report.aggregates) {
        if (a.compartment == "S") means.push_back(a.mean_error);
    }
    REQUIRE(means.size() == 3);
    CHECK(means[1] < means[0]);
    CHECK(means[2] < means[1]);

    // direct CLT cross-check: the S-error at N has the i.i.d. sampling scale
    // sqrt(Var(phi * 1_S)/N); with |phi| <= 1 the constant-phi error alone is
    // at least sqrt(2/pi) * sqrt(S(0)(1-S(0))/N) in expectation.
    const double clt_floor =
        std::sqrt(2.0 / M_PI) * std::sqrt(0.9 * 0.1 / 1600.0);
    CHECK(means[2] >= 0.25 * clt_floor);
    CHECK(means[2] <= 10.0 * clt_floor);

    // with phi == 1 the total-mass error is exactly the quadrature residual,
    // independent of N: both sides are normalized
    const SolveOptions so = small_solver();
    const LimitFields limit = solve_limit(inst.domain, inst.kernel, inst.density,
                                          inst.infectivity, inst.gamma, [&] {
                                              SolveOptions o = so;
                                              o.t_end = opts.t_end;
                                              return o;
                                          }());
    const auto one = [](const Point&) { return 1.0; };
    for (std::size_t N : opts.N_list) {
        auto pop = std::make_shared<Population>(
            init_population(inst.density, inst.infectivity, N, inst.gamma, 99));
        SimOptions sim_opt;
        sim_opt.t_end = opts.t_end;
        const SimResult run = simulate(pop, inst.infectivity, inst.kernel, sim_opt);
        const double emp = run.trajectory.measure_eval(MeasureKind::Total, 0.5, one);
        const double lim = limit.pair(MeasureKind::Total, 0, one);
        CHECK(std::abs(emp - lim) == doctest::Approx(report.quadrature_residual).epsilon(1e-9));
    }
}

TEST_CASE("lln report is deterministic and identical on re-run") {
    const ModelInstance inst = small_instance(0.5, 2.0);
    const TestFunctionSuite suite = TestFunctionSuite::standard(1, {-1.0, 0.0, 1.0}, 1.0, 4.0);
    ExperimentOptions opts;
    opts.N_list = {50, 100};
    opts.seeds = 3;
    opts.t_points = 5;
    opts.t_end = 1.0;
    opts.workers = 1;
    const LlnReport a = lln_experiment(inst, small_solver(), suite, opts, 7);
    opts.workers = 3;  // results must not depend on the worker count
    const LlnReport b = lln_experiment(inst, small_solver(), suite, opts, 7);
    REQUIRE(a.rows.size() == b.rows.size());
    for (std::size_t k = 0; k < a.rows.size(); ++k) {
        CHECK(a.rows[k].compartment == b.rows[k].compartment);
        CHECK(a.rows[k].N == b.rows[k].N);
        CHECK(a.rows[k].seed_index == b.rows[k].seed_index);
        CHECK(a.rows[k].sup_error == b.rows[k].sup_error);
    }
}

TEST_CASE("emit: header-only CSV for an empty report, identical bytes on re-emit") {
    const std::string dir = "test_emit_out";
    LlnReport empty;
    emit_lln_report(empty, dir);
    CHECK(slurp(dir + "/lln.csv") == "compartment,N,seed,sup_error\n");

    LlnReport r;
    r.master_seed = 5;
    r.rows = {{"S", 250, 0, 0.125}, {"S", 250, 1, 0.25}};
    r.aggregates = {{"S", 250, 0.1875, 0.0625}};
    r.slopes = {{"S", -0.5}};
    emit_lln_report(r, dir);
    const std::string first = slurp(dir + "/lln.csv");
    const std::string first_summary = slurp(dir + "/summary.txt");
    emit_lln_report(r, dir);
    CHECK(slurp(dir + "/lln.csv") == first);
    CHECK(slurp(dir + "/summary.txt") == first_summary);
    CHECK(first.find("S,250,0,0.125\n") != std::string::npos);
    std::filesystem::remove_all(dir);
}

TEST_CASE("truncation experiment: gamma = 0 kills pi_n, top rung self-distance is zero") {
    const ModelInstance inst = small_instance(0.0, 1.5);
    TruncationReport report =
        truncation_experiment(inst, small_solver(), 200, 3, 1.5, 2, 11);
    REQUIRE(report.rows.size() == 3);
    for (const TruncationRow& row : report.rows) {
        CHECK(row.pi_n == 0.0);
        CHECK(row.coupling_mean >= 0.0);
        CHECK(row.coupling_mean <= 1.0);
    }
    CHECK(report.rows.back().l1_distance == 0.0);

    const std::string dir = "test_trunc_out";
    emit_truncation_report(report, dir);
    const std::string csv = slurp(dir + "/truncation.csv");
    CHECK(csv.rfind("n,M_n,l1_distance,pi_n,coupling_mean\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);  // header + 3 rungs
    std::filesystem::remove_all(dir);
}

TEST_CASE("test-function suite obeys the bound and size contracts") {
    const TestFunctionSuite suite = TestFunctionSuite::standard(2, {-2.0, 0.0, 2.0}, 1.0, 4.0);
    CHECK(suite.size() >= 5);
    RngStream rng(1);
    for (const auto& entry : suite.members) {
        for (int k = 0; k < 200; ++k) {
            const Point x = Point::of(rng.uniform(-5, 5), rng.uniform(-5, 5));
            const double v = entry.phi(x);
            CHECK(v <= 1.0 + 1e-12);
            CHECK(v >= -1e-12);
        }
    }
    CHECK_THROWS_AS(TestFunctionSuite::standard(1, {}, 1.0, 4.0), ConfigError);
}
