#include <doctest.h>

#include <cmath>

#include "sirlab/infectivity.hpp"

using namespace sirlab;
using Cohort = InfectivityModel::Cohort;

namespace {

InfectivityModel constant_model(double lambda_star, DurationSpec dur) {
    return InfectivityModel(lambda_star, CurveSpec{}, dur, CurveSpec{}, dur);
}

}  // namespace

TEST_CASE("constant-until-eta with fixed duration") {
    const InfectivityModel m =
        constant_model(2.0, DurationSpec{DurationLaw::Fixed, 1.0, 1.0, 1.0, 2.0});
    RngStream rng(1);
    const SampledCurve c = m.sample_curve(Cohort::NewlyInfected, rng);
    CHECK(c.eta == 1.0);
    CHECK(c.eval(0.0) == 2.0);
    CHECK(c.eval(0.999) == 2.0);
    CHECK(c.eval(1.0) == 0.0);
    CHECK(c.eval(5.0) == 0.0);
    CHECK(c.eval(-0.5) == 0.0);  // zero before infection age 0
    CHECK(m.mean_curve(Cohort::NewlyInfected, 0.5) == 2.0);
    CHECK(m.mean_curve(Cohort::NewlyInfected, 1.5) == 0.0);
    CHECK(m.mean_curve(Cohort::NewlyInfected, -1.0) == 0.0);
}

TEST_CASE("piecewise family with one level degenerates to constant-until-eta") {
    CurveSpec pw;
    pw.family = CurveFamily::PiecewiseLevels;
    pw.levels = 1;
    const DurationSpec dur{DurationLaw::Fixed, 1.5, 1.0, 1.0, 2.0};
    const InfectivityModel m(2.0, pw, dur, pw, dur);
    RngStream rng(2);
    const SampledCurve c = m.sample_curve(Cohort::NewlyInfected, rng);
    CHECK(c.level.size() == 1);
    CHECK(c.eval(0.7) == 2.0);
    CHECK(c.eval(1.5) == 0.0);
    CHECK(m.mean_curve(Cohort::NewlyInfected, 0.7) == 2.0);
}

TEST_CASE("piecewise geometric profile") {
    CurveSpec pw;
    pw.family = CurveFamily::PiecewiseLevels;
    pw.levels = 4;
    pw.level_ratio = 0.5;
    const DurationSpec dur{DurationLaw::Fixed, 2.0, 1.0, 1.0, 2.0};
    const InfectivityModel m(1.0, pw, dur, pw, dur);
    RngStream rng(3);
    const SampledCurve c = m.sample_curve(Cohort::NewlyInfected, rng);
    CHECK(c.eval(0.1) == doctest::Approx(1.0));
    CHECK(c.eval(0.6) == doctest::Approx(0.5));
    CHECK(c.eval(1.1) == doctest::Approx(0.25));
    CHECK(c.eval(1.9) == doctest::Approx(0.125));
    CHECK(m.mean_curve(Cohort::NewlyInfected, 0.6) == doctest::Approx(0.5));
}

TEST_CASE("mean curve for exponential durations: analytic vs Monte Carlo oracle") {
    const InfectivityModel m =
        constant_model(2.0, DurationSpec{DurationLaw::Exponential, 1.0, 1.0, 1.0, 2.0});
    CHECK(m.mean_is_analytic(Cohort::NewlyInfected));
    for (double t : {0.0, 0.5, 1.0, 2.0}) {
        CHECK(m.mean_curve(Cohort::NewlyInfected, t) == doctest::Approx(2.0 * std::exp(-t)));
    }
    // Monte Carlo oracle with a 3-sigma band
    RngStream rng(4);
    const int n = 100000;
    const double t = 0.7;
    double acc = 0.0, acc2 = 0.0;
    for (int k = 0; k < n; ++k) {
        const double v = m.sample_curve(Cohort::NewlyInfected, rng).eval(t);
        acc += v;
        acc2 += v * v;
    }
    const double mean = acc / n;
    const double sd = std::sqrt((acc2 / n - mean * mean) / n);
    CHECK(std::abs(mean - 2.0 * std::exp(-0.7)) <= 3.0 * sd);
}

TEST_CASE("duration cdf families") {
    const DurationSpec fixed{DurationLaw::Fixed, 1.0, 1.0, 1.0, 2.0};
    CHECK(fixed.cdf(0.5) == 0.0);
    CHECK(fixed.cdf(1.0) == 1.0);  // cadlag at the point mass
    const DurationSpec expo{DurationLaw::Exponential, 1.0, 1.3, 1.0, 2.0};
    CHECK(expo.cdf(2.0) == doctest::Approx(1.0 - std::exp(-2.6)));
    const DurationSpec unif{DurationLaw::UniformInterval, 1.0, 1.0, 1.0, 3.0};
    CHECK(unif.cdf(2.0) == doctest::Approx(0.5));
    CHECK(unif.cdf(0.5) == 0.0);
    CHECK(unif.cdf(3.5) == 1.0);
}

TEST_CASE("survival complements the cdf exactly") {
    const InfectivityModel m =
        constant_model(1.0, DurationSpec{DurationLaw::Exponential, 1.0, 0.7, 1.0, 2.0});
    for (double t : {0.0, 0.3, 1.7, 9.0}) {
        CHECK(m.duration_survival(Cohort::NewlyInfected, t) +
                  m.duration_cdf(Cohort::NewlyInfected, t) ==
              1.0);
    }
}

TEST_CASE("constant family identity: mean = lambda_star * (1 - F)") {
    for (DurationLaw law : {DurationLaw::Fixed, DurationLaw::Exponential,
                            DurationLaw::UniformInterval}) {
        DurationSpec dur;
        dur.law = law;
        dur.eta0 = 1.2;
        dur.rho = 0.8;
        dur.lo = 0.5;
        dur.hi = 1.5;
        const InfectivityModel m = constant_model(1.7, dur);
        for (double t : {0.0, 0.25, 0.75, 1.3, 2.0}) {
            CHECK(m.mean_curve(Cohort::NewlyInfected, t) ==
                  doctest::Approx(1.7 * (1.0 - m.duration_cdf(Cohort::NewlyInfected, t))));
        }
    }
}

TEST_CASE("expdecay discretizes onto 64 levels; Monte Carlo fallback for random durations") {
    CurveSpec ed;
    ed.family = CurveFamily::ExpDecay;
    ed.decay = 1.0;
    const DurationSpec fixed{DurationLaw::Fixed, 2.0, 1.0, 1.0, 2.0};
    const InfectivityModel fixed_model(1.0, ed, fixed, ed, fixed);
    CHECK(fixed_model.mean_is_analytic(Cohort::NewlyInfected));
    RngStream rng(5);
    const SampledCurve c = fixed_model.sample_curve(Cohort::NewlyInfected, rng);
    CHECK(c.level.size() == kExpDecayLevels);
    CHECK(c.eval(0.0) == doctest::Approx(1.0));
    // level at the left endpoint of the segment containing t
    const double seg_width = 2.0 / kExpDecayLevels;
    CHECK(c.eval(1.0) == doctest::Approx(std::exp(-seg_width * std::floor(1.0 / seg_width))));
    CHECK(fixed_model.mean_curve(Cohort::NewlyInfected, 1.0) == doctest::Approx(c.eval(1.0)));

    const DurationSpec expo{DurationLaw::Exponential, 1.0, 1.0, 1.0, 2.0};
    const InfectivityModel mc_model(1.0, ed, expo, ed, expo);
    CHECK_FALSE(mc_model.mean_is_analytic(Cohort::NewlyInfected));
    CHECK(mc_model.mean_stderr(Cohort::NewlyInfected) > 0.0);
    CHECK(mc_model.mean_stderr(Cohort::NewlyInfected) <= 0.004 * 1.0);  // <= 0.4% of the cap
    // Monte Carlo mean sits between the exact bounds exp(-t) * P(eta > t) and
    // the one-segment-coarser value
    const double t = 0.5;
    const double mc = mc_model.mean_curve(Cohort::NewlyInfected, t);
    CHECK(mc > 0.0);
    CHECK(mc <= 1.0);
    CHECK(std::abs(mc - std::exp(-t) * std::exp(-t)) < 0.02);
    // deterministic: same model, same table
    const InfectivityModel mc_model2(1.0, ed, expo, ed, expo);
    CHECK(mc == mc_model2.mean_curve(Cohort::NewlyInfected, t));
}

TEST_CASE("sampled curves respect the cap and eta is exact") {
    CurveSpec ed;
    ed.family = CurveFamily::ExpDecay;
    ed.decay = 2.0;
    const DurationSpec unif{DurationLaw::UniformInterval, 1.0, 1.0, 0.5, 2.5};
    const InfectivityModel m(1.5, ed, unif, ed, unif);
    RngStream rng(6);
    for (int k = 0; k < 2000; ++k) {
        const SampledCurve c = m.sample_curve(Cohort::NewlyInfected, rng);
        CHECK(c.eta >= 0.5);
        CHECK(c.eta <= 2.5);
        CHECK(c.breaks.back() == c.eta);
        for (double lv : c.level) {
            CHECK(lv > 0.0);
            CHECK(lv <= 1.5);
        }
        CHECK(c.eval(c.eta) == 0.0);
        CHECK(c.eval(std::nextafter(c.eta, 0.0)) > 0.0);
    }
}

TEST_CASE("empirical mean over many draws stays within 4 standard errors") {
    CurveSpec pw;
    pw.family = CurveFamily::PiecewiseLevels;
    pw.levels = 3;
    pw.level_ratio = 0.7;
    const DurationSpec expo{DurationLaw::Exponential, 1.0, 1.0, 1.0, 2.0};
    const InfectivityModel m(2.0, pw, expo, pw, expo);
    RngStream rng(7);
    const double t = 0.9;
    const std::size_t n = 100000;
    double acc = 0.0, acc2 = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double v = m.sample_curve(Cohort::NewlyInfected, rng).eval(t);
        acc += v;
        acc2 += v * v;
    }
    const double mean = acc / n;
    const double se = std::sqrt((acc2 / n - mean * mean) / n);
    CHECK(std::abs(mean - m.mean_curve(Cohort::NewlyInfected, t)) <=
          4.0 * (se + m.mean_stderr(Cohort::NewlyInfected)));
}

TEST_CASE("zero cap collapses curves and durations together") {
    const InfectivityModel m =
        constant_model(0.0, DurationSpec{DurationLaw::Exponential, 1.0, 1.0, 1.0, 2.0});
    RngStream rng(8);
    const SampledCurve c = m.sample_curve(Cohort::NewlyInfected, rng);
    CHECK(c.eta == 0.0);
    CHECK(c.eval(0.0) == 0.0);
    CHECK(m.duration_cdf(Cohort::NewlyInfected, 0.0) == 1.0);
    CHECK(m.mean_curve(Cohort::NewlyInfected, 0.5) == 0.0);
}

TEST_CASE("independent cohorts draw from independent families") {
    CurveSpec ed;
    ed.family = CurveFamily::ExpDecay;
    ed.decay = 1.0;
    const InfectivityModel m(2.0, CurveSpec{}, DurationSpec{DurationLaw::Fixed, 1.0, 1, 1, 2},
                             ed, DurationSpec{DurationLaw::Fixed, 3.0, 1, 1, 2});
    RngStream rng(9);
    const SampledCurve newly = m.sample_curve(Cohort::NewlyInfected, rng);
    const SampledCurve initial = m.sample_curve(Cohort::InitiallyInfected, rng);
    CHECK(newly.eta == 1.0);
    CHECK(initial.eta == 3.0);
    CHECK(newly.level.size() == 1);
    CHECK(initial.level.size() == kExpDecayLevels);
    CHECK(m.duration_cdf(Cohort::InitiallyInfected, 2.0) == 0.0);
    CHECK(m.duration_cdf(Cohort::NewlyInfected, 2.0) == 1.0);
}
