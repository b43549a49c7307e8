#pragma once

#include <optional>
#include <vector>

#include "sirlab/common.hpp"
#include "sirlab/rng.hpp"

namespace sirlab {

enum class CurveFamily { ConstantUntilEta, PiecewiseLevels, ExpDecay };
enum class DurationLaw { Fixed, Exponential, UniformInterval };

struct DurationSpec {
    DurationLaw law{DurationLaw::Fixed};
    double eta0{1.0};   // Fixed
    double rho{1.0};    // Exponential rate
    double lo{1.0};     // UniformInterval
    double hi{2.0};

    double cdf(double t) const;
    double sample(RngStream& rng) const;
    /// Characteristic time scale used for step-size validation.
    double time_scale() const;
    /// Essential sup of the law (+inf for exponential).
    double ess_sup() const;
    void validate() const;
};

struct CurveSpec {
    CurveFamily family{CurveFamily::ConstantUntilEta};
    int levels{1};           // PiecewiseLevels: number of segments
    double level_ratio{0.5}; // PiecewiseLevels: geometric step between segments
    double decay{1.0};       // ExpDecay rate
    void validate() const;
};

/// Piecewise-constant infectivity curve: level[k] on [t[k], t[k+1]) with
/// t[0] = 0 and t.back() = eta; zero outside [0, eta).
struct SampledCurve {
    std::vector<double> breaks;  // size = levels + 1, breaks.front() == 0, breaks.back() == eta
    std::vector<double> level;   // size = levels, all strictly positive
    double eta{0.0};

    double eval(double age) const;
};

/// Random infectivity curves for the two cohorts plus the deterministic
/// summaries the limit system consumes: mean curves and duration CDFs.
class InfectivityModel {
public:
    InfectivityModel(double lambda_star, CurveSpec newly, DurationSpec newly_duration,
                     CurveSpec initial, DurationSpec initial_duration);

    double lambda_star() const { return lambda_star_; }

    enum class Cohort { InitiallyInfected, NewlyInfected };

    SampledCurve sample_curve(Cohort cohort, RngStream& rng) const;

    /// Mean infectivity at age t: analytic where the family/duration pair has
    /// a closed form, otherwise a frozen Monte Carlo table (1e5 samples).
    double mean_curve(Cohort cohort, double t) const;

    bool mean_is_analytic(Cohort cohort) const;

    /// Standard-error bound of the Monte Carlo fallback (0 when analytic).
    double mean_stderr(Cohort cohort) const;

    /// Duration CDF F (newly) or F0 (initially).
    double duration_cdf(Cohort cohort, double t) const;

    /// Complement F^c = 1 - F (evaluated so that survival + cdf == 1 exactly).
    double duration_survival(Cohort cohort, double t) const { return 1.0 - duration_cdf(cohort, t); }

    const DurationSpec& duration(Cohort cohort) const {
        return cohort == Cohort::NewlyInfected ? dur_newly_ : dur_initial_;
    }
    const CurveSpec& curve_spec(Cohort cohort) const {
        return cohort == Cohort::NewlyInfected ? newly_ : initial_;
    }

    /// Smallest duration scale across cohorts (for dt validation).
    double min_duration_scale() const;

private:
    struct McSamples {
        std::vector<double> eta;  // sampled durations; levels are deterministic given eta
    };

    double lambda_star_;
    CurveSpec newly_;
    CurveSpec initial_;
    DurationSpec dur_newly_;
    DurationSpec dur_initial_;
    std::optional<McSamples> mc_newly_;
    std::optional<McSamples> mc_initial_;

    SampledCurve build_curve(const CurveSpec& spec, double eta) const;
    bool analytic(const CurveSpec& spec, const DurationSpec& dur) const;
    McSamples draw_mc(Cohort cohort) const;
    double mc_mean(const CurveSpec& spec, const McSamples& mc, double t) const;
};

inline constexpr int kExpDecayLevels = 64;
inline constexpr std::size_t kMeanCurveMcSamples = 100000;

}  // namespace sirlab
