#include "sirlab/infectivity.hpp"

#include <algorithm>
#include <cmath>

namespace sirlab {

double DurationSpec::cdf(double t) const {
    if (t < 0.0) return 0.0;
    switch (law) {
        case DurationLaw::Fixed: return t >= eta0 ? 1.0 : 0.0;
        case DurationLaw::Exponential: return 1.0 - std::exp(-rho * t);
        case DurationLaw::UniformInterval:
            if (t < lo) return 0.0;
            if (t >= hi) return 1.0;
            return (t - lo) / (hi - lo);
    }
    return 0.0;
}

double DurationSpec::sample(RngStream& rng) const {
    switch (law) {
        case DurationLaw::Fixed: return eta0;
        case DurationLaw::Exponential: return rng.exponential(rho);
        case DurationLaw::UniformInterval: return rng.uniform(lo, hi);
    }
    return 0.0;
}

double DurationSpec::time_scale() const {
    switch (law) {
        case DurationLaw::Fixed: return eta0;
        case DurationLaw::Exponential: return 1.0 / rho;
        case DurationLaw::UniformInterval: return lo;
    }
    return 0.0;
}

double DurationSpec::ess_sup() const {
    switch (law) {
        case DurationLaw::Fixed: return eta0;
        case DurationLaw::Exponential: return std::numeric_limits<double>::infinity();
        case DurationLaw::UniformInterval: return hi;
    }
    return 0.0;
}

void DurationSpec::validate() const {
    switch (law) {
        case DurationLaw::Fixed:
            if (!(eta0 > 0.0)) throw ConfigError("fixed duration eta0 must be positive");
            break;
        case DurationLaw::Exponential:
            if (!(rho > 0.0)) throw ConfigError("exponential duration rate rho must be positive");
            break;
        case DurationLaw::UniformInterval:
            if (!(lo > 0.0) || !(hi > lo))
                throw ConfigError("uniform duration requires 0 < lo < hi");
            break;
    }
}

void CurveSpec::validate() const {
    switch (family) {
        case CurveFamily::ConstantUntilEta: break;
        case CurveFamily::PiecewiseLevels:
            if (levels < 1) throw ConfigError("piecewise curve family requires levels >= 1");
            if (!(level_ratio > 0.0 && level_ratio <= 1.0))
                throw ConfigError("piecewise curve family requires level_ratio in (0,1]");
            break;
        case CurveFamily::ExpDecay:
            if (!(decay > 0.0)) throw ConfigError("exp-decay curve family requires decay > 0");
            break;
    }
}

double SampledCurve::eval(double age) const {
    if (age < 0.0 || age >= eta || level.empty()) return 0.0;
    // few segments: linear scan beats binary search
    std::size_t k = 0;
    if (breaks.size() > 8) {
        k = static_cast<std::size_t>(
                std::upper_bound(breaks.begin(), breaks.end(), age) - breaks.begin()) - 1;
    } else {
        while (k + 1 < level.size() && age >= breaks[k + 1]) ++k;
    }
    return level[k];
}

InfectivityModel::InfectivityModel(double lambda_star, CurveSpec newly, DurationSpec newly_duration,
                                   CurveSpec initial, DurationSpec initial_duration)
    : lambda_star_(lambda_star),
      newly_(newly),
      initial_(initial),
      dur_newly_(newly_duration),
      dur_initial_(initial_duration) {
    if (lambda_star_ < 0.0) throw ConfigError("lambda_star must be nonnegative");
    newly_.validate();
    initial_.validate();
    if (lambda_star_ > 0.0) {
        dur_newly_.validate();
        dur_initial_.validate();
    } else {
        // zero cap forces empty curves; durations collapse to a point mass at 0
        // so that eta = sup{t : lambda(t) > 0} stays consistent with F.
        dur_newly_ = DurationSpec{DurationLaw::Fixed, 0.0, 1.0, 0.0, 0.0};
        dur_initial_ = dur_newly_;
    }
    if (!analytic(newly_, dur_newly_)) mc_newly_ = draw_mc(Cohort::NewlyInfected);
    if (!analytic(initial_, dur_initial_)) mc_initial_ = draw_mc(Cohort::InitiallyInfected);
}

SampledCurve InfectivityModel::build_curve(const CurveSpec& spec, double eta) const {
    SampledCurve c;
    c.eta = eta;
    if (lambda_star_ == 0.0 || eta <= 0.0) {
        c.eta = 0.0;
        return c;
    }
    switch (spec.family) {
        case CurveFamily::ConstantUntilEta:
            c.breaks = {0.0, eta};
            c.level = {lambda_star_};
            break;
        case CurveFamily::PiecewiseLevels: {
            // geometric level profile; J = 1 (or ratio 1) reduces to the
            // constant family
            const int J = spec.levels;
            c.breaks.resize(static_cast<std::size_t>(J) + 1);
            c.level.resize(static_cast<std::size_t>(J));
            for (int k = 0; k <= J; ++k) c.breaks[static_cast<std::size_t>(k)] = eta * k / J;
            double lv = lambda_star_;
            for (int k = 0; k < J; ++k) {
                c.level[static_cast<std::size_t>(k)] = lv;
                lv *= spec.level_ratio;
            }
            break;
        }
        case CurveFamily::ExpDecay: {
            const int J = kExpDecayLevels;
            c.breaks.resize(static_cast<std::size_t>(J) + 1);
            c.level.resize(static_cast<std::size_t>(J));
            for (int k = 0; k <= J; ++k) c.breaks[static_cast<std::size_t>(k)] = eta * k / J;
            for (int k = 0; k < J; ++k)
                c.level[static_cast<std::size_t>(k)] =
                    lambda_star_ * std::exp(-spec.decay * c.breaks[static_cast<std::size_t>(k)]);
            break;
        }
    }
    return c;
}

SampledCurve InfectivityModel::sample_curve(Cohort cohort, RngStream& rng) const {
    const CurveSpec& spec = curve_spec(cohort);
    const DurationSpec& dur = duration(cohort);
    const double eta = lambda_star_ == 0.0 ? 0.0 : dur.sample(rng);
    return build_curve(spec, eta);
}

bool InfectivityModel::analytic(const CurveSpec& spec, const DurationSpec& dur) const {
    switch (spec.family) {
        case CurveFamily::ConstantUntilEta: return true;
        case CurveFamily::PiecewiseLevels:
            return spec.levels == 1 || spec.level_ratio == 1.0 || dur.law == DurationLaw::Fixed;
        case CurveFamily::ExpDecay: return dur.law == DurationLaw::Fixed;
    }
    return false;
}

InfectivityModel::McSamples InfectivityModel::draw_mc(Cohort cohort) const {
    // Frozen sub-seed: the mean-curve table is a deterministic model summary,
    // identical across master seeds for a given configuration.
    RngStream rng = RngStream::from(0x5eedf00d, cohort == Cohort::NewlyInfected
                                                    ? "mean-curve-mc-newly"
                                                    : "mean-curve-mc-initial");
    const DurationSpec& dur = duration(cohort);
    McSamples mc;
    mc.eta.resize(kMeanCurveMcSamples);
    for (std::size_t s = 0; s < kMeanCurveMcSamples; ++s) mc.eta[s] = dur.sample(rng);
    return mc;
}

double InfectivityModel::mc_mean(const CurveSpec& spec, const McSamples& mc, double t) const {
    double acc = 0.0;
    for (std::size_t s = 0; s < mc.eta.size(); ++s) {
        const double eta = mc.eta[s];
        if (t >= eta) continue;
        switch (spec.family) {
            case CurveFamily::ConstantUntilEta: acc += lambda_star_; break;
            case CurveFamily::PiecewiseLevels: {
                const auto seg = std::min<std::size_t>(
                    static_cast<std::size_t>(t / eta * spec.levels),
                    static_cast<std::size_t>(spec.levels) - 1);
                acc += lambda_star_ * std::pow(spec.level_ratio, static_cast<double>(seg));
                break;
            }
            case CurveFamily::ExpDecay: {
                const auto seg = std::min<std::size_t>(
                    static_cast<std::size_t>(t / eta * kExpDecayLevels), kExpDecayLevels - 1);
                acc += lambda_star_ * std::exp(-spec.decay * eta * static_cast<double>(seg) /
                                               kExpDecayLevels);
                break;
            }
        }
    }
    return acc / static_cast<double>(mc.eta.size());
}

double InfectivityModel::mean_curve(Cohort cohort, double t) const {
    if (t < 0.0 || lambda_star_ == 0.0) return 0.0;
    const CurveSpec& spec = curve_spec(cohort);
    const DurationSpec& dur = duration(cohort);
    const double survival = 1.0 - duration_cdf(cohort, t);
    switch (spec.family) {
        case CurveFamily::ConstantUntilEta:
            return lambda_star_ * survival;
        case CurveFamily::PiecewiseLevels:
            if (spec.levels == 1 || spec.level_ratio == 1.0) return lambda_star_ * survival;
            if (dur.law == DurationLaw::Fixed) {
                if (t >= dur.eta0) return 0.0;
                const auto seg = std::min<std::size_t>(
                    static_cast<std::size_t>(t / dur.eta0 * spec.levels),
                    static_cast<std::size_t>(spec.levels) - 1);
                return lambda_star_ * std::pow(spec.level_ratio, static_cast<double>(seg));
            }
            return mc_mean(spec, cohort == Cohort::NewlyInfected ? *mc_newly_ : *mc_initial_, t);
        case CurveFamily::ExpDecay:
            if (dur.law == DurationLaw::Fixed) {
                if (t >= dur.eta0) return 0.0;
                const auto seg = std::min<std::size_t>(
                    static_cast<std::size_t>(t / dur.eta0 * kExpDecayLevels), kExpDecayLevels - 1);
                return lambda_star_ *
                       std::exp(-spec.decay * dur.eta0 * static_cast<double>(seg) / kExpDecayLevels);
            }
            return mc_mean(spec, cohort == Cohort::NewlyInfected ? *mc_newly_ : *mc_initial_, t);
    }
    return 0.0;
}

bool InfectivityModel::mean_is_analytic(Cohort cohort) const {
    return analytic(curve_spec(cohort), duration(cohort));
}

double InfectivityModel::mean_stderr(Cohort cohort) const {
    if (mean_is_analytic(cohort)) return 0.0;
    // sd of a [0, lambda_star]-valued variable is at most lambda_star/2
    return 0.5 * lambda_star_ / std::sqrt(static_cast<double>(kMeanCurveMcSamples));
}

double InfectivityModel::duration_cdf(Cohort cohort, double t) const {
    if (lambda_star_ == 0.0) return t >= 0.0 ? 1.0 : 0.0;
    return duration(cohort).cdf(t);
}

double InfectivityModel::min_duration_scale() const {
    if (lambda_star_ == 0.0) return std::numeric_limits<double>::infinity();
    return std::min(dur_newly_.time_scale(), dur_initial_.time_scale());
}

}  // namespace sirlab
