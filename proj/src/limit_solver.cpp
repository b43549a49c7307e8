#include "sirlab/limit_solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>

namespace sirlab {

namespace {

using Cohort = InfectivityModel::Cohort;

struct KernelTables {
    std::vector<double> lam;   // mean infectivity of the newly infected at k*dt
    std::vector<double> lam0;  // mean infectivity of the initially infected
    std::vector<double> Fcdf;  // F(k*dt)
    std::vector<double> F0cdf; // F0(k*dt)

    static KernelTables build(const InfectivityModel& inf, double dt, std::size_t steps) {
        KernelTables t;
        t.lam.resize(steps + 1);
        t.lam0.resize(steps + 1);
        t.Fcdf.resize(steps + 1);
        t.F0cdf.resize(steps + 1);
        for (std::size_t k = 0; k <= steps; ++k) {
            const double s = static_cast<double>(k) * dt;
            t.lam[k] = inf.mean_curve(Cohort::NewlyInfected, s);
            t.lam0[k] = inf.mean_curve(Cohort::InitiallyInfected, s);
            t.Fcdf[k] = inf.duration_cdf(Cohort::NewlyInfected, s);
            t.F0cdf[k] = inf.duration_cdf(Cohort::InitiallyInfected, s);
        }
        return t;
    }
};

}  // namespace

std::size_t LimitFields::slice_at(double t) const {
    std::size_t best = 0;
    double best_err = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < times.size(); ++k) {
        const double err = std::abs(times[k] - t);
        if (err < best_err) {
            best_err = err;
            best = k;
        }
    }
    return best;
}

const std::vector<double>& LimitFields::field(MeasureKind kind, std::size_t slice) const {
    switch (kind) {
        case MeasureKind::S: return S[slice];
        case MeasureKind::ForceOfInfection: return F[slice];
        case MeasureKind::I: return I[slice];
        case MeasureKind::R: return R[slice];
        case MeasureKind::Total: break;
    }
    throw UsageError("LimitFields::field: total mass has no stored field; use mass()");
}

double LimitFields::pair(MeasureKind kind, std::size_t slice,
                         const std::function<double(const Point&)>& phi) const {
    const double w = grid->cell_weight();
    double acc = 0.0;
    if (kind == MeasureKind::Total) {
        for (std::size_t i = 0; i < grid->size(); ++i) acc += phi(grid->node(i)) * grid->mu(i);
        return acc * w;
    }
    const std::vector<double>& f = field(kind, slice);
    for (std::size_t i = 0; i < grid->size(); ++i) {
        if (f[i] != 0.0) acc += phi(grid->node(i)) * f[i] * grid->mu(i);
    }
    return acc * w;
}

double LimitFields::mass(MeasureKind kind, std::size_t slice) const {
    return pair(kind, slice, [](const Point&) { return 1.0; });
}

std::vector<double> LimitFields::gamma_field(std::size_t slice) const {
    std::vector<double> out;
    weights->apply(F[slice], out);
    return out;
}

LimitFields solve_limit(const DomainSpec& domain, const KernelSpec& kernel,
                        const BaselineDensity& density, const InfectivityModel& infectivity,
                        double gamma, const SolveOptions& options) {
    require_valid_gamma(gamma);
    if (!(options.t_end > 0.0)) throw ParameterError("solve: t_end must be positive");
    if (!(options.dt > 0.0)) throw ParameterError("solve: dt must be positive");
    if (options.spacing > kernel.Rbar / 4.0)
        throw ParameterError("solve: grid must resolve the kernel, h <= Rbar/4");
    const double min_dur = infectivity.min_duration_scale();
    if (std::isfinite(min_dur) && options.dt > min_dur / 4.0)
        throw ParameterError("solve: dt must satisfy dt <= min-duration/4");
    if (options.truncation && *options.truncation > options.halfwidth + 1e-12)
        throw ParameterError("solve: quadrature box must cover the truncation radius");
    if (options.store_every < 1) throw ParameterError("solve: store_every must be >= 1");

    LimitFields out;
    out.truncation = options.truncation;
    out.dt = options.dt;
    auto grid = std::make_shared<QuadratureGrid>(
        QuadratureGrid::build(domain, density, options.halfwidth, options.spacing));
    auto weights = std::make_shared<WeightMatrix>(
        WeightMatrix::build(kernel, *grid, gamma, options.truncation));
    out.grid = grid;
    out.weights = weights;

    const std::size_t n = grid->size();
    const auto steps = static_cast<std::size_t>(std::llround(options.t_end / options.dt));
    const KernelTables tab = KernelTables::build(infectivity, options.dt, steps);
    const double dt = options.dt;

    // Initial shares, restricted to the truncated ball.
    std::vector<double> S0(n, 0.0), I0(n, 0.0), R0(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (options.truncation && grid->node_norm(i) > *options.truncation) continue;
        if (grid->mu(i) == 0.0) continue;
        const Point& x = grid->node(i);
        S0[i] = density.share(Compartment::S, x);
        I0[i] = density.share(Compartment::I, x);
        R0[i] = density.share(Compartment::R, x);
    }

    std::vector<std::vector<double>> B;  // flux history B(s,x) = S(s,x) * Gamma(s,x)
    B.reserve(steps);
    std::vector<double> S = S0;
    std::vector<double> F(n, 0.0), I = I0, R = R0;
    for (std::size_t i = 0; i < n; ++i) F[i] = tab.lam0[0] * I0[i];

    std::vector<double> cumB(n, 0.0);
    std::vector<double> gamma_now(n, 0.0), gamma_pred(n, 0.0), Fwork(n, 0.0);

    const auto store = [&](double t) {
        out.times.push_back(t);
        out.S.push_back(S);
        out.F.push_back(F);
        out.I.push_back(I);
        out.R.push_back(R);
    };
    store(0.0);

    // Convolution accumulators recomputed per step (the kernels depend on
    // t - s, so no running shortcut applies beyond the S-update).
    std::vector<double> convF(n, 0.0), convI(n, 0.0), convR(n, 0.0);

    for (std::size_t k = 0; k < steps; ++k) {
        weights->apply(F, gamma_now);
        std::vector<double> Bk(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) Bk[i] = S[i] * gamma_now[i];

        if (options.scheme == TimeScheme::Trapezoid) {
            // Predictor-corrector trapezoid: weights (1/2, 1, ..., 1, 1/2)
            // over the stored fluxes, with the t_{k+1} flux first extrapolated
            // as B_k and then corrected once. Keeps second order globally.
            B.push_back(std::move(Bk));
            const std::vector<double>& Blast = B.back();

            std::vector<double> convS(n, 0.0);
            std::fill(convF.begin(), convF.end(), 0.0);
            std::fill(convI.begin(), convI.end(), 0.0);
            std::fill(convR.begin(), convR.end(), 0.0);
            for (std::size_t m = 0; m <= k; ++m) {
                const std::size_t lag = k + 1 - m;
                const double half = m == 0 ? 0.5 : 1.0;
                const double wF = half * tab.lam[lag];
                const double wI = half * (1.0 - tab.Fcdf[lag]);
                const double wR = half * tab.Fcdf[lag];
                const std::vector<double>& Bm = B[m];
                for (std::size_t i = 0; i < n; ++i) {
                    convS[i] += half * Bm[i];
                    convF[i] += wF * Bm[i];
                    convI[i] += wI * Bm[i];
                    convR[i] += wR * Bm[i];
                }
            }
            for (std::size_t i = 0; i < n; ++i) {
                Fwork[i] = tab.lam0[k + 1] * I0[i] +
                           dt * (convF[i] + 0.5 * tab.lam[0] * Blast[i]);
            }
            weights->apply(Fwork, gamma_pred);
            std::vector<double> Bhat(n, 0.0);
            for (std::size_t i = 0; i < n; ++i) {
                const double Spred = S0[i] - dt * (convS[i] + 0.5 * Blast[i]);
                Bhat[i] = Spred * gamma_pred[i];
            }

            double drift = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                S[i] = S0[i] - dt * (convS[i] + 0.5 * Bhat[i]);
                F[i] = tab.lam0[k + 1] * I0[i] + dt * (convF[i] + 0.5 * tab.lam[0] * Bhat[i]);
                I[i] = I0[i] * (1.0 - tab.F0cdf[k + 1]) +
                       dt * (convI[i] + 0.5 * (1.0 - tab.Fcdf[0]) * Bhat[i]);
                R[i] = R0[i] + I0[i] * tab.F0cdf[k + 1] +
                       dt * (convR[i] + 0.5 * tab.Fcdf[0] * Bhat[i]);
                drift = std::max(drift, std::abs(S[i] + I[i] + R[i] - (S0[i] + I0[i] + R0[i])));
            }
            out.max_conservation_drift = std::max(out.max_conservation_drift, drift);
        } else {
            B.push_back(std::move(Bk));
            const std::vector<double>& Bnow = B.back();
            for (std::size_t i = 0; i < n; ++i) cumB[i] += Bnow[i];

            std::fill(convF.begin(), convF.end(), 0.0);
            std::fill(convI.begin(), convI.end(), 0.0);
            std::fill(convR.begin(), convR.end(), 0.0);
            for (std::size_t m = 0; m <= k; ++m) {
                const std::size_t lag = k + 1 - m;
                const double wF = tab.lam[lag];
                const double wI = 1.0 - tab.Fcdf[lag];
                const double wR = tab.Fcdf[lag];
                const std::vector<double>& Bm = B[m];
                for (std::size_t i = 0; i < n; ++i) {
                    const double b = Bm[i];
                    convF[i] += wF * b;
                    convI[i] += wI * b;
                    convR[i] += wR * b;
                }
            }
            double drift = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                S[i] = S0[i] - dt * cumB[i];
                F[i] = tab.lam0[k + 1] * I0[i] + dt * convF[i];
                I[i] = I0[i] * (1.0 - tab.F0cdf[k + 1]) + dt * convI[i];
                R[i] = R0[i] + I0[i] * tab.F0cdf[k + 1] + dt * convR[i];
                drift = std::max(drift, std::abs(S[i] + I[i] + R[i] - (S0[i] + I0[i] + R0[i])));
            }
            out.max_conservation_drift = std::max(out.max_conservation_drift, drift);
        }

        for (std::size_t i = 0; i < n; ++i) {
            if (S[i] < 0.0) {
                throw StabilityError(
                    "solve: negative susceptible density at t = " +
                        std::to_string(static_cast<double>(k + 1) * dt) +
                        "; reduce dt (suggested " + std::to_string(dt / 2.0) + ")",
                    dt / 2.0);
            }
        }
        const auto step_idx = k + 1;
        if (step_idx % static_cast<std::size_t>(options.store_every) == 0 || step_idx == steps) {
            store(static_cast<double>(step_idx) * dt);
        }
    }
    return out;
}

double pi_n(const DomainSpec& domain, const KernelSpec& kernel, const BaselineDensity& density,
            double gamma, double M_n, double outer_halfwidth, double spacing) {
    require_valid_gamma(gamma);
    if (outer_halfwidth + 1e-12 < M_n + kernel.Rbar)
        throw ParameterError("pi_n: outer quadrature box must cover B(0, M_n + Rbar)");
    const QuadratureGrid grid =
        QuadratureGrid::build(domain, density, outer_halfwidth, spacing);
    if (gamma == 0.0) return 0.0;

    const WeightMatrix full = WeightMatrix::build(kernel, grid, gamma);
    const WeightMatrix trunc = WeightMatrix::build(kernel, grid, gamma, M_n);

    // Row-wise inner integral over {|y| <= M_n}, then L1(mu) over x.
    const std::size_t n = grid.size();
    std::vector<double> inner(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t p = full.row_start()[i]; p < full.row_start()[i + 1]; ++p) {
            if (grid.node_norm(full.col()[p]) <= M_n) acc += full.value()[p];
        }
        for (std::size_t p = trunc.row_start()[i]; p < trunc.row_start()[i + 1]; ++p) {
            acc -= trunc.value()[p];
        }
        inner[i] = acc;
    }
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += std::abs(inner[i]) * grid.mu(i);
    return total * grid.cell_weight();
}

AprioriReport apriori_check(const LimitFields& fields, double lambda_star) {
    AprioriReport rep;
    rep.operator_sup = fields.weights->max_row_sum();
    double sup_S0 = 0.0, sup_I0 = 0.0;
    for (double v : fields.S[0]) sup_S0 = std::max(sup_S0, v);
    for (double v : fields.I[0]) sup_I0 = std::max(sup_I0, v);

    double margin_S = std::numeric_limits<double>::infinity();
    double margin_F = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < fields.times.size(); ++k) {
        double sup_S = 0.0, sup_F = 0.0;
        for (double v : fields.S[k]) sup_S = std::max(sup_S, v);
        for (double v : fields.F[k]) sup_F = std::max(sup_F, v);
        const double bound_F =
            lambda_star * sup_I0 * std::exp(lambda_star * rep.operator_sup * fields.times[k]);
        margin_S = std::min(margin_S, sup_S0 - sup_S);
        margin_F = std::min(margin_F, bound_F - sup_F);
        if (sup_S > sup_S0 * (1.0 + 1e-12) || sup_F > bound_F * (1.0 + 1e-12)) {
            rep.ok = false;
        }
    }
    rep.sup_S_margin = margin_S;
    rep.sup_F_margin = margin_F;
    if (!rep.ok) throw SolverDefectError("apriori_check: a-priori bound violated by the solution");
    return rep;
}

void write_fields_csv(const LimitFields& fields, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw IoError("cannot open " + path + " for writing");
    std::fprintf(f, "t");
    for (int k = 0; k < fields.grid->dim(); ++k) std::fprintf(f, ",x%d", k + 1);
    std::fprintf(f, ",S,F,I,R\n");
    for (std::size_t s = 0; s < fields.times.size(); ++s) {
        for (std::size_t i = 0; i < fields.grid->size(); ++i) {
            std::fprintf(f, "%.17g", fields.times[s]);
            const Point& x = fields.grid->node(i);
            for (int k = 0; k < fields.grid->dim(); ++k) std::fprintf(f, ",%.17g", x[k]);
            std::fprintf(f, ",%.17g,%.17g,%.17g,%.17g\n", fields.S[s][i], fields.F[s][i],
                         fields.I[s][i], fields.R[s][i]);
        }
    }
    std::fclose(f);
}

namespace {
constexpr std::uint64_t kCacheMagic = 0x534952574D415432ull;  // "SIRWMAT2"

template <typename T>
void write_vec(std::FILE* f, const std::vector<T>& v) {
    const std::uint64_t n = v.size();
    std::fwrite(&n, sizeof(n), 1, f);
    if (n) std::fwrite(v.data(), sizeof(T), v.size(), f);
}

template <typename T>
bool read_vec(std::FILE* f, std::vector<T>& v) {
    std::uint64_t n = 0;
    if (std::fread(&n, sizeof(n), 1, f) != 1) return false;
    v.resize(n);
    if (n && std::fread(v.data(), sizeof(T), v.size(), f) != v.size()) return false;
    return true;
}
}  // namespace

void save_weight_cache(const WeightMatrix& w, std::uint64_t config_hash, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw IoError("cannot open " + path + " for writing");
    std::fwrite(&kCacheMagic, sizeof(kCacheMagic), 1, f);
    std::fwrite(&config_hash, sizeof(config_hash), 1, f);
    const double gamma = w.gamma();
    const double trunc = w.truncation_or_nan();
    std::fwrite(&gamma, sizeof(gamma), 1, f);
    std::fwrite(&trunc, sizeof(trunc), 1, f);
    write_vec(f, w.row_start());
    write_vec(f, w.col());
    write_vec(f, w.value());
    write_vec(f, w.omega_value());
    write_vec(f, w.normalizers());
    std::fclose(f);
}

std::optional<WeightMatrix> load_weight_cache(std::uint64_t config_hash, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "rb");
    if (!f) return std::nullopt;
    std::uint64_t magic = 0, hash = 0;
    double gamma = 0.0, trunc = 0.0;
    std::vector<std::size_t> row_start;
    std::vector<std::uint32_t> col;
    std::vector<double> value, omega, nu;
    bool ok = std::fread(&magic, sizeof(magic), 1, f) == 1 && magic == kCacheMagic &&
              std::fread(&hash, sizeof(hash), 1, f) == 1 && hash == config_hash &&
              std::fread(&gamma, sizeof(gamma), 1, f) == 1 &&
              std::fread(&trunc, sizeof(trunc), 1, f) == 1 && read_vec(f, row_start) &&
              read_vec(f, col) && read_vec(f, value) && read_vec(f, omega) && read_vec(f, nu);
    std::fclose(f);
    if (!ok) return std::nullopt;
    return WeightMatrix::from_raw(gamma, trunc, std::move(row_start), std::move(col),
                                  std::move(value), std::move(omega), std::move(nu));
}

}  // namespace sirlab
