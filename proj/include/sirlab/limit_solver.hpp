#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sirlab/density.hpp"
#include "sirlab/infectivity.hpp"
#include "sirlab/weights.hpp"

namespace sirlab {

enum class TimeScheme { Euler, Trapezoid };

struct SolveOptions {
    double t_end{1.0};
    double dt{1e-3};
    double spacing{0.1};              // grid spacing h
    double halfwidth{1.0};            // outer quadrature box [-L, L]^d
    std::optional<double> truncation; // solve the D_n system when set
    TimeScheme scheme{TimeScheme::Euler};
    int store_every{1};               // keep every k-th time slice
};

/// Gridded solution of the limit densities S, F(orce), I, R with the shared
/// quadrature that produced it. Field slices are indexed [stored time][node].
struct LimitFields {
    std::shared_ptr<const QuadratureGrid> grid;
    std::shared_ptr<const WeightMatrix> weights;
    std::optional<double> truncation;
    double dt{0.0};
    std::vector<double> times;  // stored slice times
    std::vector<std::vector<double>> S, F, I, R;
    double max_conservation_drift{0.0};

    std::size_t slice_at(double t) const;  // nearest stored slice
    /// Pairing (field(t,.) mu, phi) by the grid quadrature.
    double pair(MeasureKind kind, std::size_t slice,
                const std::function<double(const Point&)>& phi) const;
    /// Spatial integral of the field against mu (phi == 1).
    double mass(MeasureKind kind, std::size_t slice) const;
    const std::vector<double>& field(MeasureKind kind, std::size_t slice) const;
    /// Force of infection Gamma(t_slice, .) recomputed from F via the weights.
    std::vector<double> gamma_field(std::size_t slice) const;
};

/// Time-stepped solution of the Volterra system on D ∩ B(0, M). Left-endpoint
/// rule by default; the trapezoid variant (predictor-corrector) exists for
/// the uniqueness/stability proxy. Aborts on negative S, never clamps.
LimitFields solve_limit(const DomainSpec& domain, const KernelSpec& kernel,
                        const BaselineDensity& density, const InfectivityModel& infectivity,
                        double gamma, const SolveOptions& options);

/// Truncation discrepancy of the weight kernels:
/// Pi_n = || ∫ (Lambda - Lambda_n)(., y) 1{|y| <= M_n} dy ||_{L1(mu)}.
/// The outer quadrature box must cover B(0, M_n + Rbar).
double pi_n(const DomainSpec& domain, const KernelSpec& kernel, const BaselineDensity& density,
            double gamma, double M_n, double outer_halfwidth, double spacing);

struct AprioriReport {
    bool ok{true};
    double sup_S_margin{0.0};      // min over t of bound - ||S(t)||_inf
    double sup_F_margin{0.0};      // min over t of bound(t) - ||F(t)||_inf
    double operator_sup{0.0};      // numeric sup_x ∫ Lambda(x,y) dy
};

/// A-priori estimates: ||S(t)|| <= ||S(0)|| and the Gronwall envelope on the
/// force field; returns margins and throws SolverDefectError on violation.
AprioriReport apriori_check(const LimitFields& fields, double lambda_star);

/// Columnar export: `t,x...,S,F,I,R` per stored node/time.
void write_fields_csv(const LimitFields& fields, const std::string& path);

/// Binary sidecar for the weight matrix, keyed by a configuration hash.
void save_weight_cache(const WeightMatrix& w, std::uint64_t config_hash, const std::string& path);
std::optional<WeightMatrix> load_weight_cache(std::uint64_t config_hash, const std::string& path);

}  // namespace sirlab
