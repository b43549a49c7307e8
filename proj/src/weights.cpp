#include "sirlab/weights.hpp"

#include <cmath>
#include <limits>

namespace sirlab {

void require_valid_gamma(double gamma) {
    if (!(gamma >= 0.0 && gamma < 1.0))
        throw ParameterError("gamma must lie in [0,1)");
}

double normalizer(const KernelSpec& kernel, const QuadratureGrid& grid, const Point& y,
                  std::optional<double> truncation) {
    std::vector<std::size_t> nbr;
    grid.neighbors_within(y, kernel.Rbar, nbr);
    double acc = 0.0;
    for (std::size_t j : nbr) {
        if (truncation && grid.node_norm(j) > *truncation) continue;
        const double k = kernel.eval_at_distance(distance(grid.node(j), y));
        acc += k * grid.mu(j);
    }
    acc *= grid.cell_weight();
    if (acc < kNormalizerFloor) {
        throw SingularNormalizerError(
            "normalizer fell below floor " + std::to_string(kNormalizerFloor) +
            " at |y| = " + std::to_string(y.norm()) +
            "; quadrature grid too coarse or density misconfigured");
    }
    return acc;
}

double lambda_weight(const KernelSpec& kernel, const BaselineDensity& density,
                     const QuadratureGrid& grid, double gamma, const Point& x, const Point& y,
                     std::optional<double> truncation) {
    require_valid_gamma(gamma);
    const double k = kernel_eval(kernel, x, y);
    if (k == 0.0) return 0.0;
    const double muy = density.mu(y);
    if (muy == 0.0) return 0.0;
    if (gamma == 0.0) return k * muy;
    return k * muy / std::pow(normalizer(kernel, grid, y, truncation), gamma);
}

double omega_weight(const KernelSpec& kernel, const BaselineDensity& density,
                    const QuadratureGrid& grid, double gamma, const Point& x, const Point& y,
                    std::optional<double> truncation) {
    require_valid_gamma(gamma);
    const double k = kernel_eval(kernel, x, y);
    if (k == 0.0) return 0.0;
    const double mux = density.mu(x);
    if (mux == 0.0) return 0.0;
    if (gamma == 0.0) return k * mux;
    return k * mux / std::pow(normalizer(kernel, grid, y, truncation), gamma);
}

WeightMatrix WeightMatrix::build(const KernelSpec& kernel, const QuadratureGrid& grid,
                                 double gamma, std::optional<double> truncation) {
    require_valid_gamma(gamma);
    WeightMatrix w;
    w.gamma_ = gamma;
    w.truncation_ = truncation ? *truncation : std::numeric_limits<double>::quiet_NaN();

    const std::size_t n = grid.size();
    // Per-node normalizer over D (or D ∩ B(0,M)); columns are restricted to
    // carriers of mu-mass, and to the ball when truncated, matching the
    // indicator on the contributing side of the truncated dynamics.
    w.nu_.assign(n, std::numeric_limits<double>::quiet_NaN());
    std::vector<double> nu_pow(n, 0.0);
    std::vector<bool> active_col(n, false);
    std::vector<std::size_t> nbr;
    for (std::size_t j = 0; j < n; ++j) {
        if (grid.mu(j) == 0.0) continue;
        if (truncation && grid.node_norm(j) > *truncation) continue;
        const double nu = normalizer(kernel, grid, grid.node(j), truncation);
        w.nu_[j] = nu;
        nu_pow[j] = std::pow(nu, gamma);
        active_col[j] = true;
    }

    w.row_start_.assign(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) {
        grid.neighbors_within(grid.node(i), kernel.Rbar, nbr);
        const double mux = grid.mu(i);
        for (std::size_t j : nbr) {
            if (!active_col[j]) continue;
            const double k = kernel.eval_at_distance(distance(grid.node(i), grid.node(j)));
            if (k == 0.0) continue;
            w.col_.push_back(static_cast<std::uint32_t>(j));
            w.value_.push_back(k * grid.mu(j) / nu_pow[j] * grid.cell_weight());
            w.omega_.push_back(k * mux / nu_pow[j] * grid.cell_weight());
        }
        w.row_start_[i + 1] = w.col_.size();
    }
    return w;
}

WeightMatrix WeightMatrix::from_raw(double gamma, double truncation,
                                    std::vector<std::size_t> row_start,
                                    std::vector<std::uint32_t> col, std::vector<double> value,
                                    std::vector<double> omega, std::vector<double> nu) {
    WeightMatrix w;
    w.gamma_ = gamma;
    w.truncation_ = truncation;
    w.row_start_ = std::move(row_start);
    w.col_ = std::move(col);
    w.value_ = std::move(value);
    w.omega_ = std::move(omega);
    w.nu_ = std::move(nu);
    return w;
}

void WeightMatrix::apply(const std::vector<double>& field, std::vector<double>& out) const {
    const std::size_t n = rows();
    out.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t p = row_start_[i]; p < row_start_[i + 1]; ++p) {
            acc += value_[p] * field[col_[p]];
        }
        out[i] = acc;
    }
}

double WeightMatrix::max_row_sum() const {
    double best = 0.0;
    for (std::size_t i = 0; i + 1 < row_start_.size(); ++i) {
        double acc = 0.0;
        for (std::size_t p = row_start_[i]; p < row_start_[i + 1]; ++p) acc += value_[p];
        best = std::max(best, acc);
    }
    return best;
}

double WeightMatrix::max_omega_column_sum() const {
    std::vector<double> colsum;
    std::size_t n = rows();
    colsum.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t p = row_start_[i]; p < row_start_[i + 1]; ++p) {
            colsum[col_[p]] += omega_[p];
        }
    }
    double best = 0.0;
    for (double v : colsum) best = std::max(best, v);
    return best;
}

double epsilon_linear(double gamma) {
    if (gamma == 0.0) return 1.0;
    return (1.0 / gamma - 1.0) / 2.0;
}

double epsilon_quadratic(double gamma) {
    if (gamma == 0.0) return 1.0;
    return (1.0 / std::sqrt(gamma) - 1.0) / 2.0;
}

double power_split_constant(double eps, double delta) {
    if (delta <= 1.0) return 1.0;
    const double theta = std::pow(1.0 + eps, 1.0 / delta) - 1.0;
    return std::pow(1.0 + 1.0 / theta, delta);
}

OperatorBounds operator_bound_constants(const KernelSpec& kernel, const BaselineDensity& density,
                                        const DomainSpec& domain, double gamma) {
    require_valid_gamma(gamma);
    const double a = density.envelope_a;
    const double delta = density.envelope_delta;
    const double c0 = density.envelope_c0;
    const double C0 = density.envelope_C0;
    const double m = domain.cone_ball_volume();
    const double vol_support = ball_volume(domain.dim, kernel.Rbar);
    const double denom = std::pow(kernel.cmin * c0 * m, gamma);

    // nu(y) >= cmin*c0*m*exp(-a*gamma*((1+eps)|y|^delta + C_eps r^delta)) along
    // the proof chain; the |y| part cancels against the envelope of mu as long
    // as gamma*(1+eps) <= 1 (linear case) or gamma*(1+eps)^2 <= 1 (dual case).
    const double eps1 = delta <= 1.0 ? 0.0 : epsilon_linear(gamma);
    const double ce1 = power_split_constant(eps1 == 0.0 ? 1.0 : eps1, delta);
    const double lambda_bound =
        kernel.C * C0 * std::exp(a * gamma * ce1 * std::pow(kernel.r, delta)) * vol_support / denom;

    const double eps2 = delta <= 1.0 ? 0.0 : epsilon_quadratic(gamma);
    const double ce2 = power_split_constant(eps2 == 0.0 ? 1.0 : eps2, delta);
    const double omega_bound = kernel.C * C0 *
                               std::exp(a * gamma * ce2 * std::pow(kernel.r, delta)) *
                               std::exp(a * gamma * (1.0 + eps2) * ce2 * std::pow(kernel.Rbar, delta)) *
                               vol_support / denom;
    return {lambda_bound, omega_bound};
}

}  // namespace sirlab
