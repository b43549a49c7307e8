#pragma once

#include <limits>
#include <memory>
#include <optional>
#include <vector>

#include "sirlab/kernel.hpp"
#include "sirlab/quadrature.hpp"

namespace sirlab {

inline constexpr double kNormalizerFloor = 1e-12;

/// nu(y) = ∫ K(z,y) mu(z) dz over D (or D ∩ B(0,M)), midpoint rule on `grid`.
/// Throws SingularNormalizerError below the configured floor.
double normalizer(const KernelSpec& kernel, const QuadratureGrid& grid, const Point& y,
                  std::optional<double> truncation = std::nullopt);

/// Interaction weight Lambda(x,y) = K(x,y) mu(y) / nu(y)^gamma (truncated
/// variant uses nu over D ∩ B(0,M)).
double lambda_weight(const KernelSpec& kernel, const BaselineDensity& density,
                     const QuadratureGrid& grid, double gamma, const Point& x, const Point& y,
                     std::optional<double> truncation = std::nullopt);

/// Omega(x,y) = K(x,y) mu(x) / nu(y)^gamma.
double omega_weight(const KernelSpec& kernel, const BaselineDensity& density,
                    const QuadratureGrid& grid, double gamma, const Point& x, const Point& y,
                    std::optional<double> truncation = std::nullopt);

void require_valid_gamma(double gamma);

/// Sparse quadrature matrix W[i][j] = Lambda_M(x_i, y_j) * h^d over the grid
/// nodes carrying mu-mass, restricted to the kernel support. Rows and columns
/// both index into the grid's node list. Built once, then immutable.
class WeightMatrix {
public:
    static WeightMatrix build(const KernelSpec& kernel, const QuadratureGrid& grid, double gamma,
                              std::optional<double> truncation = std::nullopt);

    static WeightMatrix from_raw(double gamma, double truncation,
                                 std::vector<std::size_t> row_start, std::vector<std::uint32_t> col,
                                 std::vector<double> value, std::vector<double> omega,
                                 std::vector<double> nu);

    /// out[i] = sum_j W[i][j] * field[j]  (field indexed by grid node).
    void apply(const std::vector<double>& field, std::vector<double>& out) const;

    /// sup_x ∫ Lambda(x,y) dy over grid rows.
    double max_row_sum() const;

    /// sup_y ∫ Omega(x,y) dx: column sums of K(x,y) mu(x) h^d / nu(y)^gamma.
    double max_omega_column_sum() const;

    const std::vector<double>& normalizers() const { return nu_; }
    std::size_t rows() const { return row_start_.size() - 1; }
    double truncation_or_nan() const { return truncation_; }
    double gamma() const { return gamma_; }

    // Raw CSR access (used by the binary cache and by tests).
    const std::vector<std::size_t>& row_start() const { return row_start_; }
    const std::vector<std::uint32_t>& col() const { return col_; }
    const std::vector<double>& value() const { return value_; }
    const std::vector<double>& omega_value() const { return omega_; }

private:
    double gamma_{0.0};
    double truncation_{std::numeric_limits<double>::quiet_NaN()};
    std::vector<std::size_t> row_start_;
    std::vector<std::uint32_t> col_;
    std::vector<double> value_;   // Lambda * h^d
    std::vector<double> omega_;   // Omega * h^d, same sparsity
    std::vector<double> nu_;      // per-node normalizer (NaN where mu = 0)
};

/// epsilon for constructions requiring gamma*(1+eps) < 1 (midpoint of the
/// admissible interval; 1 when gamma = 0).
double epsilon_linear(double gamma);

/// epsilon for constructions requiring gamma*(1+eps)^2 < 1.
double epsilon_quadratic(double gamma);

/// C_{eps,delta} = (1 + 1/theta)^delta with theta = (1+eps)^{1/delta} - 1;
/// equals 1 for delta <= 1 where subadditivity applies directly.
double power_split_constant(double eps, double delta);

struct OperatorBounds {
    double lambda_bound;  // explicit constant dominating sup_x ∫ Lambda(x,y) dy
    double omega_bound;   // explicit constant dominating sup_y ∫ Omega(x,y) dx
};

/// Constants reconstructed from the proof chain of the operator bounds, in
/// terms of (C, cmin, c0, C0, a, delta, gamma, Rbar, r, m).
OperatorBounds operator_bound_constants(const KernelSpec& kernel, const BaselineDensity& density,
                                        const DomainSpec& domain, double gamma);

}  // namespace sirlab
