#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "sirlab/density.hpp"
#include "sirlab/geometry.hpp"

namespace sirlab {

/// Uniform midpoint-rule grid over [-L, L]^d ∩ D. Nodes are cell centers at
/// -L + (i + 1/2) h; each carries weight h^d. Truncations D ∩ B(0, M) are
/// expressed as index masks over the same node set, so every integral in the
/// toolkit shares one quadrature.
class QuadratureGrid {
public:
    static QuadratureGrid build(const DomainSpec& domain, const BaselineDensity& density,
                                double halfwidth, double spacing);

    int dim() const { return dim_; }
    double spacing() const { return h_; }
    double halfwidth() const { return L_; }
    double cell_weight() const { return weight_; }
    std::size_t size() const { return nodes_.size(); }

    const std::vector<Point>& nodes() const { return nodes_; }
    const Point& node(std::size_t i) const { return nodes_[i]; }
    double mu(std::size_t i) const { return mu_[i]; }
    double node_norm(std::size_t i) const { return norm_[i]; }

    /// Indices of nodes with |x| <= M (all nodes when M is absent).
    std::vector<std::size_t> truncation_mask(std::optional<double> M) const;

    /// Indices of nodes within distance `radius` of y (box prefilter + exact test).
    void neighbors_within(const Point& y, double radius, std::vector<std::size_t>& out) const;

    /// Midpoint integral of f against mu over the masked nodes.
    double integrate_mu(const std::function<double(const Point&)>& f,
                        std::optional<double> M = std::nullopt) const;

    /// Midpoint integral of f dx over the masked nodes.
    double integrate(const std::function<double(const Point&)>& f,
                     std::optional<double> M = std::nullopt) const;

private:
    int dim_{1};
    double h_{0.1};
    double L_{1.0};
    double weight_{0.1};
    int n_axis_{10};
    std::vector<Point> nodes_;
    std::vector<double> mu_;
    std::vector<double> norm_;
    // dense axis-index layout for neighbor queries; -1 marks nodes outside D
    std::vector<std::int64_t> dense_to_node_;
    int axis_index(double x) const;
};

}  // namespace sirlab
