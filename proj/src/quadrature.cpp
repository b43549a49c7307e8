#include "sirlab/quadrature.hpp"

#include <cmath>

namespace sirlab {

QuadratureGrid QuadratureGrid::build(const DomainSpec& domain, const BaselineDensity& density,
                                     double halfwidth, double spacing) {
    if (!(halfwidth > 0.0)) throw ParameterError("quadrature halfwidth must be positive");
    if (!(spacing > 0.0) || spacing > 2.0 * halfwidth)
        throw ParameterError("quadrature spacing must lie in (0, 2*halfwidth]");

    QuadratureGrid g;
    g.dim_ = domain.dim;
    g.n_axis_ = static_cast<int>(std::lround(2.0 * halfwidth / spacing));
    if (g.n_axis_ < 1) g.n_axis_ = 1;
    g.h_ = 2.0 * halfwidth / g.n_axis_;
    g.L_ = halfwidth;
    g.weight_ = std::pow(g.h_, g.dim_);

    const int n = g.n_axis_;
    std::int64_t dense_total = 1;
    for (int k = 0; k < g.dim_; ++k) dense_total *= n;
    g.dense_to_node_.assign(static_cast<std::size_t>(dense_total), -1);

    std::array<int, kMaxDim> idx{0, 0, 0};
    for (std::int64_t flat = 0; flat < dense_total; ++flat) {
        std::int64_t rem = flat;
        for (int k = 0; k < g.dim_; ++k) {
            idx[static_cast<std::size_t>(k)] = static_cast<int>(rem % n);
            rem /= n;
        }
        Point p;
        p.dim = g.dim_;
        for (int k = 0; k < g.dim_; ++k)
            p[k] = -halfwidth + (idx[static_cast<std::size_t>(k)] + 0.5) * g.h_;
        if (!domain.contains(p)) continue;
        g.dense_to_node_[static_cast<std::size_t>(flat)] =
            static_cast<std::int64_t>(g.nodes_.size());
        g.nodes_.push_back(p);
        g.mu_.push_back(density.mu(p));
        g.norm_.push_back(p.norm());
    }
    return g;
}

int QuadratureGrid::axis_index(double x) const {
    return static_cast<int>(std::floor((x + L_) / h_));
}

std::vector<std::size_t> QuadratureGrid::truncation_mask(std::optional<double> M) const {
    std::vector<std::size_t> out;
    out.reserve(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (!M || norm_[i] <= *M) out.push_back(i);
    }
    return out;
}

void QuadratureGrid::neighbors_within(const Point& y, double radius,
                                      std::vector<std::size_t>& out) const {
    out.clear();
    std::array<int, kMaxDim> lo{0, 0, 0}, hi{0, 0, 0};
    for (int k = 0; k < dim_; ++k) {
        lo[static_cast<std::size_t>(k)] = std::max(0, axis_index(y[k] - radius));
        hi[static_cast<std::size_t>(k)] = std::min(n_axis_ - 1, axis_index(y[k] + radius));
        if (lo[static_cast<std::size_t>(k)] > hi[static_cast<std::size_t>(k)]) return;
    }
    const double r2 = radius * radius;
    std::array<int, kMaxDim> idx = lo;
    for (;;) {
        std::int64_t flat = 0;
        for (int k = dim_ - 1; k >= 0; --k) flat = flat * n_axis_ + idx[static_cast<std::size_t>(k)];
        const std::int64_t node = dense_to_node_[static_cast<std::size_t>(flat)];
        if (node >= 0) {
            const Point& p = nodes_[static_cast<std::size_t>(node)];
            if (squared_distance(p, y) <= r2) out.push_back(static_cast<std::size_t>(node));
        }
        int k = 0;
        for (;;) {
            ++idx[static_cast<std::size_t>(k)];
            if (idx[static_cast<std::size_t>(k)] <= hi[static_cast<std::size_t>(k)]) break;
            idx[static_cast<std::size_t>(k)] = lo[static_cast<std::size_t>(k)];
            ++k;
            if (k == dim_) return;
        }
    }
}

double QuadratureGrid::integrate_mu(const std::function<double(const Point&)>& f,
                                    std::optional<double> M) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (M && norm_[i] > *M) continue;
        acc += f(nodes_[i]) * mu_[i];
    }
    return acc * weight_;
}

double QuadratureGrid::integrate(const std::function<double(const Point&)>& f,
                                 std::optional<double> M) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (M && norm_[i] > *M) continue;
        acc += f(nodes_[i]);
    }
    return acc * weight_;
}

}  // namespace sirlab
