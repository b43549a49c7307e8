#include "sirlab/partition.hpp"

#include <algorithm>
#include <cmath>

namespace sirlab {

Point PartitionCell::center(double edge, int dim) const {
    Point p;
    p.dim = dim;
    for (int k = 0; k < dim; ++k)
        p[k] = (static_cast<double>(coord[static_cast<std::size_t>(k)]) + 0.5) * edge;
    return p;
}

double PartitionCell::max_corner_norm(double edge, int dim) const {
    double n2 = 0.0;
    for (int k = 0; k < dim; ++k) {
        const double lo = static_cast<double>(coord[static_cast<std::size_t>(k)]) * edge;
        const double hi = lo + edge;
        const double m = std::max(std::abs(lo), std::abs(hi));
        n2 += m * m;
    }
    return std::sqrt(n2);
}

PartitionSpec PartitionSpec::from_domain(const DomainSpec& domain) {
    PartitionSpec p;
    p.dim = domain.dim;
    p.shape = domain.shape;
    const double a = domain.cone_r * std::sin(domain.cone_alpha) / (1.0 + std::sin(domain.cone_alpha));
    p.edge = a / std::sqrt(static_cast<double>(domain.dim));
    p.min_M = std::max(domain.truncation_radii.front(), a);
    return p;
}

double PartitionSpec::cell_volume() const { return std::pow(edge, dim); }

bool PartitionSpec::cell_in_domain(const PartitionCell& cell) const {
    if (shape == DomainShape::HalfSpace) return cell.coord[0] >= 0;
    return true;
}

PartitionCell PartitionSpec::cell_containing(const Point& x) const {
    PartitionCell c;
    for (int k = 0; k < dim; ++k) {
        // cell (m*edge, (m+1)*edge] contains x iff m = ceil(x/edge) - 1
        c.coord[static_cast<std::size_t>(k)] =
            static_cast<std::int64_t>(std::ceil(x[k] / edge)) - 1;
    }
    return c;
}

PartitionPrefix partition_cells(const PartitionSpec& part, double M) {
    if (!(M >= part.min_M))
        throw ParameterError("partition_cells: M must be at least max(M_1, cell constant a)");

    // Candidate integer range covering B(0, M).
    const auto lo_bound = static_cast<std::int64_t>(std::floor(-M / part.edge)) - 1;
    const auto hi_bound = static_cast<std::int64_t>(std::ceil(M / part.edge)) + 1;

    struct Keyed {
        double center_norm2;
        PartitionCell cell;
    };
    std::vector<Keyed> candidates;
    PartitionCell cur;
    std::array<std::int64_t, kMaxDim> idx{0, 0, 0};
    // dense enumeration over the bounding integer box
    const int d = part.dim;
    std::vector<std::int64_t> lows(static_cast<std::size_t>(d), lo_bound);
    for (int k = 0; k < d; ++k) idx[static_cast<std::size_t>(k)] = lows[static_cast<std::size_t>(k)];
    bool done = false;
    while (!done) {
        for (int k = 0; k < d; ++k) cur.coord[static_cast<std::size_t>(k)] = idx[static_cast<std::size_t>(k)];
        if (part.cell_in_domain(cur)) {
            const Point c = cur.center(part.edge, d);
            // keep a superset: everything whose center could belong to the prefix
            if (c.norm() <= M + part.edge * std::sqrt(static_cast<double>(d))) {
                candidates.push_back({c.norm2(), cur});
            }
        }
        int k = 0;
        for (;;) {
            ++idx[static_cast<std::size_t>(k)];
            if (idx[static_cast<std::size_t>(k)] <= hi_bound) break;
            idx[static_cast<std::size_t>(k)] = lo_bound;
            ++k;
            if (k == d) {
                done = true;
                break;
            }
        }
    }

    std::sort(candidates.begin(), candidates.end(), [](const Keyed& a, const Keyed& b) {
        if (a.center_norm2 != b.center_norm2) return a.center_norm2 < b.center_norm2;
        for (int k = 0; k < kMaxDim; ++k) {
            if (a.cell.coord[static_cast<std::size_t>(k)] != b.cell.coord[static_cast<std::size_t>(k)])
                return a.cell.coord[static_cast<std::size_t>(k)] < b.cell.coord[static_cast<std::size_t>(k)];
        }
        return false;
    });

    PartitionPrefix out;
    for (const Keyed& k : candidates) {
        if (!part.cell_in_ball(k.cell, M)) break;
        out.cells.push_back(k.cell);
    }
    out.q = out.cells.size();
    if (out.q == 0)
        throw ParameterError("partition_cells: no cell fits inside B(0, M); q undefined");
    return out;
}

}  // namespace sirlab
