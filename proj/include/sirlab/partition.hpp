#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "sirlab/geometry.hpp"

namespace sirlab {

/// One cell of the hypercube partition: the translate
/// prod_k (coord_k * edge, (coord_k + 1) * edge] identified by integer coords.
struct PartitionCell {
    std::array<std::int64_t, kMaxDim> coord{0, 0, 0};
    Point center(double edge, int dim) const;
    /// Distance from the origin to the farthest corner.
    double max_corner_norm(double edge, int dim) const;
};

/// Partition of R^d into translates of (0, edge]^d with
/// edge = (r*sin(alpha)/(1+sin(alpha))) / sqrt(d), derived from the cone
/// geometry so that every cone-ball contains a full cell.
struct PartitionSpec {
    int dim{1};
    DomainShape shape{DomainShape::FullSpace};
    double edge{0.0};
    double min_M{0.0};  // lower bound of q's domain: max(M_1, edge constant a)

    static PartitionSpec from_domain(const DomainSpec& domain);

    /// Cell volume.
    double cell_volume() const;

    bool cell_in_domain(const PartitionCell& cell) const;

    PartitionCell cell_containing(const Point& x) const;

    bool cell_in_ball(const PartitionCell& cell, double M) const {
        return max_corner_norm_of(cell) <= M;
    }

    double max_corner_norm_of(const PartitionCell& cell) const {
        return cell.max_corner_norm(edge, dim);
    }
};

struct PartitionPrefix {
    std::vector<PartitionCell> cells;  // A_1 ... A_q, globally ordered
    std::size_t q{0};
};

/// Ordered prefix (A_1, ..., A_{q(M)}) of the global cell ordering (center
/// distance to the origin, ties lexicographic), cut at the first cell not
/// contained in B(0, M). Throws ParameterError when M is below the threshold
/// or no cell fits.
PartitionPrefix partition_cells(const PartitionSpec& part, double M);

}  // namespace sirlab
