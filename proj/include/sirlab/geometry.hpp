#pragma once

#include <optional>
#include <vector>

#include "sirlab/common.hpp"
#include "sirlab/rng.hpp"

namespace sirlab {

enum class DomainShape { FullSpace, HalfSpace };

/// Domain geometry: the (possibly unbounded) domain D, its interior-cone
/// parameters, and the truncation ladder M_1 < M_2 < ... used to form
/// D_n = D ∩ B(0, M_n).
struct DomainSpec {
    int dim{1};
    DomainShape shape{DomainShape::FullSpace};
    double cone_alpha{1.5707963267948966};  // half-opening angle, in (0, pi)
    double cone_r{1.0};                     // cone-ball radius
    Point anchor{};                         // direction oracle target
    std::vector<double> truncation_radii;   // strictly increasing ladder

    bool contains(const Point& x) const;

    /// Direction oracle l_y: unit vector pointing from y toward the anchor
    /// (an arbitrary axis direction when y is the anchor itself).
    Point cone_direction(const Point& y) const;

    /// Membership in C(y, l_y, alpha) ∩ B(y, cone_r).
    bool in_cone_ball(const Point& y, const Point& z) const;

    /// Volume m of the cone-ball intersection (same for every vertex).
    double cone_ball_volume() const;

    /// Uniform sample from the cone-ball at y (rejection from the enclosing ball).
    Point sample_cone_ball(const Point& y, RngStream& rng) const;

    double largest_truncation() const { return truncation_radii.back(); }

    void validate() const;
};

/// Spot-check of the interior-cone condition by rejection sampling:
/// draws `samples` points of each cone-ball at `vertices` and verifies they
/// stay inside D (and inside B(0, M) when `truncation` is set).
bool cone_condition_holds(const DomainSpec& domain, const std::vector<Point>& vertices,
                          int samples, RngStream& rng,
                          std::optional<double> truncation = std::nullopt);

}  // namespace sirlab
