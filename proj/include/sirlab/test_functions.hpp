#pragma once

#include <functional>
#include <string>
#include <vector>

#include "sirlab/common.hpp"

namespace sirlab {

/// Family of bounded test functions (sup-norm <= 1) pairing against the
/// empirical and limit measures: the constant, coordinate-wise sigmoid bumps
/// and radial Gaussian bumps on a configurable lattice of centers.
struct TestFunctionSuite {
    struct Entry {
        std::string name;
        std::function<double(const Point&)> phi;
    };
    std::vector<Entry> members;

    static TestFunctionSuite standard(int dim, const std::vector<double>& centers,
                                      double bump_width, double sigmoid_sharpness);

    std::size_t size() const { return members.size(); }
    void validate() const;
};

}  // namespace sirlab
