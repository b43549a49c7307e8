#pragma once

#include "sirlab/common.hpp"

namespace sirlab {

enum class KernelFamily { Indicator, Tent };

/// Symmetric contact kernel with explicit bound constants: K <= C everywhere,
/// K >= cmin within radius r, K = 0 beyond radius Rbar.
struct KernelSpec {
    KernelFamily family{KernelFamily::Indicator};
    double C{1.0};
    double cmin{1.0};
    double r{1.0};
    double Rbar{1.0};

    double eval_at_distance(double dist) const {
        if (dist > Rbar) return 0.0;
        switch (family) {
            case KernelFamily::Indicator: return C;
            case KernelFamily::Tent: return C * (1.0 - dist / Rbar);
        }
        return 0.0;
    }

    void validate() const;
};

double kernel_eval(const KernelSpec& spec, const Point& x, const Point& y);

}  // namespace sirlab
