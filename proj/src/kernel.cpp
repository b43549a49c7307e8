#include "sirlab/kernel.hpp"

namespace sirlab {

void KernelSpec::validate() const {
    if (!(C > 0.0)) throw ConfigError("kernel amplitude C must be positive");
    if (!(cmin > 0.0)) throw ConfigError("kernel floor cmin must be positive");
    if (!(r > 0.0)) throw ConfigError("kernel lower-bound radius r must be positive");
    if (!(Rbar > 0.0)) throw ConfigError("kernel support radius Rbar must be positive");
    if (r > Rbar) throw ConfigError("kernel radii must satisfy r <= Rbar");
    switch (family) {
        case KernelFamily::Indicator:
            if (cmin > C) throw ConfigError("indicator kernel requires cmin <= C");
            break;
        case KernelFamily::Tent:
            // floor at distance r is C*(1 - r/Rbar); r = Rbar would force cmin = 0
            if (!(r < Rbar)) throw ConfigError("tent kernel requires r < Rbar");
            if (cmin > C * (1.0 - r / Rbar))
                throw ConfigError("tent kernel requires cmin <= C*(1 - r/Rbar)");
            break;
    }
}

double kernel_eval(const KernelSpec& spec, const Point& x, const Point& y) {
    check_dims(x, y, "kernel_eval");
    return spec.eval_at_distance(distance(x, y));
}

}  // namespace sirlab
