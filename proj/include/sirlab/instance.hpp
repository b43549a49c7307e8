#pragma once

#include "sirlab/density.hpp"
#include "sirlab/geometry.hpp"
#include "sirlab/infectivity.hpp"
#include "sirlab/kernel.hpp"

namespace sirlab {

/// One fully specified model instance; everything the simulator and the limit
/// solver need besides run-level parameters (N, T, seeds, grids).
struct ModelInstance {
    DomainSpec domain;
    KernelSpec kernel;
    BaselineDensity density;
    InfectivityModel infectivity;
    double gamma{0.0};

    void validate() const {
        domain.validate();
        kernel.validate();
        density.validate();
        if (!(gamma >= 0.0 && gamma < 1.0))
            throw ConfigError("gamma must lie in [0,1)");
        if (!(domain.truncation_radii.front() > kernel.Rbar))
            throw ConfigError("M_1 must exceed Rbar");
        if (domain.dim != density.dim)
            throw ConfigError("domain and density dimensions must agree");
    }
};

}  // namespace sirlab
