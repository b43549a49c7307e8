#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "sirlab/experiments.hpp"
#include "sirlab/instance.hpp"
#include "sirlab/limit_solver.hpp"

namespace sirlab {

/// Fully validated run configuration. Parsed from the INI-style grammar
/// documented in docs/config.md: `[section]` headers, `key = value` entries,
/// comma-separated lists, `#`/`;` comments.
struct RunConfig {
    // domain
    int dim{1};
    DomainShape shape{DomainShape::FullSpace};
    double cone_alpha{0.7853981633974483};
    double cone_r{1.0};
    std::vector<double> truncation_radii;

    // kernel
    KernelSpec kernel;

    // density
    double envelope_a{1.0};
    double envelope_delta{1.0};
    std::array<double, 3> fractions{0.9, 0.05, 0.05};
    std::array<CompartmentDensity, 3> pi{};

    // infectivity
    double lambda_star{1.0};
    CurveSpec newly_curve;
    CurveSpec initial_curve;
    DurationSpec newly_duration;
    DurationSpec initial_duration;

    // simulation
    std::size_t N{1000};
    double t_end{1.0};
    double gamma{0.0};
    std::uint64_t seed{1};
    double budget_factor{50.0};

    // solver
    double solver_h{0.1};
    double solver_dt{1e-3};
    double solver_halfwidth{4.0};
    TimeScheme solver_scheme{TimeScheme::Euler};
    int solver_store_every{1};

    // experiment
    ExperimentOptions experiment;
    std::vector<double> phi_centers{-2.0, 0.0, 2.0};
    double phi_width{1.0};
    double phi_sharpness{4.0};

    DomainSpec domain_spec() const;
    BaselineDensity density_spec() const;
    InfectivityModel infectivity_model() const;
    ModelInstance instance() const;
    SolveOptions solve_options() const;
    TestFunctionSuite suite() const;

    /// Canonical re-serialization; parsing it back yields an identical config.
    std::string resolved_text() const;

    /// Hash over the blocks that determine the weight matrix (kernel, density,
    /// domain, gamma, grid); keys the binary weight cache.
    std::uint64_t weights_hash() const;
};

/// Parses and validates; throws ConfigError carrying either the syntax error
/// with its line number or the list of violated clauses.
RunConfig parse_config(const std::string& text);

RunConfig load_config_file(const std::string& path);

}  // namespace sirlab
