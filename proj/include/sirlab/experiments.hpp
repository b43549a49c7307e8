#pragma once

#include <string>

#include "sirlab/instance.hpp"
#include "sirlab/limit_solver.hpp"
#include "sirlab/simulate.hpp"
#include "sirlab/test_functions.hpp"

namespace sirlab {

struct ExperimentOptions {
    std::vector<std::size_t> N_list{250, 1000, 4000};
    int seeds{20};
    int t_points{51};
    double t_end{4.0};
    int workers{4};
    double budget_factor{50.0};
};

struct LlnRow {
    std::string compartment;  // S, F, I, R, total
    std::size_t N;
    int seed_index;
    double sup_error;
};

struct LlnAggregate {
    std::string compartment;
    std::size_t N;
    double mean_error;
    double sd_error;
};

struct LlnReport {
    std::vector<LlnRow> rows;           // sorted (compartment, N, seed)
    std::vector<LlnAggregate> aggregates;
    std::vector<std::pair<std::string, double>> slopes;  // log-log slope vs N
    double quadrature_residual{0.0};    // |1 - grid mass of mu|
    std::uint64_t master_seed{0};
};

/// Law-of-large-numbers experiment: stochastic runs against the deterministic
/// limit, sup over the t-lattice and test-function suite per compartment.
LlnReport lln_experiment(const ModelInstance& instance, const SolveOptions& solver,
                         const TestFunctionSuite& suite, const ExperimentOptions& options,
                         std::uint64_t master_seed);

struct TruncationRow {
    int n;
    double M_n;
    double l1_distance;    // limit fields on D_n vs largest rung
    double pi_n;
    double coupling_mean;  // mean coupling discrepancy over seeds
};

struct TruncationReport {
    std::vector<TruncationRow> rows;
    std::size_t N{0};
    int seeds{0};
    std::uint64_t master_seed{0};
};

/// Truncation experiment along the configured M_n ladder: deterministic
/// L1(mu) distances, Pi_n, and the stochastic coupling discrepancy.
TruncationReport truncation_experiment(const ModelInstance& instance, const SolveOptions& solver,
                                       std::size_t N, int seeds, double t_end, int workers,
                                       std::uint64_t master_seed, double budget_factor = 50.0);

/// Deterministic replicate-seed ladder: replicate k of a pipeline runs on
/// substream_seed(master, "replicate", k).
std::uint64_t replicate_seed(std::uint64_t master, std::uint64_t index);

/// CSV + summary emission; byte-stable for identical reports.
void emit_lln_report(const LlnReport& report, const std::string& dir);
void emit_truncation_report(const TruncationReport& report, const std::string& dir);

/// Least-squares slope of log(mean_error) against log(N).
double fit_loglog_slope(const std::vector<std::pair<double, double>>& n_and_error);

}  // namespace sirlab
