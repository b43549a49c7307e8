#include "sirlab/experiments.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <mutex>
#include <thread>

namespace sirlab {

namespace {

const char* kind_name(MeasureKind k) {
    switch (k) {
        case MeasureKind::S: return "S";
        case MeasureKind::ForceOfInfection: return "F";
        case MeasureKind::I: return "I";
        case MeasureKind::R: return "R";
        case MeasureKind::Total: return "total";
    }
    return "?";
}

constexpr MeasureKind kAllKinds[5] = {MeasureKind::S, MeasureKind::ForceOfInfection,
                                      MeasureKind::I, MeasureKind::R, MeasureKind::Total};

/// Static task fan-out: results land in pre-sized slots, so the outcome is
/// independent of the worker count.
void parallel_for(std::size_t tasks, int workers, const std::function<void(std::size_t)>& body) {
    if (workers <= 1 || tasks <= 1) {
        for (std::size_t t = 0; t < tasks; ++t) body(t);
        return;
    }
    const int n = std::min<int>(workers, static_cast<int>(tasks));
    std::vector<std::thread> pool;
    std::exception_ptr first_error;
    std::mutex error_mutex;
    pool.reserve(static_cast<std::size_t>(n));
    for (int w = 0; w < n; ++w) {
        pool.emplace_back([&, w]() {
            for (std::size_t t = static_cast<std::size_t>(w); t < tasks;
                 t += static_cast<std::size_t>(n)) {
                try {
                    body(t);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace

std::uint64_t replicate_seed(std::uint64_t master, std::uint64_t index) {
    return substream_seed(master, "replicate", index);
}

LlnReport lln_experiment(const ModelInstance& instance, const SolveOptions& solver,
                         const TestFunctionSuite& suite, const ExperimentOptions& options,
                         std::uint64_t master_seed) {
    instance.validate();
    suite.validate();
    if (options.N_list.empty() || options.seeds < 1 || options.t_points < 2)
        throw ParameterError("lln_experiment: need N values, seeds >= 1 and t_points >= 2");
    for (std::size_t i = 1; i < options.N_list.size(); ++i) {
        if (!(options.N_list[i] > options.N_list[i - 1]))
            throw ParameterError("lln_experiment: N list must be increasing");
    }

    SolveOptions sopt = solver;
    sopt.t_end = options.t_end;
    const LimitFields limit = solve_limit(instance.domain, instance.kernel, instance.density,
                                          instance.infectivity, instance.gamma, sopt);

    // t-lattice snapped to stored solver slices.
    std::vector<std::size_t> slices(static_cast<std::size_t>(options.t_points));
    std::vector<double> lattice(static_cast<std::size_t>(options.t_points));
    for (int k = 0; k < options.t_points; ++k) {
        const double t = options.t_end * k / (options.t_points - 1);
        slices[static_cast<std::size_t>(k)] = limit.slice_at(t);
        lattice[static_cast<std::size_t>(k)] = limit.times[slices[static_cast<std::size_t>(k)]];
    }

    // Limit pairings per (t, phi, compartment), shared across replicates.
    const std::size_t n_phi = suite.size();
    const std::size_t n_t = slices.size();
    std::vector<double> limit_pair(n_t * n_phi * 5, 0.0);
    for (std::size_t ti = 0; ti < n_t; ++ti) {
        for (std::size_t pi = 0; pi < n_phi; ++pi) {
            for (std::size_t ci = 0; ci < 5; ++ci) {
                limit_pair[(ti * n_phi + pi) * 5 + ci] =
                    limit.pair(kAllKinds[ci], slices[ti], suite.members[pi].phi);
            }
        }
    }

    LlnReport report;
    report.master_seed = master_seed;
    report.quadrature_residual =
        std::abs(1.0 - limit.grid->integrate_mu([](const Point&) { return 1.0; }));

    const std::size_t n_N = options.N_list.size();
    const std::size_t tasks = n_N * static_cast<std::size_t>(options.seeds);
    std::vector<std::array<double, 5>> sup_err(tasks);

    parallel_for(tasks, options.workers, [&](std::size_t task) {
        const std::size_t n_idx = task / static_cast<std::size_t>(options.seeds);
        const int seed_idx = static_cast<int>(task % static_cast<std::size_t>(options.seeds));
        const std::size_t N = options.N_list[n_idx];
        const std::uint64_t seed = replicate_seed(master_seed, task);

        auto pop = std::make_shared<Population>(
            init_population(instance.density, instance.infectivity, N, instance.gamma, seed));
        SimOptions sim_opt;
        sim_opt.t_end = options.t_end;
        sim_opt.budget_factor = options.budget_factor;
        const SimResult run = simulate(pop, instance.infectivity, instance.kernel, sim_opt);

        std::array<double, 5> sup{0.0, 0.0, 0.0, 0.0, 0.0};
        std::vector<double> phi_val(pop->N * n_phi);
        for (std::size_t i = 0; i < pop->N; ++i) {
            const Point x = pop->position(i);
            for (std::size_t pi = 0; pi < n_phi; ++pi)
                phi_val[i * n_phi + pi] = suite.members[pi].phi(x);
        }
        std::vector<double> pairing(n_phi);
        for (std::size_t ti = 0; ti < n_t; ++ti) {
            const double t = lattice[ti];
            for (std::size_t ci = 0; ci < 5; ++ci) {
                std::fill(pairing.begin(), pairing.end(), 0.0);
                for (std::size_t i = 0; i < pop->N; ++i) {
                    const double w = run.trajectory.individual_weight(kAllKinds[ci], t, i);
                    if (w == 0.0) continue;
                    for (std::size_t pi = 0; pi < n_phi; ++pi)
                        pairing[pi] += w * phi_val[i * n_phi + pi];
                }
                for (std::size_t pi = 0; pi < n_phi; ++pi) {
                    const double emp = pairing[pi] / static_cast<double>(pop->N);
                    const double err =
                        std::abs(emp - limit_pair[(ti * n_phi + pi) * 5 + ci]);
                    sup[ci] = std::max(sup[ci], err);
                }
            }
        }
        sup_err[task] = sup;
        (void)seed_idx;
    });

    for (std::size_t n_idx = 0; n_idx < n_N; ++n_idx) {
        for (int s = 0; s < options.seeds; ++s) {
            const std::size_t task = n_idx * static_cast<std::size_t>(options.seeds) +
                                     static_cast<std::size_t>(s);
            for (std::size_t ci = 0; ci < 5; ++ci) {
                report.rows.push_back(
                    {kind_name(kAllKinds[ci]), options.N_list[n_idx], s, sup_err[task][ci]});
            }
        }
    }
    std::sort(report.rows.begin(), report.rows.end(), [](const LlnRow& a, const LlnRow& b) {
        if (a.compartment != b.compartment) return a.compartment < b.compartment;
        if (a.N != b.N) return a.N < b.N;
        return a.seed_index < b.seed_index;
    });

    for (std::size_t ci = 0; ci < 5; ++ci) {
        std::vector<std::pair<double, double>> points;
        for (std::size_t n_idx = 0; n_idx < n_N; ++n_idx) {
            double mean = 0.0, sq = 0.0;
            for (int s = 0; s < options.seeds; ++s) {
                const std::size_t task = n_idx * static_cast<std::size_t>(options.seeds) +
                                         static_cast<std::size_t>(s);
                mean += sup_err[task][ci];
            }
            mean /= options.seeds;
            for (int s = 0; s < options.seeds; ++s) {
                const std::size_t task = n_idx * static_cast<std::size_t>(options.seeds) +
                                         static_cast<std::size_t>(s);
                const double d = sup_err[task][ci] - mean;
                sq += d * d;
            }
            const double sd = options.seeds > 1 ? std::sqrt(sq / (options.seeds - 1)) : 0.0;
            report.aggregates.push_back(
                {kind_name(kAllKinds[ci]), options.N_list[n_idx], mean, sd});
            points.emplace_back(static_cast<double>(options.N_list[n_idx]), mean);
        }
        report.slopes.emplace_back(kind_name(kAllKinds[ci]),
                                   n_N >= 2 ? fit_loglog_slope(points)
                                            : std::numeric_limits<double>::quiet_NaN());
    }
    return report;
}

double fit_loglog_slope(const std::vector<std::pair<double, double>>& n_and_error) {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    std::size_t m = 0;
    for (const auto& [n, e] : n_and_error) {
        if (!(e > 0.0)) continue;
        const double x = std::log(n);
        const double y = std::log(e);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++m;
    }
    if (m < 2) return std::numeric_limits<double>::quiet_NaN();
    const double denom = m * sxx - sx * sx;
    return (m * sxy - sx * sy) / denom;
}

TruncationReport truncation_experiment(const ModelInstance& instance, const SolveOptions& solver,
                                       std::size_t N, int seeds, double t_end, int workers,
                                       std::uint64_t master_seed, double budget_factor) {
    instance.validate();
    if (seeds < 1) throw ParameterError("truncation_experiment: seeds must be >= 1");
    const std::vector<double>& ladder = instance.domain.truncation_radii;
    const std::size_t rungs = ladder.size();

    TruncationReport report;
    report.N = N;
    report.seeds = seeds;
    report.master_seed = master_seed;

    // Deterministic side: solve each rung on the shared outer grid.
    std::vector<LimitFields> fields(rungs);
    SolveOptions sopt = solver;
    sopt.t_end = t_end;
    for (std::size_t r = 0; r < rungs; ++r) {
        sopt.truncation = ladder[r];
        fields[r] = solve_limit(instance.domain, instance.kernel, instance.density,
                                instance.infectivity, instance.gamma, sopt);
    }
    const LimitFields& top = fields[rungs - 1];

    // Stochastic side: per seed, one full run plus one truncated run per rung,
    // all driven by the same Population.
    std::vector<std::vector<double>> coupling(rungs,
                                              std::vector<double>(static_cast<std::size_t>(seeds)));
    parallel_for(static_cast<std::size_t>(seeds), workers, [&](std::size_t s) {
        const std::uint64_t seed = replicate_seed(master_seed, s);
        auto pop = std::make_shared<Population>(
            init_population(instance.density, instance.infectivity, N, instance.gamma, seed));
        SimOptions sim_opt;
        sim_opt.t_end = t_end;
        sim_opt.budget_factor = budget_factor;
        const SimResult full = simulate(pop, instance.infectivity, instance.kernel, sim_opt);
        for (std::size_t r = 0; r < rungs; ++r) {
            SimOptions trunc_opt = sim_opt;
            trunc_opt.truncation = ladder[r];
            const SimResult trunc = simulate(pop, instance.infectivity, instance.kernel, trunc_opt);
            coupling[r][s] = coupling_discrepancy(*pop, *full.log, *trunc.log, ladder[r]);
        }
    });

    for (std::size_t r = 0; r < rungs; ++r) {
        TruncationRow row;
        row.n = static_cast<int>(r + 1);
        row.M_n = ladder[r];

        // sup over stored times of the summed L1(mu) distance of the four fields
        double l1 = 0.0;
        for (std::size_t k = 0; k < top.times.size(); ++k) {
            const std::size_t kr = fields[r].slice_at(top.times[k]);
            double d = 0.0;
            const QuadratureGrid& grid = *top.grid;
            for (MeasureKind kind :
                 {MeasureKind::S, MeasureKind::ForceOfInfection, MeasureKind::I, MeasureKind::R}) {
                const std::vector<double>& a = fields[r].field(kind, kr);
                const std::vector<double>& b = top.field(kind, k);
                for (std::size_t i = 0; i < grid.size(); ++i)
                    d += std::abs(a[i] - b[i]) * grid.mu(i);
            }
            l1 = std::max(l1, d * grid.cell_weight());
        }
        row.l1_distance = l1;
        row.pi_n = pi_n(instance.domain, instance.kernel, instance.density, instance.gamma,
                        ladder[r], solver.halfwidth, solver.spacing);
        double cmean = 0.0;
        for (double v : coupling[r]) cmean += v;
        row.coupling_mean = cmean / seeds;
        report.rows.push_back(row);
    }
    return report;
}

namespace {

std::FILE* open_out(const std::string& dir, const char* name) {
    std::filesystem::create_directories(dir);
    const std::string path = dir + "/" + name;
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw IoError("cannot open " + path + " for writing");
    return f;
}

}  // namespace

void emit_lln_report(const LlnReport& report, const std::string& dir) {
    std::FILE* f = open_out(dir, "lln.csv");
    std::fprintf(f, "compartment,N,seed,sup_error\n");
    for (const LlnRow& r : report.rows) {
        std::fprintf(f, "%s,%zu,%d,%.17g\n", r.compartment.c_str(), r.N, r.seed_index,
                     r.sup_error);
    }
    std::fclose(f);

    f = open_out(dir, "summary.txt");
    std::fprintf(f, "lln experiment (master seed %llu)\n",
                 static_cast<unsigned long long>(report.master_seed));
    std::fprintf(f, "quadrature residual |1 - grid mass|: %.17g\n", report.quadrature_residual);
    std::fprintf(f, "\nmean sup-error over seeds:\n");
    for (const LlnAggregate& a : report.aggregates) {
        std::fprintf(f, "  %-6s N=%-8zu mean=%.17g sd=%.17g\n", a.compartment.c_str(), a.N,
                     a.mean_error, a.sd_error);
    }
    std::fprintf(f, "\nfitted log-log slope vs N (Monte Carlo health check, not a paper rate):\n");
    for (const auto& [comp, slope] : report.slopes) {
        std::fprintf(f, "  %-6s slope=%.17g\n", comp.c_str(), slope);
    }
    std::fclose(f);
}

void emit_truncation_report(const TruncationReport& report, const std::string& dir) {
    std::FILE* f = open_out(dir, "truncation.csv");
    std::fprintf(f, "n,M_n,l1_distance,pi_n,coupling_mean\n");
    for (const TruncationRow& r : report.rows) {
        std::fprintf(f, "%d,%.17g,%.17g,%.17g,%.17g\n", r.n, r.M_n, r.l1_distance, r.pi_n,
                     r.coupling_mean);
    }
    std::fclose(f);

    f = open_out(dir, "summary.txt");
    std::fprintf(f, "truncation experiment (master seed %llu, N=%zu, %d seeds)\n",
                 static_cast<unsigned long long>(report.master_seed), report.N, report.seeds);
    for (const TruncationRow& r : report.rows) {
        std::fprintf(f, "  rung %d: M=%.17g l1=%.17g pi=%.17g coupling=%.17g\n", r.n, r.M_n,
                     r.l1_distance, r.pi_n, r.coupling_mean);
    }
    std::fclose(f);
}

}  // namespace sirlab
