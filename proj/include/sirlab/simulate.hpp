#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>

#include "sirlab/kernel.hpp"
#include "sirlab/population.hpp"

namespace sirlab {

struct Event {
    enum class Kind : std::uint8_t { Infection, Recovery };
    double time;
    std::uint32_t individual;
    Kind kind;
};

/// Full record of one stochastic run: the ordered event sequence plus the
/// per-individual infection/recovery times (infinity when the transition
/// never happened by t_end).
struct EventLog {
    double t_end{0.0};
    std::optional<double> truncation;  // M_n of the truncated dynamics, if any
    double gamma{0.0};
    std::uint64_t population_identity{0};
    std::vector<Event> events;
    std::vector<double> infection_time;  // per individual; 0 for initially infected
    std::vector<double> recovery_time;   // per individual
    std::size_t candidate_evaluations{0};
    std::size_t infection_count{0};
};

/// Measure-evaluation view over a finished run: pairs the renormalized
/// empirical measures with bounded test functions at any t <= t_end. Exact:
/// reconstructs each indicator from the event times, no snapshots stored.
class EmpiricalTrajectory {
public:
    EmpiricalTrajectory() = default;
    EmpiricalTrajectory(std::shared_ptr<const Population> pop, std::shared_ptr<const EventLog> log)
        : pop_(std::move(pop)), log_(std::move(log)) {}

    double measure_eval(MeasureKind kind, double t,
                        const std::function<double(const Point&)>& phi) const;

    /// Per-individual compartment weight at time t (1/0 indicators, or the
    /// current infectivity for the force-of-infection measure), before the
    /// 1/N normalization and any truncation mask. Shared by measure_eval and
    /// the batched experiment evaluators.
    double individual_weight(MeasureKind kind, double t, std::size_t i) const;

    bool in_measure_support(std::size_t i) const;

    const Population& population() const { return *pop_; }
    const EventLog& log() const { return *log_; }

private:
    std::shared_ptr<const Population> pop_;
    std::shared_ptr<const EventLog> log_;
};

struct SimOptions {
    double t_end{1.0};
    std::optional<double> truncation;  // simulate the D_n dynamics when set
    double budget_factor{50.0};        // runaway guard: events+candidates <= factor*N
};

struct SimResult {
    std::shared_ptr<const EventLog> log;
    EmpiricalTrajectory trajectory;
};

/// Exact simulation of the N-individual dynamics by thinned Poisson clocks.
/// Per-susceptible dominating rates use the ever-infected set with all
/// infectivities at the cap; pending candidates are redrawn (memoryless) when
/// an in-range infection raises the dominator.
SimResult simulate(std::shared_ptr<const Population> pop, const InfectivityModel& infectivity,
                   const KernelSpec& kernel, const SimOptions& options);

/// Reference evaluator of the force of infection at (t, x) from a finished
/// (or in-progress) log; O(N) per call, used by tests and diagnostics.
double force_of_infection(const Population& pop, const EventLog& log, const KernelSpec& kernel,
                          double t, const Point& x,
                          std::optional<double> truncation = std::nullopt);

/// Fraction of in-ball susceptibles whose infection indicator ever disagrees
/// between the two coupled runs: (1/N) sum_i sup_t |A_ni - A_i| 1{|X_i|<=M}.
double coupling_discrepancy(const Population& pop, const EventLog& log_full,
                            const EventLog& log_truncated, double M_n);

/// Columnar event export: one row per event, `time,individual,transition,x...`.
void write_events_csv(const Population& pop, const EventLog& log, const std::string& path);

}  // namespace sirlab
