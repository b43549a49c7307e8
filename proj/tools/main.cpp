#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "sirlab/config.hpp"
#include "validate_checks.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace sirlab;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailure = 1;
constexpr int kExitUsage = 2;

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << text;
}

void write_error_record(const fs::path& out_dir, const std::string& type,
                        const std::string& message) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) return;
    json j;
    j["error"] = type;
    j["message"] = message;
    std::ofstream out(out_dir / "error.json", std::ios::binary);
    if (out) out << j.dump(2) << "\n";
}

/// Every pipeline starts by freezing the resolved configuration in its output
/// directory; re-running from that copy reproduces the outputs byte-for-byte.
void stage_out_dir(const RunConfig& config, const fs::path& out_dir) {
    fs::create_directories(out_dir);
    write_text(out_dir / "resolved.ini", config.resolved_text());
}

int cmd_simulate(const RunConfig& config, const fs::path& out_dir,
                 std::optional<double> truncation) {
    stage_out_dir(config, out_dir);
    const ModelInstance inst = config.instance();
    auto pop = std::make_shared<Population>(
        init_population(inst.density, inst.infectivity, config.N, config.gamma, config.seed));
    SimOptions opt;
    opt.t_end = config.t_end;
    opt.truncation = truncation;
    opt.budget_factor = config.budget_factor;
    const SimResult run = simulate(pop, inst.infectivity, inst.kernel, opt);
    write_events_csv(*pop, *run.log, (out_dir / "events.csv").string());

    std::ostringstream summary;
    summary << "simulate: N=" << config.N << " T=" << config.t_end << " gamma=" << config.gamma
            << " seed=" << config.seed << "\n";
    if (truncation) summary << "truncation M=" << *truncation << "\n";
    summary << "events=" << run.log->events.size()
            << " infections=" << run.log->infection_count
            << " candidates=" << run.log->candidate_evaluations << "\n";
    write_text(out_dir / "summary.txt", summary.str());
    return kExitOk;
}

int cmd_solve(const RunConfig& config, const fs::path& out_dir) {
    stage_out_dir(config, out_dir);
    const ModelInstance inst = config.instance();
    SolveOptions opt = config.solve_options();
    opt.truncation = inst.domain.truncation_radii.back();

    const LimitFields fields =
        solve_limit(inst.domain, inst.kernel, inst.density, inst.infectivity, config.gamma, opt);
    write_fields_csv(fields, (out_dir / "fields.csv").string());
    char hash_name[64];
    std::snprintf(hash_name, sizeof(hash_name), "weights_%016llx.bin",
                  static_cast<unsigned long long>(config.weights_hash()));
    save_weight_cache(*fields.weights, config.weights_hash(), (out_dir / hash_name).string());

    const AprioriReport rep = apriori_check(fields, inst.infectivity.lambda_star());
    std::ostringstream summary;
    summary << "solve: T=" << config.t_end << " dt=" << opt.dt << " h=" << opt.spacing
            << " M=" << *opt.truncation << "\n";
    summary << "conservation drift=" << fields.max_conservation_drift << "\n";
    summary << "apriori margins: S=" << rep.sup_S_margin << " F=" << rep.sup_F_margin << "\n";
    write_text(out_dir / "summary.txt", summary.str());
    return kExitOk;
}

int cmd_lln(const RunConfig& config, const fs::path& out_dir, int workers_override) {
    stage_out_dir(config, out_dir);
    const ModelInstance inst = config.instance();
    ExperimentOptions opts = config.experiment;
    if (workers_override > 0) opts.workers = workers_override;
    const LlnReport report =
        lln_experiment(inst, config.solve_options(), config.suite(), opts, config.seed);
    emit_lln_report(report, out_dir.string());
    return kExitOk;
}

int cmd_truncation(const RunConfig& config, const fs::path& out_dir, int workers_override) {
    stage_out_dir(config, out_dir);
    const ModelInstance inst = config.instance();
    int workers = workers_override > 0 ? workers_override : config.experiment.workers;
    const TruncationReport report = truncation_experiment(
        inst, config.solve_options(), config.N, config.experiment.seeds, config.experiment.t_end,
        workers, config.seed, config.budget_factor);
    emit_truncation_report(report, out_dir.string());
    return kExitOk;
}

int cmd_validate(const RunConfig& config, const fs::path& out_dir) {
    stage_out_dir(config, out_dir);
    const std::vector<CheckResult> results = run_validation(config);
    bool all_ok = true;
    std::ostringstream report;
    for (const CheckResult& r : results) {
        const char* status = r.passed ? (r.warning ? "WARN" : "PASS") : "FAIL";
        report << status << " " << r.name << ": " << r.detail << "\n";
        if (!r.passed) all_ok = false;
    }
    std::cout << report.str();
    write_text(out_dir / "validate.txt", report.str());
    if (!all_ok) write_error_record(out_dir, "check-failure", "validation checks failed");
    return all_ok ? kExitOk : kExitCheckFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"spatial SIR epidemics with varying infectivity: simulation, limit solver, "
                 "and convergence experiments"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    int workers = 0;
    double truncation = 0.0;
    bool use_truncation = false;

    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("-c,--config", config_path, "configuration file")->required();
        sub->add_option("-o,--out", out_dir, "output directory");
        sub->add_option("-w,--workers", workers, "parallel worker count");
    };

    CLI::App* sim = app.add_subcommand("simulate", "run one stochastic realization");
    add_common(sim);
    sim->add_option("--truncation", truncation, "simulate the truncated D_n dynamics")
        ->each([&](const std::string&) { use_truncation = true; });

    CLI::App* solve = app.add_subcommand("solve", "solve the deterministic limit system");
    add_common(solve);
    CLI::App* lln = app.add_subcommand("lln", "law-of-large-numbers experiment");
    add_common(lln);
    CLI::App* trunc = app.add_subcommand("truncation", "domain-truncation experiment");
    add_common(trunc);
    CLI::App* validate = app.add_subcommand("validate", "run the invariant suites");
    add_common(validate);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        const RunConfig config = load_config_file(config_path);
        const fs::path out(out_dir);
        if (sim->parsed())
            return cmd_simulate(config, out,
                                use_truncation ? std::optional<double>(truncation) : std::nullopt);
        if (solve->parsed()) return cmd_solve(config, out);
        if (lln->parsed()) return cmd_lln(config, out, workers);
        if (trunc->parsed()) return cmd_truncation(config, out, workers);
        if (validate->parsed()) return cmd_validate(config, out);
        std::cerr << "error: unknown subcommand\n";
        return kExitUsage;
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        write_error_record(out_dir, "config-error", e.what());
        return kExitUsage;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        write_error_record(out_dir, "usage-error", e.what());
        return kExitUsage;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        write_error_record(out_dir, "io-error", e.what());
        return kExitCheckFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        write_error_record(out_dir, "runtime-error", e.what());
        return kExitCheckFailure;
    }
}
