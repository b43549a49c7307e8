#include "sirlab/config.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace sirlab {

namespace {

struct RawValue {
    std::string text;
    int line{0};
};

struct IniDoc {
    std::map<std::string, std::map<std::string, RawValue>> sections;

    const RawValue* find(const std::string& section, const std::string& key) const {
        const auto s = sections.find(section);
        if (s == sections.end()) return nullptr;
        const auto k = s->second.find(key);
        if (k == s->second.end()) return nullptr;
        return &k->second;
    }
};

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

IniDoc parse_ini(const std::string& text) {
    IniDoc doc;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t comment = line.find_first_of("#;");
        if (comment != std::string::npos) line = line.substr(0, comment);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("config syntax error at line " + std::to_string(lineno) +
                                  ": unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty())
                throw ConfigError("config syntax error at line " + std::to_string(lineno) +
                                  ": empty section name");
            doc.sections[section];
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config syntax error at line " + std::to_string(lineno) +
                              ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError("config syntax error at line " + std::to_string(lineno) +
                              ": empty key");
        doc.sections[section][key] = RawValue{value, lineno};
    }
    return doc;
}

class Reader {
public:
    explicit Reader(const IniDoc& doc) : doc_(doc) {}

    double number(const std::string& sec, const std::string& key, double fallback) {
        const RawValue* v = doc_.find(sec, key);
        if (!v) return fallback;
        return to_number(*v, sec, key);
    }

    double required_number(const std::string& sec, const std::string& key) {
        const RawValue* v = doc_.find(sec, key);
        if (!v) {
            violations_.push_back("missing required key [" + sec + "] " + key);
            return 0.0;
        }
        return to_number(*v, sec, key);
    }

    std::string word(const std::string& sec, const std::string& key, const std::string& fallback) {
        const RawValue* v = doc_.find(sec, key);
        return v ? v->text : fallback;
    }

    std::vector<double> list(const std::string& sec, const std::string& key,
                             std::vector<double> fallback) {
        const RawValue* v = doc_.find(sec, key);
        if (!v) return fallback;
        std::vector<double> out;
        std::string item;
        std::istringstream in(v->text);
        while (std::getline(in, item, ',')) {
            item = trim(item);
            if (item.empty()) continue;
            out.push_back(to_number(RawValue{item, v->line}, sec, key));
        }
        if (out.empty())
            violations_.push_back("[" + sec + "] " + key + " must contain at least one value");
        return out;
    }

    void violation(const std::string& clause) { violations_.push_back(clause); }

    void finish() const {
        if (violations_.empty()) return;
        std::string msg = "invalid configuration:";
        for (const std::string& v : violations_) msg += "\n  - " + v;
        throw ConfigError(msg);
    }

private:
    const IniDoc& doc_;
    std::vector<std::string> violations_;

    double to_number(const RawValue& v, const std::string& sec, const std::string& key) {
        try {
            std::size_t used = 0;
            const double x = std::stod(v.text, &used);
            if (used != v.text.size()) throw std::invalid_argument("trailing");
            return x;
        } catch (const std::exception&) {
            violations_.push_back("[" + sec + "] " + key + " at line " + std::to_string(v.line) +
                                  ": not a number: '" + v.text + "'");
            return 0.0;
        }
    }
};

CompartmentDensity read_compartment(Reader& r, const std::string& suffix) {
    CompartmentDensity c;
    const std::string fam = r.word("density", "family" + suffix,
                                   r.word("density", "family", "envelope"));
    if (fam == "envelope") {
        c.family = DensityFamily::EnvelopePower;
    } else if (fam == "uniform") {
        c.family = DensityFamily::UniformBox;
        c.box_halfwidth = r.number("density", "box_halfwidth" + suffix,
                                   r.number("density", "box_halfwidth", 1.0));
    } else {
        r.violation("density family must be 'envelope' or 'uniform', got '" + fam + "'");
    }
    return c;
}

CurveSpec read_curve(Reader& r, const std::string& prefix) {
    CurveSpec c;
    const std::string fam = r.word("infectivity", prefix + "_family", "constant");
    if (fam == "constant") {
        c.family = CurveFamily::ConstantUntilEta;
    } else if (fam == "piecewise") {
        c.family = CurveFamily::PiecewiseLevels;
        c.levels = static_cast<int>(r.number("infectivity", prefix + "_levels", 4));
        c.level_ratio = r.number("infectivity", prefix + "_level_ratio", 0.5);
    } else if (fam == "expdecay") {
        c.family = CurveFamily::ExpDecay;
        c.decay = r.number("infectivity", prefix + "_decay", 1.0);
    } else {
        r.violation("infectivity family must be constant|piecewise|expdecay, got '" + fam + "'");
    }
    return c;
}

DurationSpec read_duration(Reader& r, const std::string& prefix) {
    DurationSpec d;
    const std::string law = r.word("infectivity", prefix + "_duration", "exponential");
    if (law == "fixed") {
        d.law = DurationLaw::Fixed;
        d.eta0 = r.number("infectivity", prefix + "_eta0", 1.0);
    } else if (law == "exponential") {
        d.law = DurationLaw::Exponential;
        d.rho = r.number("infectivity", prefix + "_rho", 1.0);
    } else if (law == "uniform") {
        d.law = DurationLaw::UniformInterval;
        d.lo = r.number("infectivity", prefix + "_lo", 1.0);
        d.hi = r.number("infectivity", prefix + "_hi", 2.0);
    } else {
        r.violation("duration law must be fixed|exponential|uniform, got '" + law + "'");
    }
    return d;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    const IniDoc doc = parse_ini(text);
    Reader r(doc);
    RunConfig c;

    c.dim = static_cast<int>(r.number("domain", "d", 1));
    const std::string shape = r.word("domain", "shape", "full");
    if (shape == "full") {
        c.shape = DomainShape::FullSpace;
    } else if (shape == "halfspace") {
        c.shape = DomainShape::HalfSpace;
    } else {
        r.violation("domain shape must be 'full' or 'halfspace', got '" + shape + "'");
    }
    c.cone_alpha = r.number("domain", "alpha", c.cone_alpha);
    c.cone_r = r.number("domain", "cone_r", c.cone_r);
    c.truncation_radii = r.list("domain", "M", {});

    const std::string kfam = r.word("kernel", "family", "indicator");
    if (kfam == "indicator") {
        c.kernel.family = KernelFamily::Indicator;
    } else if (kfam == "tent") {
        c.kernel.family = KernelFamily::Tent;
    } else {
        r.violation("kernel family must be 'indicator' or 'tent', got '" + kfam + "'");
    }
    c.kernel.C = r.number("kernel", "C", 1.0);
    c.kernel.cmin = r.number("kernel", "cmin", c.kernel.C * 0.5);
    c.kernel.r = r.number("kernel", "r", 1.0);
    c.kernel.Rbar = r.number("kernel", "Rbar", 1.0);

    c.envelope_a = r.number("density", "a", 1.0);
    c.envelope_delta = r.number("density", "delta", 1.0);
    const std::vector<double> fr = r.list("density", "fractions", {0.9, 0.05, 0.05});
    if (fr.size() == 3) {
        c.fractions = {fr[0], fr[1], fr[2]};
    } else {
        r.violation("density fractions must list exactly three values");
    }
    c.pi[0] = read_compartment(r, "_s");
    c.pi[1] = read_compartment(r, "_i");
    c.pi[2] = read_compartment(r, "_r");

    c.lambda_star = r.number("infectivity", "lambda_star", 1.0);
    c.newly_curve = read_curve(r, "newly");
    c.initial_curve = read_curve(r, "initial");
    c.newly_duration = read_duration(r, "newly");
    c.initial_duration = read_duration(r, "initial");

    c.N = static_cast<std::size_t>(r.number("simulation", "N", 1000));
    c.t_end = r.number("simulation", "T", 1.0);
    c.gamma = r.required_number("simulation", "gamma");
    c.seed = static_cast<std::uint64_t>(r.number("simulation", "seed", 1));
    c.budget_factor = r.number("simulation", "budget_factor", 50.0);

    c.solver_h = r.number("solver", "h", 0.1);
    c.solver_dt = r.number("solver", "dt", 1e-3);
    c.solver_halfwidth = r.number("solver", "halfwidth", 4.0);
    const std::string scheme = r.word("solver", "scheme", "euler");
    if (scheme == "euler") {
        c.solver_scheme = TimeScheme::Euler;
    } else if (scheme == "trapezoid") {
        c.solver_scheme = TimeScheme::Trapezoid;
    } else {
        r.violation("solver scheme must be 'euler' or 'trapezoid', got '" + scheme + "'");
    }
    c.solver_store_every = static_cast<int>(r.number("solver", "store_every", 1));

    const std::vector<double> nlist =
        r.list("experiment", "N_list", {250.0, 1000.0, 4000.0});
    c.experiment.N_list.clear();
    for (double v : nlist) c.experiment.N_list.push_back(static_cast<std::size_t>(v));
    c.experiment.seeds = static_cast<int>(r.number("experiment", "seeds", 20));
    c.experiment.t_points = static_cast<int>(r.number("experiment", "t_points", 51));
    c.experiment.t_end = r.number("experiment", "T", c.t_end);
    c.experiment.workers = static_cast<int>(r.number("experiment", "workers", 4));
    c.experiment.budget_factor = c.budget_factor;
    c.phi_centers = r.list("experiment", "phi_centers", {-2.0, 0.0, 2.0});
    c.phi_width = r.number("experiment", "phi_width", 1.0);
    c.phi_sharpness = r.number("experiment", "phi_sharpness", 4.0);

    // Cross-field clauses, named as in the specification of the run contract.
    if (!(c.gamma >= 0.0 && c.gamma < 1.0)) r.violation("gamma must lie in [0,1)");
    double frac_sum = c.fractions[0] + c.fractions[1] + c.fractions[2];
    if (std::abs(frac_sum - 1.0) > 1e-12) r.violation("fractions must sum to 1");
    if (!c.truncation_radii.empty()) {
        if (!(c.truncation_radii.front() > c.kernel.Rbar)) r.violation("M_1 must exceed Rbar");
        for (std::size_t i = 1; i < c.truncation_radii.size(); ++i) {
            if (!(c.truncation_radii[i] > c.truncation_radii[i - 1])) {
                r.violation("M ladder must be strictly increasing");
                break;
            }
        }
        if (c.solver_halfwidth + 1e-12 < c.truncation_radii.back())
            r.violation("solver halfwidth must cover the largest M");
    } else {
        r.violation("missing required key [domain] M");
    }
    if (!(c.solver_h <= c.kernel.Rbar / 4.0)) r.violation("h must satisfy h <= Rbar/4");
    {
        InfectivityModel tmp_check(std::max(c.lambda_star, 0.0), c.newly_curve, c.newly_duration,
                                   c.initial_curve, c.initial_duration);
        const double scale = tmp_check.min_duration_scale();
        if (std::isfinite(scale) && !(c.solver_dt <= scale / 4.0))
            r.violation("dt must satisfy dt <= min-duration/4");
    }
    if (!(c.t_end > 0.0)) r.violation("T must be positive");
    if (c.N < 1) r.violation("N must be at least 1");
    for (std::size_t i = 1; i < c.experiment.N_list.size(); ++i) {
        if (!(c.experiment.N_list[i] > c.experiment.N_list[i - 1])) {
            r.violation("experiment N_list must be strictly increasing");
            break;
        }
    }
    r.finish();

    // Structural validation of the assembled objects (throws ConfigError).
    c.instance();
    return c;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config file " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

DomainSpec RunConfig::domain_spec() const {
    DomainSpec d;
    d.dim = dim;
    d.shape = shape;
    d.cone_alpha = cone_alpha;
    d.cone_r = cone_r;
    d.anchor.dim = dim;
    d.truncation_radii = truncation_radii;
    return d;
}

BaselineDensity RunConfig::density_spec() const {
    return BaselineDensity::make(dim, shape, envelope_a, envelope_delta, fractions, pi);
}

InfectivityModel RunConfig::infectivity_model() const {
    return InfectivityModel(lambda_star, newly_curve, newly_duration, initial_curve,
                            initial_duration);
}

ModelInstance RunConfig::instance() const {
    ModelInstance inst{domain_spec(), kernel, density_spec(), infectivity_model(), gamma};
    inst.validate();
    return inst;
}

SolveOptions RunConfig::solve_options() const {
    SolveOptions s;
    s.t_end = t_end;
    s.dt = solver_dt;
    s.spacing = solver_h;
    s.halfwidth = solver_halfwidth;
    s.scheme = solver_scheme;
    s.store_every = solver_store_every;
    return s;
}

TestFunctionSuite RunConfig::suite() const {
    return TestFunctionSuite::standard(dim, phi_centers, phi_width, phi_sharpness);
}

std::string RunConfig::resolved_text() const {
    std::ostringstream out;
    out << "# resolved configuration (canonical form)\n";
    out << "[domain]\n";
    out << "d = " << dim << "\n";
    out << "shape = " << (shape == DomainShape::FullSpace ? "full" : "halfspace") << "\n";
    out << "alpha = " << fmt(cone_alpha) << "\n";
    out << "cone_r = " << fmt(cone_r) << "\n";
    out << "M = ";
    for (std::size_t i = 0; i < truncation_radii.size(); ++i)
        out << (i ? ", " : "") << fmt(truncation_radii[i]);
    out << "\n\n[kernel]\n";
    out << "family = " << (kernel.family == KernelFamily::Indicator ? "indicator" : "tent") << "\n";
    out << "C = " << fmt(kernel.C) << "\n";
    out << "cmin = " << fmt(kernel.cmin) << "\n";
    out << "r = " << fmt(kernel.r) << "\n";
    out << "Rbar = " << fmt(kernel.Rbar) << "\n";
    out << "\n[density]\n";
    out << "a = " << fmt(envelope_a) << "\n";
    out << "delta = " << fmt(envelope_delta) << "\n";
    out << "fractions = " << fmt(fractions[0]) << ", " << fmt(fractions[1]) << ", "
        << fmt(fractions[2]) << "\n";
    const char* tags[3] = {"_s", "_i", "_r"};
    for (int k = 0; k < 3; ++k) {
        const CompartmentDensity& f = pi[static_cast<std::size_t>(k)];
        out << "family" << tags[k] << " = "
            << (f.family == DensityFamily::EnvelopePower ? "envelope" : "uniform") << "\n";
        if (f.family == DensityFamily::UniformBox)
            out << "box_halfwidth" << tags[k] << " = " << fmt(f.box_halfwidth) << "\n";
    }
    out << "\n[infectivity]\n";
    out << "lambda_star = " << fmt(lambda_star) << "\n";
    const auto emit_curve = [&](const char* prefix, const CurveSpec& cs) {
        out << prefix << "_family = "
            << (cs.family == CurveFamily::ConstantUntilEta
                    ? "constant"
                    : cs.family == CurveFamily::PiecewiseLevels ? "piecewise" : "expdecay")
            << "\n";
        if (cs.family == CurveFamily::PiecewiseLevels) {
            out << prefix << "_levels = " << cs.levels << "\n";
            out << prefix << "_level_ratio = " << fmt(cs.level_ratio) << "\n";
        }
        if (cs.family == CurveFamily::ExpDecay)
            out << prefix << "_decay = " << fmt(cs.decay) << "\n";
    };
    const auto emit_duration = [&](const char* prefix, const DurationSpec& ds) {
        switch (ds.law) {
            case DurationLaw::Fixed:
                out << prefix << "_duration = fixed\n" << prefix << "_eta0 = " << fmt(ds.eta0) << "\n";
                break;
            case DurationLaw::Exponential:
                out << prefix << "_duration = exponential\n"
                    << prefix << "_rho = " << fmt(ds.rho) << "\n";
                break;
            case DurationLaw::UniformInterval:
                out << prefix << "_duration = uniform\n"
                    << prefix << "_lo = " << fmt(ds.lo) << "\n"
                    << prefix << "_hi = " << fmt(ds.hi) << "\n";
                break;
        }
    };
    emit_curve("newly", newly_curve);
    emit_duration("newly", newly_duration);
    emit_curve("initial", initial_curve);
    emit_duration("initial", initial_duration);
    out << "\n[simulation]\n";
    out << "N = " << N << "\n";
    out << "T = " << fmt(t_end) << "\n";
    out << "gamma = " << fmt(gamma) << "\n";
    out << "seed = " << seed << "\n";
    out << "budget_factor = " << fmt(budget_factor) << "\n";
    out << "\n[solver]\n";
    out << "h = " << fmt(solver_h) << "\n";
    out << "dt = " << fmt(solver_dt) << "\n";
    out << "halfwidth = " << fmt(solver_halfwidth) << "\n";
    out << "scheme = " << (solver_scheme == TimeScheme::Euler ? "euler" : "trapezoid") << "\n";
    out << "store_every = " << solver_store_every << "\n";
    out << "\n[experiment]\n";
    out << "N_list = ";
    for (std::size_t i = 0; i < experiment.N_list.size(); ++i)
        out << (i ? ", " : "") << experiment.N_list[i];
    out << "\n";
    out << "seeds = " << experiment.seeds << "\n";
    out << "t_points = " << experiment.t_points << "\n";
    out << "T = " << fmt(experiment.t_end) << "\n";
    out << "workers = " << experiment.workers << "\n";
    out << "phi_centers = ";
    for (std::size_t i = 0; i < phi_centers.size(); ++i)
        out << (i ? ", " : "") << fmt(phi_centers[i]);
    out << "\n";
    out << "phi_width = " << fmt(phi_width) << "\n";
    out << "phi_sharpness = " << fmt(phi_sharpness) << "\n";
    return out.str();
}

std::uint64_t RunConfig::weights_hash() const {
    const auto mix_double = [](std::uint64_t h, double v) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, sizeof(bits));
        return mix64(h ^ bits);
    };
    std::uint64_t h = fnv1a64("sirlab-weights-v1");
    h = mix64(h ^ static_cast<std::uint64_t>(dim));
    h = mix64(h ^ static_cast<std::uint64_t>(shape));
    h = mix64(h ^ static_cast<std::uint64_t>(kernel.family));
    h = mix_double(h, kernel.C);
    h = mix_double(h, kernel.cmin);
    h = mix_double(h, kernel.r);
    h = mix_double(h, kernel.Rbar);
    h = mix_double(h, envelope_a);
    h = mix_double(h, envelope_delta);
    for (double f : fractions) h = mix_double(h, f);
    for (const CompartmentDensity& f : pi) {
        h = mix64(h ^ static_cast<std::uint64_t>(f.family));
        h = mix_double(h, f.box_halfwidth);
    }
    h = mix_double(h, gamma);
    h = mix_double(h, solver_h);
    h = mix_double(h, solver_halfwidth);
    return h;
}

}  // namespace sirlab
