#include "sirlab/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <unordered_map>

namespace sirlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Stateless counter stream (splitmix64 sequence): the realization of the
/// per-individual driving noise P^i. One u64 of state, so a run touching a
/// few million draws stays cheap, and the k-th draw of individual i is the
/// same number in every run that reaches it.
struct CounterRng {
    std::uint64_t seed{0};
    std::uint64_t ctr{0};

    double uniform01() {
        return static_cast<double>(mix64(seed + ++ctr) >> 11) * 0x1.0p-53;
    }
    double exponential1() { return -std::log(1.0 - uniform01()); }
};

/// Integer-bucket spatial hash with cell edge = kernel support radius.
class BucketGrid {
public:
    BucketGrid(int dim, double edge) : dim_(dim), edge_(edge) {}

    std::int64_t key_of(const double* x) const {
        std::int64_t k = 0;
        for (int a = 0; a < dim_; ++a) {
            const auto c = static_cast<std::int64_t>(std::floor(x[a] / edge_));
            k = k * 73856093 + c;  // mixing multipliers keep collisions rare
        }
        return k;
    }

    void insert(const double* x, std::uint32_t id) { cells_[key_of(x)].push_back(id); }

    template <typename Fn>
    void for_neighbors(const double* x, Fn&& fn) const {
        std::array<std::int64_t, kMaxDim> base{0, 0, 0};
        for (int a = 0; a < dim_; ++a)
            base[static_cast<std::size_t>(a)] = static_cast<std::int64_t>(std::floor(x[a] / edge_));
        std::array<int, kMaxDim> off{-1, -1, -1};
        for (;;) {
            std::int64_t k = 0;
            for (int a = 0; a < dim_; ++a)
                k = k * 73856093 + (base[static_cast<std::size_t>(a)] + off[static_cast<std::size_t>(a)]);
            const auto it = cells_.find(k);
            if (it != cells_.end()) {
                for (std::uint32_t id : it->second) fn(id);
            }
            int a = 0;
            for (;;) {
                ++off[static_cast<std::size_t>(a)];
                if (off[static_cast<std::size_t>(a)] <= 1) break;
                off[static_cast<std::size_t>(a)] = -1;
                ++a;
                if (a == dim_) return;
            }
        }
    }

private:
    int dim_;
    double edge_;
    std::unordered_map<std::int64_t, std::vector<std::uint32_t>> cells_;
};

/// Binary min-heap over individual ids with in-place key updates.
class CandidateHeap {
public:
    explicit CandidateHeap(std::size_t n) : key_(n, kInf), pos_(n, kNone) {}

    void set(std::uint32_t id, double key) {
        key_[id] = key;
        if (pos_[id] == kNone) {
            if (key == kInf) return;
            pos_[id] = heap_.size();
            heap_.push_back(id);
            sift_up(pos_[id]);
        } else {
            sift_up(pos_[id]);
            sift_down(pos_[id]);
        }
    }

    void remove(std::uint32_t id) {
        const std::size_t p = pos_[id];
        if (p == kNone) return;
        const std::uint32_t last = heap_.back();
        heap_.pop_back();
        pos_[id] = kNone;
        if (p < heap_.size()) {
            heap_[p] = last;
            pos_[last] = p;
            sift_up(p);
            sift_down(p);
        }
    }

    bool empty() const { return heap_.empty(); }
    std::uint32_t top_id() const { return heap_.front(); }
    double top_key() const { return key_[heap_.front()]; }
    double key(std::uint32_t id) const { return key_[id]; }

private:
    static constexpr std::size_t kNone = static_cast<std::size_t>(-1);
    std::vector<double> key_;
    std::vector<std::size_t> pos_;
    std::vector<std::uint32_t> heap_;

    bool less(std::uint32_t a, std::uint32_t b) const {
        if (key_[a] != key_[b]) return key_[a] < key_[b];
        return a < b;  // deterministic tie-break
    }
    void sift_up(std::size_t p) {
        const std::uint32_t id = heap_[p];
        while (p > 0) {
            const std::size_t parent = (p - 1) / 2;
            if (!less(id, heap_[parent])) break;
            heap_[p] = heap_[parent];
            pos_[heap_[p]] = p;
            p = parent;
        }
        heap_[p] = id;
        pos_[id] = p;
    }
    void sift_down(std::size_t p) {
        const std::uint32_t id = heap_[p];
        for (;;) {
            std::size_t child = 2 * p + 1;
            if (child >= heap_.size()) break;
            if (child + 1 < heap_.size() && less(heap_[child + 1], heap_[child])) ++child;
            if (!less(heap_[child], id)) break;
            heap_[p] = heap_[child];
            pos_[heap_[p]] = p;
            p = child;
        }
        heap_[p] = id;
        pos_[id] = p;
    }
};

struct Engine {
    const Population& pop;
    const KernelSpec& kernel;
    const SimOptions& opt;
    double lambda_cap;
    int dim;
    std::size_t N;
    double gamma;
    bool truncated;
    double M;

    BucketGrid grid;
    std::vector<double> nu_hat;       // empirical normalizer per individual
    std::vector<double> inv_normpow;  // 1 / (N * nu_hat^gamma)
    std::vector<bool> in_ball;        // |X_i| <= M (true everywhere untruncated)
    std::vector<Health> state;
    std::vector<double> dominator;    // per susceptible
    std::vector<CounterRng> stream;
    BucketGrid infectious;            // ever-infected individuals
    CandidateHeap heap;
    EventLog log;

    Engine(const Population& p, const KernelSpec& k, const SimOptions& o, double cap)
        : pop(p),
          kernel(k),
          opt(o),
          lambda_cap(cap),
          dim(p.dim),
          N(p.N),
          gamma(p.gamma),
          truncated(o.truncation.has_value()),
          M(o.truncation.value_or(kInf)),
          grid(p.dim, k.Rbar),
          infectious(p.dim, k.Rbar),
          heap(p.N) {}

    const double* xof(std::size_t i) const { return &pop.coords[i * static_cast<std::size_t>(dim)]; }

    double dist(const double* a, const double* b) const {
        double s = 0.0;
        for (int k = 0; k < dim; ++k) {
            const double d = a[k] - b[k];
            s += d * d;
        }
        return std::sqrt(s);
    }

    double norm(const double* a) const {
        double s = 0.0;
        for (int k = 0; k < dim; ++k) s += a[k] * a[k];
        return std::sqrt(s);
    }

    void prepare() {
        state = pop.state0;
        log.t_end = opt.t_end;
        log.truncation = opt.truncation;
        log.gamma = gamma;
        log.population_identity = pop.identity;
        log.infection_time.assign(N, kInf);
        log.recovery_time.assign(N, kInf);
        dominator.assign(N, 0.0);
        stream.resize(N);
        in_ball.assign(N, true);
        for (std::size_t i = 0; i < N; ++i) {
            grid.insert(xof(i), static_cast<std::uint32_t>(i));
            stream[i].seed = pop.thinning_seed[i];
            if (truncated) in_ball[i] = norm(xof(i)) <= M;
        }

        // Empirical normalizers: nu_hat(X_j) = (1/N) sum_l K(X_l, X_j), the sum
        // restricted to the ball in the truncated dynamics. The self term keeps
        // every value >= cmin/N, so the powers below are always finite.
        nu_hat.assign(N, 0.0);
        inv_normpow.assign(N, 0.0);
        for (std::size_t j = 0; j < N; ++j) {
            const double* xj = xof(j);
            double acc = 0.0;
            grid.for_neighbors(xj, [&](std::uint32_t l) {
                if (truncated && !in_ball[l]) return;
                acc += kernel.eval_at_distance(dist(xof(l), xj));
            });
            nu_hat[j] = acc / static_cast<double>(N);
            inv_normpow[j] =
                1.0 / (static_cast<double>(N) * std::pow(nu_hat[j], gamma));
        }
    }

    /// Force of infection at (t, x) from the current ever-infected set.
    double rate_at(double t, const double* x) const {
        double acc = 0.0;
        infectious.for_neighbors(x, [&](std::uint32_t j) {
            if (truncated && !in_ball[j]) return;
            const double k = kernel.eval_at_distance(dist(xof(j), x));
            if (k == 0.0) return;
            const double lam = pop.curve[j].eval(t - log.infection_time[j]);
            if (lam == 0.0) return;
            acc += k * lam * inv_normpow[j];
        });
        return acc;
    }

    void record(double t, std::uint32_t i, Event::Kind kind) {
        log.events.push_back({t, i, kind});
    }

    void budget_check() {
        const double budget = opt.budget_factor * static_cast<double>(N);
        if (static_cast<double>(log.candidate_evaluations + log.events.size()) > budget) {
            throw RunawayError("simulation exceeded its event budget (" +
                               std::to_string(static_cast<std::size_t>(budget)) +
                               "); raise budget_factor or check the configuration");
        }
    }

    /// Individual j became infectious at time t: raise the dominators of the
    /// susceptibles it can reach and redraw their pending candidates from t
    /// (exact by memorylessness of the exponential residual).
    void add_contributor(std::uint32_t j, double t) {
        infectious.insert(xof(j), j);
        if (truncated && !in_ball[j]) return;  // contributes nothing to rates
        const double* xj = xof(j);
        std::vector<std::uint32_t> touched;
        grid.for_neighbors(xj, [&](std::uint32_t s) {
            if (state[s] != Health::Susceptible) return;
            const double k = kernel.eval_at_distance(dist(xof(s), xj));
            if (k == 0.0) return;
            const double increment = lambda_cap * k * inv_normpow[j];
            if (increment == 0.0) return;
            dominator[s] += increment;
            touched.push_back(s);
        });
        std::sort(touched.begin(), touched.end());  // stream consumption order
        for (std::uint32_t s : touched) {
            heap.set(s, t + stream[s].exponential1() / dominator[s]);
        }
    }

    void infect(std::uint32_t i, double t) {
        state[i] = Health::Infected;
        log.infection_time[i] = t;
        ++log.infection_count;
        record(t, i, Event::Kind::Infection);
        heap.remove(i);
        const double eta = pop.curve[i].eta;
        log.recovery_time[i] = t + eta;
        recovery_queue.push_back({t + eta, i});
        std::push_heap(recovery_queue.begin(), recovery_queue.end(), RecoveryLater{});
        add_contributor(i, t);
    }

    struct RecoveryEntry {
        double time;
        std::uint32_t id;
    };
    struct RecoveryLater {
        bool operator()(const RecoveryEntry& a, const RecoveryEntry& b) const {
            if (a.time != b.time) return a.time > b.time;
            return a.id > b.id;
        }
    };
    std::vector<RecoveryEntry> recovery_queue;

    void run() {
        prepare();
        // Initial infectious individuals enter at t = 0 with infection age 0.
        for (std::size_t j = 0; j < N; ++j) {
            if (pop.state0[j] != Health::Infected) continue;
            log.infection_time[j] = 0.0;
            const double eta = pop.curve[j].eta;
            log.recovery_time[j] = eta;
            recovery_queue.push_back({eta, static_cast<std::uint32_t>(j)});
            add_contributor(static_cast<std::uint32_t>(j), 0.0);
        }
        std::make_heap(recovery_queue.begin(), recovery_queue.end(), RecoveryLater{});

        for (;;) {
            const double t_rec = recovery_queue.empty() ? kInf : recovery_queue.front().time;
            const double t_cand = heap.empty() ? kInf : heap.top_key();
            if (t_rec <= t_cand) {
                if (t_rec > opt.t_end || t_rec == kInf) break;
                const std::uint32_t j = recovery_queue.front().id;
                std::pop_heap(recovery_queue.begin(), recovery_queue.end(), RecoveryLater{});
                recovery_queue.pop_back();
                state[j] = Health::Recovered;
                record(t_rec, j, Event::Kind::Recovery);
                budget_check();
            } else {
                if (t_cand > opt.t_end) break;
                const std::uint32_t i = heap.top_id();
                const double t = t_cand;
                ++log.candidate_evaluations;
                budget_check();
                const double rate = rate_at(t, xof(i));
                if (rate > dominator[i] * (1.0 + 1e-9)) {
                    throw SolverDefectError("thinning dominator violated: rate " +
                                            std::to_string(rate) + " > " +
                                            std::to_string(dominator[i]));
                }
                const double u = stream[i].uniform01();
                if (u * dominator[i] < rate) {
                    infect(i, t);
                } else {
                    heap.set(i, t + stream[i].exponential1() / dominator[i]);
                }
            }
        }
        std::sort(log.events.begin(), log.events.end(), [](const Event& a, const Event& b) {
            if (a.time != b.time) return a.time < b.time;
            if (a.kind != b.kind) return a.kind == Event::Kind::Recovery;
            return a.individual < b.individual;
        });
    }
};

}  // namespace

SimResult simulate(std::shared_ptr<const Population> pop, const InfectivityModel& infectivity,
                   const KernelSpec& kernel, const SimOptions& options) {
    if (!pop) throw UsageError("simulate: population must not be null");
    if (!(options.t_end > 0.0)) throw ParameterError("simulate: t_end must be positive");
    if (options.truncation && !(*options.truncation > 0.0))
        throw ParameterError("simulate: truncation radius must be positive");

    Engine engine(*pop, kernel, options, infectivity.lambda_star());
    engine.run();
    auto log = std::make_shared<EventLog>(std::move(engine.log));
    return SimResult{log, EmpiricalTrajectory(pop, log)};
}

double force_of_infection(const Population& pop, const EventLog& log, const KernelSpec& kernel,
                          double t, const Point& x, std::optional<double> truncation) {
    if (x.dim != pop.dim) throw ConfigError("force_of_infection: dimension mismatch");
    const std::size_t N = pop.N;
    const bool truncated = truncation.has_value();
    const double M = truncation.value_or(kInf);

    std::vector<double> norms(N, 0.0);
    for (std::size_t i = 0; i < N; ++i) norms[i] = pop.position(i).norm();

    double acc = 0.0;
    for (std::size_t j = 0; j < N; ++j) {
        const double tau = log.infection_time[j];
        if (!(tau <= t)) continue;
        if (truncated && norms[j] > M) continue;
        const double k = kernel_eval(kernel, x, pop.position(j));
        if (k == 0.0) continue;
        const double lam = pop.curve[j].eval(t - tau);
        if (lam == 0.0) continue;
        double nu = 0.0;
        for (std::size_t l = 0; l < N; ++l) {
            if (truncated && norms[l] > M) continue;
            nu += kernel_eval(kernel, pop.position(l), pop.position(j));
        }
        nu /= static_cast<double>(N);
        acc += k * lam / std::pow(nu, pop.gamma);
    }
    return acc / static_cast<double>(N);
}

double EmpiricalTrajectory::individual_weight(MeasureKind kind, double t, std::size_t i) const {
    const Population& pop = *pop_;
    const EventLog& log = *log_;
    const double tau = log.infection_time[i];
    const double rec = log.recovery_time[i];
    switch (kind) {
        case MeasureKind::S:
            return (pop.state0[i] == Health::Susceptible && t < tau) ? 1.0 : 0.0;
        case MeasureKind::I:
            if (pop.state0[i] == Health::Infected) return rec > t ? 1.0 : 0.0;
            if (pop.state0[i] == Health::Susceptible)
                return (tau <= t && rec > t) ? 1.0 : 0.0;
            return 0.0;
        case MeasureKind::R:
            if (pop.state0[i] == Health::Recovered) return 1.0;
            return rec <= t ? 1.0 : 0.0;
        case MeasureKind::ForceOfInfection:
            if (pop.state0[i] == Health::Recovered) return 0.0;
            if (!(tau <= t)) return 0.0;
            return pop.curve[i].eval(t - tau);
        case MeasureKind::Total:
            return 1.0;
    }
    return 0.0;
}

bool EmpiricalTrajectory::in_measure_support(std::size_t i) const {
    if (!log_->truncation) return true;
    return pop_->position(i).norm() <= *log_->truncation;
}

double EmpiricalTrajectory::measure_eval(MeasureKind kind, double t,
                                         const std::function<double(const Point&)>& phi) const {
    if (t > log_->t_end)
        throw UsageError("measure_eval: t exceeds the simulated horizon");
    const std::size_t N = pop_->N;
    double acc = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        if (!in_measure_support(i)) continue;
        const double w = individual_weight(kind, t, i);
        if (w != 0.0) acc += w * phi(pop_->position(i));
    }
    return acc / static_cast<double>(N);
}

double coupling_discrepancy(const Population& pop, const EventLog& log_full,
                            const EventLog& log_truncated, double M_n) {
    if (log_full.population_identity != log_truncated.population_identity ||
        log_full.population_identity != pop.identity) {
        throw UsageError("coupling_discrepancy: logs must come from the same population");
    }
    if (!log_truncated.truncation)
        throw UsageError("coupling_discrepancy: second log must be a truncated run");
    const double horizon = std::min(log_full.t_end, log_truncated.t_end);
    std::size_t disagree = 0;
    for (std::size_t i = 0; i < pop.N; ++i) {
        if (pop.state0[i] != Health::Susceptible) continue;
        if (pop.position(i).norm() > M_n) continue;
        const double a = log_full.infection_time[i];
        const double b = log_truncated.infection_time[i];
        if (a == b) continue;
        if (std::min(a, b) <= horizon) ++disagree;
    }
    return static_cast<double>(disagree) / static_cast<double>(pop.N);
}

void write_events_csv(const Population& pop, const EventLog& log, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw IoError("cannot open " + path + " for writing");
    std::fprintf(f, "time,individual,transition");
    for (int k = 0; k < pop.dim; ++k) std::fprintf(f, ",x%d", k + 1);
    std::fprintf(f, "\n");
    for (const Event& e : log.events) {
        std::fprintf(f, "%.17g,%u,%s", e.time, e.individual,
                     e.kind == Event::Kind::Infection ? "S>I" : "I>R");
        const Point x = pop.position(e.individual);
        for (int k = 0; k < pop.dim; ++k) std::fprintf(f, ",%.17g", x[k]);
        std::fprintf(f, "\n");
    }
    std::fclose(f);
}

}  // namespace sirlab
