#include "cbtest/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "cbtest/csv.hpp"
#include "cbtest/rng.hpp"
#include "cbtest/statistics.hpp"

namespace cbtest {

std::string to_string(StatKind k) {
    switch (k) {
        case StatKind::ks_sym: return "ks-sym";
        case StatKind::ks_full: return "ks-full";
        case StatKind::linear: return "linear";
        case StatKind::maxima: return "maxima";
        case StatKind::cross_prob: return "cross-prob";
    }
    return "?";
}

StatKind stat_kind_from(const std::string& name) {
    if (name == "ks-sym") return StatKind::ks_sym;
    if (name == "ks-full") return StatKind::ks_full;
    if (name == "linear") return StatKind::linear;
    if (name == "maxima") return StatKind::maxima;
    if (name == "cross-prob") return StatKind::cross_prob;
    throw std::invalid_argument("unknown statistic: " + name +
                                " (expected ks-sym|ks-full|linear|maxima|cross-prob)");
}

ModelSpec ModelSpec::null_model(DistributionSpec q) {
    ModelSpec m;
    m.kind = Kind::null_q;
    m.label = "null-" + q.name;
    m.q = ensure_inverse(std::move(q));
    return m;
}

ModelSpec ModelSpec::equality_model(EqualityAlternative alt, std::string label) {
    ModelSpec m;
    m.kind = Kind::equality;
    m.eq = std::move(alt);
    m.label = std::move(label);
    return m;
}

ModelSpec ModelSpec::dependence_model(DependenceAlternative alt, std::string label) {
    ModelSpec m;
    m.kind = Kind::dependence;
    m.dep = std::move(alt);
    m.label = std::move(label);
    return m;
}

namespace {

const EqualityAlternative* resolve_direction(const SimConfig& cfg) {
    if (cfg.direction) return &*cfg.direction;
    if (cfg.model.eq) return &*cfg.model.eq;
    return nullptr;
}

int resolve_workers(const SimConfig& cfg) {
    int w = cfg.workers > 0 ? cfg.workers
                            : static_cast<int>(std::thread::hardware_concurrency());
    if (w < 1) w = 1;
    if (const char* env = std::getenv("CBTEST_THREADS")) {
        char* end = nullptr;
        long cap = std::strtol(env, &end, 10);
        if (end != env && cap >= 1 && cap < 1024) w = std::min<long>(w, cap);
    }
    return std::min(w, cfg.reps);
}

}  // namespace

void validate(const SimConfig& cfg) {
    if (cfg.n < 1) throw std::invalid_argument("config: n must be >= 1");
    if (cfg.reps < 1 || cfg.reps > 1000000)
        throw std::invalid_argument("config: replications must be in [1, 1e6]");
    if (cfg.stat == StatKind::cross_prob && cfg.n < 2)
        throw std::invalid_argument("config: cross-prob needs n >= 2");
    if ((cfg.stat == StatKind::linear || cfg.stat == StatKind::maxima) &&
        resolve_direction(cfg) == nullptr)
        throw std::invalid_argument(
            "config: linear/maxima statistics need a direction (an equality alternative)");
    if (cfg.model.kind == ModelSpec::Kind::equality && !cfg.model.eq)
        throw std::invalid_argument("config: equality model without an alternative");
    if (cfg.model.kind == ModelSpec::Kind::dependence && !cfg.model.dep)
        throw std::invalid_argument("config: dependence model without an alternative");
}

double EcdfTable::ecdf(double t) const {
    auto it = std::upper_bound(values.begin(), values.end(), t);
    return static_cast<double>(it - values.begin()) / static_cast<double>(values.size());
}

EcdfTable simulate(const SimConfig& cfg) {
    validate(cfg);

    // per-replicate evaluator; everything captured is immutable and shared
    const EqualityAlternative* dir = resolve_direction(cfg);
    std::function<double(double)> alpha;
    if (cfg.stat == StatKind::maxima) alpha = q_direction(*dir);

    auto run_one = [&cfg, dir, &alpha](philox4x32& rng) {
        LabeledSample ls;
        switch (cfg.model.kind) {
            case ModelSpec::Kind::null_q: ls = sample_null(cfg.model.q, cfg.n, rng); break;
            case ModelSpec::Kind::equality:
                ls = sample_equality_alt(*cfg.model.eq, cfg.n, rng);
                break;
            case ModelSpec::Kind::dependence:
                ls = sample_dependence_alt(*cfg.model.dep, cfg.n, rng);
                break;
        }
        switch (cfg.stat) {
            case StatKind::ks_full: return ks_full(ls);
            case StatKind::ks_sym: return ks_colour_blind(blind(ls));
            case StatKind::linear: return optimal_linear_stat(blind(ls), *dir);
            case StatKind::maxima: return maxima_stat(blind(ls), alpha);
            case StatKind::cross_prob: return cross_probability(blind(ls));
        }
        return 0.0;
    };

    std::vector<double> values(cfg.reps);
    int workers = resolve_workers(cfg);
    if (workers <= 1) {
        for (int r = 0; r < cfg.reps; ++r) {
            philox4x32 rng(cfg.seed, static_cast<std::uint64_t>(r));
            values[r] = run_one(rng);
        }
    } else {
        std::atomic<int> next{0};
        std::exception_ptr first_error;
        std::mutex error_mutex;
        auto worker = [&]() {
            try {
                for (;;) {
                    int r = next.fetch_add(1, std::memory_order_relaxed);
                    if (r >= cfg.reps) return;
                    philox4x32 rng(cfg.seed, static_cast<std::uint64_t>(r));
                    values[r] = run_one(rng);
                }
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        };
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
        if (first_error) std::rethrow_exception(first_error);
    }

    EcdfTable table;
    std::sort(values.begin(), values.end());
    table.values = std::move(values);
    table.config = cfg;
    return table;
}

double critical_value(const EcdfTable& t, double level) {
    if (!(level > 0.0 && level < 1.0))
        throw std::domain_error("critical_value: level must be in (0,1)");
    long r = static_cast<long>(t.values.size());
    long k = static_cast<long>(std::ceil(level * static_cast<double>(r)));  // k-th largest
    if (k < 1) k = 1;
    if (k > r) k = r;
    return t.values[static_cast<size_t>(r - k)];
}

double p_value(const EcdfTable& t, double observed) {
    auto it = std::lower_bound(t.values.begin(), t.values.end(), observed);
    auto at_least = t.values.end() - it;
    return (1.0 + static_cast<double>(at_least)) / (static_cast<double>(t.values.size()) + 1.0);
}

double power(const SimConfig& null_cfg, const SimConfig& alt_cfg, double level, Rejection side) {
    if (null_cfg.stat != alt_cfg.stat || null_cfg.n != alt_cfg.n)
        throw std::invalid_argument("power: statistic kind and n must match");
    if (side == Rejection::by_kind) {
        bool signed_stat =
            null_cfg.stat == StatKind::linear || null_cfg.stat == StatKind::maxima;
        side = signed_stat ? Rejection::two_sided : Rejection::upper;
        if (null_cfg.stat == StatKind::cross_prob) side = Rejection::two_sided;
    }
    double center = null_cfg.stat == StatKind::cross_prob ? 5.0 / 6.0 : 0.0;
    auto score = [side, center](double v) {
        switch (side) {
            case Rejection::two_sided: return std::fabs(v - center);
            case Rejection::lower: return -v;
            default: return v;
        }
    };

    EcdfTable null_table = simulate(null_cfg);
    EcdfTable alt_table = simulate(alt_cfg);
    std::vector<double> null_scores(null_table.values.size());
    for (size_t i = 0; i < null_scores.size(); ++i) null_scores[i] = score(null_table.values[i]);
    std::sort(null_scores.begin(), null_scores.end());
    long r = static_cast<long>(null_scores.size());
    long k = static_cast<long>(std::ceil(level * static_cast<double>(r)));
    if (k < 1) k = 1;
    if (k > r) k = r;
    double crit = null_scores[static_cast<size_t>(r - k)];

    long reject = 0;
    for (double v : alt_table.values) reject += score(v) > crit;
    return static_cast<double>(reject) / static_cast<double>(alt_table.values.size());
}

void write_csv(const EcdfTable& t, std::ostream& out) {
    out << "value,probability\n";
    double r = static_cast<double>(t.values.size());
    for (size_t i = 0; i < t.values.size(); ++i)
        out << format_double(t.values[i]) << ',' << format_double((i + 1) / r) << '\n';
}

}  // namespace cbtest
