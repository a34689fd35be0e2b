// cbtest: two-sample tests for measurement pairs observed without labels.
// Subcommands: test (CSV data), simulate (null/alternative sampling
// distributions), snr (detectability analytics), figures (reference curves).
// Exit codes: 0 ok, 2 usage/config, 3 data/file, 4 numerical.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cbtest/alternatives.hpp"
#include "cbtest/asymptotics.hpp"
#include "cbtest/csv.hpp"
#include "cbtest/distribution.hpp"
#include "cbtest/expr.hpp"
#include "cbtest/montecarlo.hpp"
#include "cbtest/quadrature.hpp"
#include "cbtest/rng.hpp"
#include "cbtest/samples.hpp"
#include "cbtest/statistics.hpp"

using nlohmann::json;
using namespace cbtest;

namespace {

constexpr const char* kVersion = "0.1.0";

// ---- spec parsing ----

// An alternative spec is one of:
//   uniform-vs-square                       builtin pair A1 = x, A2 = x^2
//   {"kind":"equality","q":...,"h":...,"epsilon":...}   inline JSON
//   {"kind":"dependence","q":...,"g":...,"epsilon":...}
//   @path                                   JSON read from a file
// "q" is a builtin name (uniform | square | mix-uniform-square) or an array
// of polynomial density coefficients; "h"/"g" are expressions in x (and y).
struct AltSpec {
    std::optional<EqualityAlternative> eq;
    std::optional<DependenceAlternative> dep;
    std::string label;
};

DistributionSpec dist_from_json(const json& v) {
    if (v.is_string()) return builtin_dist(v.get<std::string>());
    if (v.is_array()) return poly_density_dist(v.get<std::vector<double>>(), "poly");
    throw std::invalid_argument(
        "alt spec: \"q\" must be a builtin name or a density coefficient array");
}

AltSpec alt_from_json_text(const std::string& text, const std::string& label) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("alt spec: not valid JSON: ") + e.what());
    }
    try {
        std::string kind = j.at("kind").get<std::string>();
        double eps = j.at("epsilon").get<double>();
        DistributionSpec q = j.contains("q") ? dist_from_json(j.at("q")) : uniform_dist();
        AltSpec a;
        a.label = label;
        if (kind == "equality") {
            a.eq = make_equality_alt(std::move(q), parse_function1(j.at("h").get<std::string>()),
                                     eps);
            return a;
        }
        if (kind == "dependence") {
            a.dep = make_dependence_alt(std::move(q), parse_expr(j.at("g").get<std::string>()).eval,
                                        eps);
            return a;
        }
        throw std::invalid_argument("alt spec: kind must be \"equality\" or \"dependence\"");
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("alt spec: ") + e.what());
    }
}

AltSpec parse_alt_spec(const std::string& text) {
    if (text == "uniform-vs-square") {
        AltSpec a;
        a.eq = uniform_vs_square_alt();
        a.label = text;
        return a;
    }
    if (!text.empty() && text[0] == '@') {
        std::ifstream in(text.substr(1));
        if (!in) throw std::invalid_argument("alt spec: cannot read " + text.substr(1));
        std::ostringstream buf;
        buf << in.rdbuf();
        return alt_from_json_text(buf.str(), text);
    }
    if (!text.empty() && text[0] == '{') return alt_from_json_text(text, text);
    throw std::invalid_argument(
        "alt spec: expected uniform-vs-square, inline JSON {...}, or @file");
}

// A model spec is null-<builtin distribution> or alt:<alternative spec>.
ModelSpec parse_model_spec(const std::string& text) {
    if (text.rfind("null-", 0) == 0) return ModelSpec::null_model(builtin_dist(text.substr(5)));
    if (text.rfind("alt:", 0) == 0) {
        AltSpec a = parse_alt_spec(text.substr(4));
        if (a.eq) return ModelSpec::equality_model(std::move(*a.eq), text);
        return ModelSpec::dependence_model(std::move(*a.dep), text);
    }
    throw std::invalid_argument("model spec: expected null-<uniform|square|mix-uniform-square> "
                                "or alt:<alternative spec>, got \"" + text + "\"");
}

// ---- manifests ----

std::string iso_timestamp() {
    std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_text_file(const std::string& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw csv_error("cannot open " + path + " for writing");
    out << body;
    if (!out) throw csv_error("write failed: " + path);
}

// every output CSV points back to the manifest that produced it; re-running
// the recorded config reproduces the CSV bytes (the timestamp lives only here)
void write_manifest(const std::string& path, const std::string& subcommand, const json& config,
                    const std::vector<std::string>& outputs, std::uint64_t seed) {
    json m;
    m["subcommand"] = subcommand;
    m["config"] = config;
    m["inputs"] = json::array();
    m["outputs"] = outputs;
    m["seed"] = seed;
    m["timestamp"] = iso_timestamp();
    m["version"] = kVersion;
    write_text_file(path, m.dump(2) + "\n");
}

// ---- shared helpers ----

// rejection score: large values are evidence against the null
double score_of(StatKind k, double v) {
    switch (k) {
        case StatKind::linear:
        case StatKind::maxima: return std::fabs(v);
        case StatKind::cross_prob: return std::fabs(v - 5.0 / 6.0);
        default: return v;  // sup statistics
    }
}

const char* rejection_name(StatKind k) {
    switch (k) {
        case StatKind::linear:
        case StatKind::maxima: return "two-sided in the statistic";
        case StatKind::cross_prob: return "two-sided around 5/6";
        default: return "upper tail";
    }
}

double kth_largest(std::vector<double> sorted_asc, double level) {
    long r = static_cast<long>(sorted_asc.size());
    long k = static_cast<long>(std::ceil(level * static_cast<double>(r)));
    k = std::clamp(k, 1L, r);
    return sorted_asc[static_cast<size_t>(r - k)];
}

// ---- test ----

struct TestOpts {
    std::string data, statistic, alt;
    int reps = 10000;
    std::uint64_t seed = 1;
    double level = 0.05;
};

int cmd_test(const TestOpts& o) {
    if (!(o.level > 0.0 && o.level < 1.0))
        throw std::invalid_argument("--level must be strictly between 0 and 1");
    StatKind stat = stat_kind_from(o.statistic);

    LabeledSample raw = read_pairs_csv_file(o.data);
    if (raw.n() < 2) throw csv_error(o.data + ": need at least 2 pairs");

    // data outside [0,1] is affinely mapped onto it by the pooled range;
    // rank statistics are unchanged, directions apply to the mapped values
    double lo = raw.pairs[0].first, hi = lo;
    for (auto [a, b] : raw.pairs) {
        lo = std::min({lo, a, b});
        hi = std::max({hi, a, b});
    }
    bool rescaled = lo < 0.0 || hi > 1.0;
    if (rescaled) {
        if (!(hi > lo)) throw csv_error(o.data + ": all values identical, nothing to test");
        for (auto& [a, b] : raw.pairs) {
            a = (a - lo) / (hi - lo);
            b = (b - lo) / (hi - lo);
        }
    }
    ColourBlindSample data = blind(raw);
    int n = data.n();

    std::optional<EqualityAlternative> dir;
    if (!o.alt.empty()) {
        AltSpec a = parse_alt_spec(o.alt);
        if (!a.eq)
            throw std::invalid_argument("--alt: the test direction must be an equality alternative");
        dir = std::move(*a.eq);
    }

    double observed = 0.0;
    std::vector<double> null_values(o.reps);
    std::string null_model;
    std::function<double(double)> alpha;
    switch (stat) {
        case StatKind::ks_sym:
        case StatKind::cross_prob: {
            // rank-based, distribution-free: any continuous null works
            observed = stat == StatKind::ks_sym ? ks_colour_blind(data) : cross_probability(data);
            SimConfig cfg;
            cfg.stat = stat;
            cfg.n = n;
            cfg.reps = o.reps;
            cfg.seed = o.seed;
            cfg.model = ModelSpec::null_model(uniform_dist());
            null_values = simulate(cfg).values;
            null_model = "null-uniform (distribution-free)";
            break;
        }
        case StatKind::linear:
        case StatKind::maxima: {
            if (!dir)
                throw std::invalid_argument("--statistic " + o.statistic +
                                            " needs a direction: pass --alt");
            if (stat == StatKind::maxima) alpha = q_direction(*dir);
            observed = stat == StatKind::linear ? optimal_linear_stat(data, *dir)
                                                : maxima_stat(data, alpha);
            // not distribution-free: resample pairs from the pooled values
            const auto& pool = data.pooled;
            auto draw = [&pool](philox4x32& rng) {
                auto i = static_cast<size_t>(rng.next_double() * static_cast<double>(pool.size()));
                return pool[std::min(i, pool.size() - 1)];
            };
            for (int r = 0; r < o.reps; ++r) {
                philox4x32 rng(o.seed, static_cast<std::uint64_t>(r));
                LabeledSample ls;
                ls.pairs.resize(static_cast<size_t>(n));
                for (auto& p : ls.pairs) p = {draw(rng), draw(rng)};
                ColourBlindSample cb = blind(ls);
                null_values[static_cast<size_t>(r)] =
                    stat == StatKind::linear ? optimal_linear_stat(cb, *dir) : maxima_stat(cb, alpha);
            }
            null_model = "pooled resampling";
            break;
        }
        default:
            throw std::invalid_argument("--statistic " + o.statistic +
                                        " needs labeled pairs; the data has none");
    }

    std::vector<double> scores(null_values.size());
    for (size_t i = 0; i < scores.size(); ++i) scores[i] = score_of(stat, null_values[i]);
    std::sort(scores.begin(), scores.end());
    double obs_score = score_of(stat, observed);
    auto ge = scores.end() - std::lower_bound(scores.begin(), scores.end(), obs_score);

    TestReport rep;
    rep.statistic = o.statistic;
    rep.observed = observed;
    rep.p_value = (1.0 + static_cast<double>(ge)) / (static_cast<double>(o.reps) + 1.0);
    for (double lvl : {0.10, 0.05, 0.01}) rep.critical_values[lvl] = kth_largest(scores, lvl);
    rep.replications = o.reps;
    rep.seed = o.seed;
    rep.n = n;

    json j;
    j["statistic"] = rep.statistic;
    j["n"] = rep.n;
    j["observed"] = rep.observed;
    j["p_value"] = rep.p_value;
    j["critical_values"] = {{"0.10", rep.critical_values[0.10]},
                            {"0.05", rep.critical_values[0.05]},
                            {"0.01", rep.critical_values[0.01]}};
    j["level"] = o.level;
    j["reject"] = obs_score > kth_largest(scores, o.level);
    j["rejection"] = rejection_name(stat);
    j["null_model"] = null_model;
    j["replications"] = rep.replications;
    j["seed"] = rep.seed;
    j["rescaled"] = rescaled;
    if (rescaled) j["rescale_map"] = {{"min", lo}, {"max", hi}, {"to", "(t - min)/(max - min)"}};
    if (!o.alt.empty()) j["alt"] = o.alt;
    std::cout << j.dump(2) << "\n";
    return 0;
}

// ---- simulate ----

struct SimulateOpts {
    std::string statistic, model, alt, out;
    int n = 0;
    int reps = 10000;
    std::uint64_t seed = 1;
};

int cmd_simulate(const SimulateOpts& o) {
    SimConfig cfg;
    cfg.stat = stat_kind_from(o.statistic);
    cfg.model = parse_model_spec(o.model);
    cfg.n = o.n;
    cfg.reps = o.reps;
    cfg.seed = o.seed;
    if (!o.alt.empty()) {
        AltSpec a = parse_alt_spec(o.alt);
        if (!a.eq)
            throw std::invalid_argument("--alt: the direction must be an equality alternative");
        cfg.direction = std::move(*a.eq);
    }
    validate(cfg);

    EcdfTable table = simulate(cfg);
    std::ostringstream body;
    write_csv(table, body);
    write_text_file(o.out, body.str());

    json config = {{"statistic", o.statistic}, {"model", o.model}, {"n", o.n},
                   {"reps", o.reps},           {"seed", o.seed}};
    if (!o.alt.empty()) config["alt"] = o.alt;
    write_manifest(o.out + ".manifest.json", "simulate", config, {o.out}, o.seed);

    std::cout << "wrote " << o.out << " (statistic=" << o.statistic << ", model=" << o.model
              << ", n=" << o.n << ", reps=" << o.reps << ", seed=" << o.seed << ")\n";
    return 0;
}

// ---- snr ----

struct SnrOpts {
    std::string alt, variant = "linear";
    int n = 0;
};

int cmd_snr(const SnrOpts& o) {
    AltSpec a = parse_alt_spec(o.alt);
    if (!a.eq)
        throw std::invalid_argument("snr: the alternative must be of kind \"equality\"");
    const EqualityAlternative& alt = *a.eq;
    double rootn = std::sqrt(static_cast<double>(o.n));
    double eps2 = alt.epsilon * alt.epsilon;

    json j;
    j["variant"] = o.variant;
    j["n"] = o.n;
    j["epsilon"] = alt.epsilon;
    j["alt"] = a.label;
    if (o.variant == "linear") {
        auto rule = QuadratureRule::fixed();
        double norm_sq = quad([&](double x) { return alt.h(x) * alt.h(x) * alt.base.density(x); },
                              0.0, 1.0, rule);
        double T = rootn * eps2 * norm_sq;
        j["snr"] = T;
        j["shift"] = -T * norm_sq;          // statistic mean under the alternative
        j["variance"] = norm_sq * norm_sq;  // statistic variance under the null
        j["tv_power"] = tv_power(T);
    } else if (o.variant == "maxima") {
        std::function<double(double)> alpha = q_direction(alt);
        MaximaSnr s = snr_maxima(alpha, alt, o.n);
        j["snr"] = s.snr;
        j["shift"] = -rootn * eps2 * s.shift_rate;
        j["shift_rate"] = s.shift_rate;
        j["variance"] = s.variance;
        j["variance_direct"] = s.variance_direct;
        j["tv_power"] = tv_power(std::fabs(s.snr));
        ConeResult cone = cone_membership(alpha, alt.base);
        j["cone"] = {{"is_member", cone.is_member},
                     {"min_running_integral", cone.min_running_integral}};
    } else {
        throw std::invalid_argument("--variant must be linear or maxima");
    }
    std::cout << j.dump(2) << "\n";
    return 0;
}

// ---- figures ----

struct FiguresOpts {
    std::string out;
    std::uint64_t seed = 1;
    int reps = 10000;
    int grid = 201;
};

void write_curves_csv(const std::string& path,
                      const std::vector<std::pair<std::string, const EcdfTable*>>& curves) {
    std::ostringstream body;
    body << "curve,value,probability\n";
    for (const auto& [name, table] : curves) {
        double r = static_cast<double>(table->values.size());
        for (size_t i = 0; i < table->values.size(); ++i)
            body << name << ',' << format_double(table->values[i]) << ','
                 << format_double(static_cast<double>(i + 1) / r) << '\n';
    }
    write_text_file(path, body.str());
}

int cmd_figures(const FiguresOpts& o) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(o.out, ec);
    if (ec) throw csv_error("cannot create directory " + o.out + ": " + ec.message());
    auto at = [&o](const char* name) { return (fs::path(o.out) / name).string(); };

    // three bounding curves relating the pair (x, x^2) to its blind mixture
    {
        DistributionSpec p1 = uniform_dist(), p2 = square_dist();
        std::ostringstream body;
        body << "x,lower,middle,upper\n";
        for (int i = 0; i < o.grid; ++i) {
            double x = static_cast<double>(i) / static_cast<double>(o.grid - 1);
            Chain c = inequality_chain(p1, p2, x);
            body << format_double(x) << ',' << format_double(c.lo) << ',' << format_double(c.mid)
                 << ',' << format_double(c.hi) << '\n';
        }
        write_text_file(at("fig1.csv"), body.str());
        write_manifest(at("fig1.csv.manifest.json"), "figures",
                       {{"figure", "fig1"}, {"grid", o.grid}, {"pair", "uniform-vs-square"}},
                       {at("fig1.csv")}, o.seed);
    }

    ModelSpec null_uniform = ModelSpec::null_model(uniform_dist());
    ModelSpec alt_model = ModelSpec::equality_model(uniform_vs_square_alt(), "alt:uniform-vs-square");
    auto run = [&o](StatKind stat, const ModelSpec& model, int n, std::uint64_t seed) {
        SimConfig cfg;
        cfg.stat = stat;
        cfg.model = model;
        cfg.n = n;
        cfg.reps = o.reps;
        cfg.seed = seed;
        return simulate(cfg);
    };
    json base = {{"reps", o.reps}, {"seed", o.seed}, {"alt", "uniform-vs-square"}};

    // null sampling distributions of both sup statistics, n = 1000
    {
        EcdfTable sym = run(StatKind::ks_sym, null_uniform, 1000, o.seed);
        EcdfTable full = run(StatKind::ks_full, null_uniform, 1000, o.seed + 1);
        write_curves_csv(at("fig3.csv"), {{"ks-sym-null", &sym}, {"ks-full-null", &full}});
        json cfg = base;
        cfg["figure"] = "fig3";
        cfg["n"] = 1000;
        write_manifest(at("fig3.csv.manifest.json"), "figures", cfg, {at("fig3.csv")}, o.seed);
    }
    // blind sup statistic under null vs alternative, n = 500
    {
        EcdfTable nul = run(StatKind::ks_sym, null_uniform, 500, o.seed + 2);
        EcdfTable alt = run(StatKind::ks_sym, alt_model, 500, o.seed + 3);
        write_curves_csv(at("fig4.csv"), {{"ks-sym-null", &nul}, {"ks-sym-alt", &alt}});
        json cfg = base;
        cfg["figure"] = "fig4";
        cfg["n"] = 500;
        write_manifest(at("fig4.csv.manifest.json"), "figures", cfg, {at("fig4.csv")}, o.seed);
    }
    // labeled sup statistic under null vs alternative, n = 500
    {
        EcdfTable nul = run(StatKind::ks_full, null_uniform, 500, o.seed + 4);
        EcdfTable alt = run(StatKind::ks_full, alt_model, 500, o.seed + 5);
        write_curves_csv(at("fig5.csv"), {{"ks-full-null", &nul}, {"ks-full-alt", &alt}});
        json cfg = base;
        cfg["figure"] = "fig5";
        cfg["n"] = 500;
        write_manifest(at("fig5.csv.manifest.json"), "figures", cfg, {at("fig5.csv")}, o.seed);
    }

    std::cout << "wrote fig1.csv fig3.csv fig4.csv fig5.csv to " << o.out << " (reps=" << o.reps
              << ", seed=" << o.seed << ")\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"two-sample tests for measurement pairs observed as (max, min) only"};
    app.require_subcommand(1);

    TestOpts to;
    auto* test = app.add_subcommand("test", "test a CSV of measurement pairs for equality");
    test->add_option("data", to.data, "CSV file, two numeric columns per row")->required();
    test->add_option("--statistic", to.statistic, "ks-sym | linear | maxima | cross-prob")
        ->required()
        ->check(CLI::IsMember({"ks-sym", "linear", "maxima", "cross-prob"}));
    test->add_option("--alt", to.alt, "direction spec (required for linear/maxima)");
    test->add_option("--reps", to.reps, "null replications")->check(CLI::PositiveNumber);
    test->add_option("--seed", to.seed, "master seed");
    test->add_option("--level", to.level, "rejection level for the reject field");

    SimulateOpts so;
    auto* sim = app.add_subcommand("simulate", "simulate a statistic's sampling distribution");
    sim->add_option("--statistic", so.statistic, "ks-sym | ks-full | linear | maxima | cross-prob")
        ->required()
        ->check(CLI::IsMember({"ks-sym", "ks-full", "linear", "maxima", "cross-prob"}));
    sim->add_option("--model", so.model, "null-<distribution> or alt:<alternative spec>")
        ->required();
    sim->add_option("--alt", so.alt, "direction spec for linear/maxima");
    sim->add_option("--n", so.n, "pairs per replicate")->required()->check(CLI::PositiveNumber);
    sim->add_option("--reps", so.reps, "replications")->check(CLI::PositiveNumber);
    sim->add_option("--seed", so.seed, "master seed");
    sim->add_option("--out", so.out, "output CSV path")->required();

    SnrOpts no;
    auto* snr = app.add_subcommand("snr", "signal-to-noise ratio and power bound");
    snr->add_option("--alt", no.alt, "alternative spec")->required();
    snr->add_option("--n", no.n, "sample size")->required()->check(CLI::PositiveNumber);
    snr->add_option("--variant", no.variant, "linear | maxima")
        ->check(CLI::IsMember({"linear", "maxima"}));

    FiguresOpts fo;
    auto* fig = app.add_subcommand("figures", "emit the reference curve CSVs");
    fig->add_option("--out", fo.out, "output directory")->required();
    fig->add_option("--seed", fo.seed, "master seed");
    fig->add_option("--reps", fo.reps, "replications per curve")->check(CLI::PositiveNumber);
    fig->add_option("--grid", fo.grid, "points for the bounding-curve figure")
        ->check(CLI::Range(2, 100001));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*test) return cmd_test(to);
        if (*sim) return cmd_simulate(so);
        if (*snr) return cmd_snr(no);
        return cmd_figures(fo);
    } catch (const csv_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const expr_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
}
