// End-to-end tests for the cbtest command-line tool. The binary under test is
// passed as argv[1]; every case spawns it through the shell and inspects exit
// codes, stdout JSON, and the files it writes.

#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string g_cli;
fs::path g_scratch;

// ---- process helpers ----

std::string shq(const std::string& s) {
    std::string out = "'";
    for (char c : s)
        if (c == '\'')
            out += "'\\''";
        else
            out += c;
    return out + "'";
}

struct cli_result {
    int code = -1;
    std::string out;  // stdout and stderr, merged
};

cli_result run_cli(const std::string& args, const std::string& env = "") {
    std::string cmd;
    if (!env.empty()) cmd += env + " ";
    cmd += shq(g_cli) + " " + args + " 2>&1";
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    cli_result r;
    char buf[4096];
    size_t got;
    while ((got = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, got);
    int st = pclose(p);
    r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return r;
}

// ---- file helpers ----

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) out.push_back(line);
    return out;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream in(line);
    std::string field;
    while (std::getline(in, field, ',')) out.push_back(field);
    return out;
}

void write_pairs(const fs::path& p, const std::vector<std::pair<double, double>>& pairs,
                 const char* header = nullptr) {
    std::ofstream out(p);
    REQUIRE(out.good());
    out << std::setprecision(17);
    if (header) out << header << "\n";
    for (auto [a, b] : pairs) out << a << "," << b << "\n";
}

std::vector<std::pair<double, double>> uniform_pairs(int n, unsigned seed) {
    std::mt19937 gen(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<std::pair<double, double>> out(static_cast<size_t>(n));
    for (auto& p : out) p = {u(gen), u(gen)};
    return out;
}

// one coordinate uniform, the other with CDF x^2: a genuinely unequal pair
std::vector<std::pair<double, double>> square_alt_pairs(int n, unsigned seed) {
    std::mt19937 gen(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<std::pair<double, double>> out(static_cast<size_t>(n));
    for (auto& p : out) p = {u(gen), std::sqrt(u(gen))};
    return out;
}

std::vector<double> curve_values(const std::string& csv_text, const std::string& curve) {
    std::vector<double> out;
    for (const auto& line : lines_of(csv_text)) {
        auto f = split_csv(line);
        if (f.size() == 3 && f[0] == curve) out.push_back(std::stod(f[1]));
    }
    return out;
}

double mean_of(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

// ---- usage ----

TEST_CASE("help exits zero and lists the subcommands") {
    cli_result r = run_cli("--help");
    CHECK(r.code == 0);
    CHECK(r.out.find("test") != std::string::npos);
    CHECK(r.out.find("simulate") != std::string::npos);
    CHECK(r.out.find("snr") != std::string::npos);
    CHECK(r.out.find("figures") != std::string::npos);
    CHECK(run_cli("test --help").code == 0);
}

TEST_CASE("missing or unknown subcommands exit 2") {
    CHECK(run_cli("").code == 2);
    CHECK(run_cli("frobnicate").code == 2);
}

TEST_CASE("configuration errors exit 2") {
    fs::path good = g_scratch / "good.csv";
    write_pairs(good, uniform_pairs(5, 1));
    std::string data = shq(good.string());

    // the labeled statistic is not available for colour-blind data files
    CHECK(run_cli("test " + data + " --statistic ks-full").code == 2);

    cli_result no_dir = run_cli("test " + data + " --statistic linear --reps 10");
    CHECK(no_dir.code == 2);
    CHECK(no_dir.out.find("direction") != std::string::npos);

    CHECK(run_cli("test " + data + " --statistic linear --reps 10 --alt " +
                  shq("{\"kind\":\"equality\""))
              .code == 2);
    cli_result bad_expr = run_cli(
        "test " + data + " --statistic linear --reps 10 --alt " +
        shq("{\"kind\":\"equality\",\"h\":\"x@2\",\"epsilon\":0.5}"));
    CHECK(bad_expr.code == 2);
    CHECK(bad_expr.out.find("position") != std::string::npos);
    // epsilon so large the perturbed density goes negative
    CHECK(run_cli("test " + data + " --statistic linear --reps 10 --alt " +
                  shq("{\"kind\":\"equality\",\"h\":\"x-0.5\",\"epsilon\":9}"))
              .code == 2);
    CHECK(run_cli("test " + data + " --statistic ks-sym --reps 10 --level 1.5").code == 2);

    CHECK(run_cli("simulate --statistic linear --model null-uniform --n 20 --reps 10 --out " +
                  shq((g_scratch / "never.csv").string()))
              .code == 2);
    CHECK(run_cli("simulate --statistic ks-sym --model gauss --n 20 --reps 10 --out " +
                  shq((g_scratch / "never.csv").string()))
              .code == 2);
    CHECK(run_cli("snr --alt uniform-vs-square --n 400 --variant quadratic").code == 2);
    // a dependence alternative carries no direction h for the linear statistic
    CHECK(run_cli("snr --alt " +
                  shq("{\"kind\":\"dependence\",\"g\":\"(2*x-1)*(2*y-1)\",\"epsilon\":0.8}") +
                  " --n 100")
              .code == 2);
}

TEST_CASE("data errors exit 3") {
    CHECK(run_cli("test " + shq((g_scratch / "missing.csv").string()) + " --statistic ks-sym")
              .code == 3);

    fs::path empty = g_scratch / "empty.csv";
    std::ofstream(empty).close();
    CHECK(run_cli("test " + shq(empty.string()) + " --statistic ks-sym").code == 3);

    fs::path bad = g_scratch / "bad.csv";
    std::ofstream(bad) << "0.1,0.2\nfoo,bar\n";
    cli_result r = run_cli("test " + shq(bad.string()) + " --statistic ks-sym");
    CHECK(r.code == 3);
    CHECK(r.out.find(":2") != std::string::npos);  // offending line number

    fs::path one = g_scratch / "one.csv";
    std::ofstream(one) << "0.1,0.2\n";
    CHECK(run_cli("test " + shq(one.string()) + " --statistic ks-sym").code == 3);

    fs::path constant = g_scratch / "constant.csv";
    std::ofstream(constant) << "5,5\n5,5\n";
    CHECK(run_cli("test " + shq(constant.string()) + " --statistic ks-sym").code == 3);
}

TEST_CASE("numerical failures exit 4") {
    // h = 0 is a valid alternative spec but a degenerate maxima direction
    cli_result r = run_cli("snr --alt " + shq("{\"kind\":\"equality\",\"h\":\"0\",\"epsilon\":0.5}") +
                           " --n 400 --variant maxima");
    CHECK(r.code == 4);
}

// ---- test subcommand ----

TEST_CASE("cross-prob test on null data reports a full calibrated report") {
    fs::path data = g_scratch / "null2000.csv";
    write_pairs(data, uniform_pairs(2000, 42));
    std::string args = "test " + shq(data.string()) + " --statistic cross-prob --reps 2000 --seed 7";

    cli_result r = run_cli(args);
    REQUIRE(r.code == 0);
    json j = json::parse(r.out);
    CHECK(j.at("statistic") == "cross-prob");
    CHECK(j.at("n") == 2000);
    CHECK(j.at("observed").get<double>() == doctest::Approx(5.0 / 6.0).epsilon(0.025));
    double p = j.at("p_value").get<double>();
    CHECK(p > 0.0);
    CHECK(p <= 1.0);
    // critical values live in score space (distance from 5/6), so they widen
    // as the level drops
    double c10 = j.at("critical_values").at("0.10").get<double>();
    double c05 = j.at("critical_values").at("0.05").get<double>();
    double c01 = j.at("critical_values").at("0.01").get<double>();
    CHECK(c10 <= c05);
    CHECK(c05 <= c01);
    CHECK(j.at("reject").get<bool>() == (p < 0.05));
    CHECK(j.at("rejection") == "two-sided around 5/6");
    CHECK(j.at("null_model").get<std::string>().find("distribution-free") != std::string::npos);
    CHECK(j.at("replications") == 2000);
    CHECK(j.at("seed") == 7);
    CHECK(j.at("rescaled") == false);

    CHECK(run_cli(args).out == r.out);  // same flags, same seed, same report
}

TEST_CASE("header rows in the data file are auto-detected") {
    fs::path data = g_scratch / "with_header.csv";
    write_pairs(data, uniform_pairs(10, 3), "left,right");
    cli_result r = run_cli("test " + shq(data.string()) + " --statistic cross-prob --reps 50");
    REQUIRE(r.code == 0);
    CHECK(json::parse(r.out).at("n") == 10);
}

TEST_CASE("linear test detects a genuine alternative") {
    fs::path data = g_scratch / "alt400.csv";
    write_pairs(data, square_alt_pairs(400, 11));

    cli_result r = run_cli("test " + shq(data.string()) +
                           " --statistic linear --alt uniform-vs-square --reps 2000 --seed 3");
    REQUIRE(r.code == 0);
    json j = json::parse(r.out);
    CHECK(j.at("observed").get<double>() < 0.0);  // the alternative shifts the statistic down
    CHECK(j.at("p_value").get<double>() < 0.2);
    CHECK(j.at("alt") == "uniform-vs-square");
    CHECK(j.at("null_model") == "pooled resampling");
    CHECK(j.at("rejection") == "two-sided in the statistic");

    cli_result m = run_cli("test " + shq(data.string()) +
                           " --statistic maxima --alt uniform-vs-square --reps 1000 --seed 3");
    REQUIRE(m.code == 0);
    json jm = json::parse(m.out);
    CHECK(jm.at("p_value").get<double>() > 0.0);
    CHECK(jm.at("p_value").get<double>() <= 1.0);
}

TEST_CASE("rank statistics are unaffected by affine rescaling of the data") {
    auto pairs = uniform_pairs(200, 5);
    fs::path raw = g_scratch / "raw.csv";
    write_pairs(raw, pairs);
    for (auto& [a, b] : pairs) {
        a = 40.0 * a - 10.0;
        b = 40.0 * b - 10.0;
    }
    fs::path scaled = g_scratch / "scaled.csv";
    write_pairs(scaled, pairs);

    cli_result r0 = run_cli("test " + shq(raw.string()) + " --statistic ks-sym --reps 500 --seed 9");
    cli_result r1 =
        run_cli("test " + shq(scaled.string()) + " --statistic ks-sym --reps 500 --seed 9");
    REQUIRE(r0.code == 0);
    REQUIRE(r1.code == 0);
    json j0 = json::parse(r0.out), j1 = json::parse(r1.out);
    CHECK(j0.at("rescaled") == false);
    CHECK(j1.at("rescaled") == true);
    CHECK(j1.at("rescale_map").at("max").get<double>() > j1.at("rescale_map").at("min").get<double>());
    CHECK(j1.at("observed").get<double>() ==
          doctest::Approx(j0.at("observed").get<double>()).epsilon(1e-12));
    CHECK(j1.at("p_value").get<double>() == doctest::Approx(j0.at("p_value").get<double>()));
}

// ---- simulate subcommand ----

TEST_CASE("simulate writes a deterministic ECDF csv with a manifest") {
    fs::path a = g_scratch / "a.csv";
    std::string flags = "simulate --statistic ks-sym --model null-uniform --n 40 --reps 100 --seed 5";
    cli_result r = run_cli(flags + " --out " + shq(a.string()));
    REQUIRE(r.code == 0);
    CHECK(r.out.find("wrote") != std::string::npos);

    std::string body = slurp(a);
    auto lines = lines_of(body);
    REQUIRE(lines.size() == 101);
    CHECK(lines[0] == "value,probability");
    CHECK(split_csv(lines[1]).at(1) == "0.01");
    CHECK(split_csv(lines[100]).at(1) == "1");
    double prev = -1.0;
    for (size_t i = 1; i < lines.size(); ++i) {
        double v = std::stod(split_csv(lines[i]).at(0));
        CHECK(v >= prev);
        prev = v;
    }

    fs::path b = g_scratch / "b.csv";
    run_cli(flags + " --out " + shq(b.string()));
    CHECK(slurp(b) == body);
    fs::path c = g_scratch / "c.csv";
    run_cli("simulate --statistic ks-sym --model null-uniform --n 40 --reps 100 --seed 6 --out " +
            shq(c.string()));
    CHECK(slurp(c) != body);

    // worker count must not leak into the bytes
    fs::path d = g_scratch / "d.csv";
    run_cli(flags + " --out " + shq(d.string()), "CBTEST_THREADS=1");
    CHECK(slurp(d) == body);
    fs::path e = g_scratch / "e.csv";
    run_cli(flags + " --out " + shq(e.string()), "CBTEST_THREADS=7");
    CHECK(slurp(e) == body);

    json m = json::parse(slurp(a.string() + ".manifest.json"));
    CHECK(m.at("subcommand") == "simulate");
    CHECK(m.at("config").at("statistic") == "ks-sym");
    CHECK(m.at("config").at("model") == "null-uniform");
    CHECK(m.at("config").at("n") == 40);
    CHECK(m.at("config").at("reps") == 100);
    CHECK(m.at("config").at("seed") == 5);
    CHECK(m.at("inputs").empty());
    CHECK(m.at("outputs").at(0) == a.string());
    CHECK(m.at("seed") == 5);
    CHECK(m.at("version") == "0.1.0");
    CHECK(m.at("timestamp").get<std::string>().size() == 20);

    // replaying the manifest config reproduces the csv byte for byte
    fs::path f = g_scratch / "f.csv";
    std::ostringstream replay;
    replay << "simulate --statistic " << m.at("config").at("statistic").get<std::string>()
           << " --model " << shq(m.at("config").at("model").get<std::string>()) << " --n "
           << m.at("config").at("n").get<int>() << " --reps " << m.at("config").at("reps").get<int>()
           << " --seed " << m.at("config").at("seed").get<std::uint64_t>() << " --out "
           << shq(f.string());
    REQUIRE(run_cli(replay.str()).code == 0);
    CHECK(slurp(f) == body);
}

TEST_CASE("simulate with one replication emits a two-line csv") {
    fs::path out = g_scratch / "single.csv";
    REQUIRE(run_cli("simulate --statistic cross-prob --model null-uniform --n 25 --reps 1 --seed 2 "
                    "--out " +
                    shq(out.string()))
                .code == 0);
    auto lines = lines_of(slurp(out));
    REQUIRE(lines.size() == 2);
    CHECK(lines[0] == "value,probability");
    CHECK(split_csv(lines[1]).at(1) == "1");
}

TEST_CASE("simulate accepts every model spec form") {
    fs::path alt_json = g_scratch / "alt.json";
    std::ofstream(alt_json) << "{\"kind\":\"equality\",\"q\":\"uniform\",\"h\":\"2*x-1\","
                               "\"epsilon\":0.5}\n";
    fs::path g = g_scratch / "g.csv";
    REQUIRE(run_cli("simulate --statistic linear --model null-uniform --alt @" +
                    shq(alt_json.string()) + " --n 30 --reps 20 --seed 2 --out " + shq(g.string()))
                .code == 0);
    CHECK(lines_of(slurp(g)).size() == 21);

    fs::path h1 = g_scratch / "h1.csv";
    CHECK(run_cli("simulate --statistic ks-sym --model " +
                  shq("alt:{\"kind\":\"dependence\",\"g\":\"(2*x-1)*(2*y-1)\",\"epsilon\":0.8}") +
                  " --n 30 --reps 20 --seed 2 --out " + shq(h1.string()))
              .code == 0);

    // linear against the model's own alternative: the direction falls back
    fs::path i = g_scratch / "i.csv";
    CHECK(run_cli("simulate --statistic maxima --model alt:uniform-vs-square --n 30 --reps 20 "
                  "--seed 2 --out " +
                  shq(i.string()))
              .code == 0);

    fs::path m = g_scratch / "m.csv";
    CHECK(run_cli("simulate --statistic cross-prob --model null-mix-uniform-square --n 25 "
                  "--reps 10 --seed 2 --out " +
                  shq(m.string()))
              .code == 0);
}

// ---- snr subcommand ----

TEST_CASE("snr linear reports the closed-form detectability numbers") {
    cli_result r = run_cli("snr --alt uniform-vs-square --n 400");
    REQUIRE(r.code == 0);
    json j = json::parse(r.out);
    double norm_sq = std::log(3.0) - 1.0;  // |h|^2 under the mixture base
    CHECK(j.at("variant") == "linear");
    CHECK(j.at("n") == 400);
    CHECK(j.at("epsilon") == 1.0);
    CHECK(j.at("snr").get<double>() == doctest::Approx(20.0 * norm_sq).epsilon(1e-9));
    CHECK(j.at("variance").get<double>() == doctest::Approx(norm_sq * norm_sq).epsilon(1e-9));
    CHECK(j.at("shift").get<double>() ==
          doctest::Approx(-20.0 * norm_sq * norm_sq).epsilon(1e-9));
    CHECK(j.at("tv_power").get<double>() == doctest::Approx(0.675927185972145).epsilon(1e-9));
}

TEST_CASE("snr maxima reports variance, shift, and cone membership") {
    cli_result r = run_cli("snr --alt uniform-vs-square --n 400 --variant maxima");
    REQUIRE(r.code == 0);
    json j = json::parse(r.out);
    CHECK(j.at("snr").get<double>() == doctest::Approx(1.7363540773).epsilon(1e-6));
    CHECK(j.at("variance").get<double>() == doctest::Approx(0.0030207276685).epsilon(1e-6));
    CHECK(j.at("variance_direct").get<double>() ==
          doctest::Approx(j.at("variance").get<double>()).epsilon(1e-6));
    CHECK(j.at("tv_power").get<double>() == doctest::Approx(0.6147025778).epsilon(1e-6));
    double rate = j.at("shift_rate").get<double>();
    CHECK(rate > 0.0);
    CHECK(j.at("shift").get<double>() == doctest::Approx(-20.0 * rate).epsilon(1e-12));
    CHECK(j.at("cone").at("is_member") == true);
    CHECK(j.at("cone").at("min_running_integral").get<double>() >= -1e-12);
}

TEST_CASE("snr with epsilon zero reports zero signal") {
    cli_result r = run_cli("snr --alt " +
                           shq("{\"kind\":\"equality\",\"h\":\"2*x-1\",\"epsilon\":0}") + " --n 400");
    REQUIRE(r.code == 0);
    json j = json::parse(r.out);
    CHECK(j.at("snr").get<double>() == 0.0);
    CHECK(j.at("shift").get<double>() == 0.0);
    CHECK(j.at("tv_power").get<double>() == 0.0);
}

// ---- figures subcommand ----

TEST_CASE("figures emit the reference curves with manifests") {
    fs::path dir = g_scratch / "figs";
    cli_result r =
        run_cli("figures --out " + shq(dir.string()) + " --reps 60 --grid 11 --seed 9");
    REQUIRE(r.code == 0);
    CHECK(r.out.find("fig1.csv") != std::string::npos);

    // bounding curves: exact closed-form values on the grid
    auto fig1 = lines_of(slurp(dir / "fig1.csv"));
    REQUIRE(fig1.size() == 12);
    CHECK(fig1[0] == "x,lower,middle,upper");
    bool saw_half = false;
    for (size_t i = 1; i < fig1.size(); ++i) {
        auto f = split_csv(fig1[i]);
        REQUIRE(f.size() == 4);
        double lo = std::stod(f[1]), mid = std::stod(f[2]), hi = std::stod(f[3]);
        CHECK(lo <= mid + 1e-12);
        CHECK(mid <= hi + 1e-12);
        if (std::stod(f[0]) == 0.5) {
            saw_half = true;
            CHECK(lo == doctest::Approx(0.125).epsilon(1e-12));
            CHECK(mid == doctest::Approx(0.140625).epsilon(1e-12));
            CHECK(hi == doctest::Approx(0.150255128608411).epsilon(1e-12));
        }
    }
    CHECK(saw_half);
    auto first = split_csv(fig1[1]), last = split_csv(fig1[11]);
    CHECK(std::stod(first[0]) == 0.0);
    CHECK(std::stod(first[3]) == doctest::Approx(0.0));
    CHECK(std::stod(last[0]) == 1.0);
    CHECK(std::stod(last[1]) == doctest::Approx(1.0));

    // null curves: the blind statistic sits well below the labeled one
    std::string fig3 = slurp(dir / "fig3.csv");
    auto sym_null = curve_values(fig3, "ks-sym-null");
    auto full_null = curve_values(fig3, "ks-full-null");
    REQUIRE(sym_null.size() == 60);
    REQUIRE(full_null.size() == 60);
    CHECK(mean_of(sym_null) + 0.1 < mean_of(full_null));

    // under the alternative both statistics shift up, the labeled one by more
    std::string fig4 = slurp(dir / "fig4.csv");
    std::string fig5 = slurp(dir / "fig5.csv");
    double sym_gap = mean_of(curve_values(fig4, "ks-sym-alt")) -
                     mean_of(curve_values(fig4, "ks-sym-null"));
    double full_gap = mean_of(curve_values(fig5, "ks-full-alt")) -
                      mean_of(curve_values(fig5, "ks-full-null"));
    CHECK(sym_gap > 0.0);
    CHECK(full_gap > sym_gap + 0.1);

    for (const char* name : {"fig1.csv", "fig3.csv", "fig4.csv", "fig5.csv"})
        CHECK(fs::exists(dir / (std::string(name) + ".manifest.json")));
    json m4 = json::parse(slurp(dir / "fig4.csv.manifest.json"));
    CHECK(m4.at("config").at("figure") == "fig4");
    CHECK(m4.at("config").at("n") == 500);
    CHECK(m4.at("config").at("reps") == 60);
    CHECK(m4.at("seed") == 9);

    fs::path dir2 = g_scratch / "figs2";
    REQUIRE(run_cli("figures --out " + shq(dir2.string()) + " --reps 60 --grid 11 --seed 9")
                .code == 0);
    CHECK(slurp(dir2 / "fig4.csv") == slurp(dir / "fig4.csv"));
}

int run_all(int argc, char** argv) {
    doctest::Context ctx;
    ctx.applyCommandLine(argc - 1, argv + 1);
    return ctx.run();
}

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: cli_tests <path-to-cbtest-binary> [doctest options]\n");
        return 2;
    }
    g_cli = argv[1];
    g_scratch = fs::temp_directory_path() / ("cbtest-cli-" + std::to_string(::getpid()));
    fs::create_directories(g_scratch);
    int rc = run_all(argc, argv);
    std::error_code ec;
    fs::remove_all(g_scratch, ec);
    return rc;
}
