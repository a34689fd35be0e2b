#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cbtest/alternatives.hpp"
#include "cbtest/distribution.hpp"

namespace cbtest {

enum class StatKind { ks_sym, ks_full, linear, maxima, cross_prob };

std::string to_string(StatKind k);
StatKind stat_kind_from(const std::string& name);  // throws std::invalid_argument

struct ModelSpec {
    enum class Kind { null_q, equality, dependence };
    Kind kind = Kind::null_q;
    DistributionSpec q;  // null model only
    std::optional<EqualityAlternative> eq;
    std::optional<DependenceAlternative> dep;
    std::string label;  // resolved textual form, echoed in manifests

    static ModelSpec null_model(DistributionSpec q);
    static ModelSpec equality_model(EqualityAlternative alt, std::string label);
    static ModelSpec dependence_model(DependenceAlternative alt, std::string label);
};

struct SimConfig {
    StatKind stat = StatKind::ks_sym;
    int n = 0;
    int reps = 0;
    std::uint64_t seed = 0;
    ModelSpec model;
    // direction for linear/maxima; falls back to the model's own alternative
    std::optional<EqualityAlternative> direction;
    int workers = 0;  // 0 = hardware; always capped by env CBTEST_THREADS
};

// reps in [1, 1e6], n >= 1, linear/maxima must be able to resolve a
// direction; throws std::invalid_argument before any work
void validate(const SimConfig& cfg);

struct EcdfTable {
    std::vector<double> values;  // sorted ascending, one per replicate
    SimConfig config;

    double ecdf(double t) const;  // fraction of values <= t
};

// Replicate r draws from a generator keyed (seed, r), so the result is
// bitwise identical for any worker count or schedule.
EcdfTable simulate(const SimConfig& cfg);

// the k-th largest simulated value with k = ceil(level * R)
double critical_value(const EcdfTable& t, double level);

// (1 + #{simulated >= observed}) / (R + 1)
double p_value(const EcdfTable& t, double observed);

enum class Rejection { by_kind, two_sided, upper, lower };

// fraction of alternative draws beyond the null critical value at `level`;
// rejection regions: upper tail for sup statistics, |value| for linear and
// maxima (sign-aware one-sided available), |value - 5/6| for cross-prob
double power(const SimConfig& null_cfg, const SimConfig& alt_cfg, double level,
             Rejection side = Rejection::by_kind);

// header "value,probability", probabilities k/R
void write_csv(const EcdfTable& t, std::ostream& out);

}  // namespace cbtest
