#pragma once

#include <functional>
#include <optional>

#include "cbtest/distribution.hpp"
#include "cbtest/rng.hpp"
#include "cbtest/samples.hpp"

namespace cbtest {

// Product alternative: X ~ (1 + eps*h) dQ, Y ~ (1 - eps*h) dQ, independent.
// eps stays separate from h so rate experiments can rescale it per n while
// reusing the direction.
struct EqualityAlternative {
    DistributionSpec base;               // Q
    std::function<double(double)> h;     // direction, int h dQ = 0
    double epsilon = 0.0;
    std::function<double(double)> H;     // cached int_0^x h dQ; H(0) = H(1) = 0
    DistributionSpec a1, a2;             // marginals at this epsilon, invertible

    // marginals at eps = 1 when the alternative came from an explicit pair;
    // with_epsilon(1) restores them exactly instead of re-integrating
    std::optional<DistributionSpec> pair_a1, pair_a2;

    EqualityAlternative with_epsilon(double eps) const;
};

// validates: int h dQ = 0 within 1e-8, H(1) = 0, both densities (1 +- eps*h)*q
// nonnegative on a 1001-point grid; throws std::invalid_argument otherwise
EqualityAlternative make_equality_alt(DistributionSpec base, std::function<double(double)> h,
                                      double epsilon);

// symmetric representation of a two-distribution pair: Q = (A1 + A2)/2,
// h = (a1' - a2')/(a1' + a2'), eps = 1, H = (A1 - A2)/2 in closed form
EqualityAlternative direction_from_pair(const DistributionSpec& a1, const DistributionSpec& a2);

// A1 = x, A2 = x^2; the running example with closed forms everywhere
EqualityAlternative uniform_vs_square_alt();

// q = h*H/Q with the removable singularity at 0 closed by q(0) = h(0)^2
std::function<double(double)> q_direction(const EqualityAlternative& alt);

// Bivariate density perturbation (1 + eps*g(x,y)) dQ dQ with both marginal
// integrals of g vanishing; detectable at the 1/sqrt(n) rate.
struct DependenceAlternative {
    DistributionSpec base;
    std::function<double(double, double)> g;
    double epsilon = 0.0;
    std::function<double(double, double)> G;  // int_0^x int_0^y g dQ dQ
    double g_sup = 0.0;                       // grid estimate of sup g, for the envelope
};

DependenceAlternative make_dependence_alt(DistributionSpec base,
                                          std::function<double(double, double)> g, double epsilon);

LabeledSample sample_null(const DistributionSpec& q, int n, philox4x32& rng);
LabeledSample sample_equality_alt(const EqualityAlternative& alt, int n, philox4x32& rng);
// rejection sampler, proposal Q x Q, envelope 1 + eps*sup g; throws
// std::runtime_error if a proposal shows the envelope was wrong
LabeledSample sample_dependence_alt(const DependenceAlternative& alt, int n, philox4x32& rng);

}  // namespace cbtest
