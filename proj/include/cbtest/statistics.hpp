#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>

#include "cbtest/alternatives.hpp"
#include "cbtest/distribution.hpp"
#include "cbtest/samples.hpp"

namespace cbtest {

// Kernel phi on {v <= u} with its symmetrised extension to the square.
struct SymmetricKernel {
    std::function<double(double, double)> phi;

    double tilde(double x, double y) const { return x >= y ? phi(x, y) : phi(y, x); }

    static SymmetricKernel from_phi(std::function<double(double, double)> f) { return {std::move(f)}; }
    // phi(u,v) = h(u) h(v); the optimal class
    static SymmetricKernel product(std::function<double(double)> h);
    // phi(u,v) = alpha(u); depends on the pair only through its maximum
    static SymmetricKernel max_comp(std::function<double(double)> alpha);
};

struct TestReport {
    std::string statistic;
    double observed = 0.0;
    double p_value = 1.0;
    std::map<double, double> critical_values;  // level -> value
    long replications = 0;
    std::uint64_t seed = 0;
    int n = 0;
};

// ---- sup statistics ----

// sup |R_n^s| over {v <= u}; exact on the corner grid of distinct pooled
// values for m <= threshold, quantile-thinned above it (see grid note in the
// implementation)
double ks_colour_blind(const ColourBlindSample& s);

// sup |R_n| over the square; same grid policy
double ks_full(const LabeledSample& s);

// ---- linear statistics ----

// (1/sqrt(n)) sum phi~(u_i, v_i) - sqrt(n) * double sum of phi~ over the
// pooled EDF x pooled EDF  (O(n^2) reference path)
double linear_stat(const ColourBlindSample& s, const SymmetricKernel& k);

// same value for phi~ = h x h via the O(n) formula:
// (1/sqrt(n)) sum h(u_i) h(v_i) - sqrt(n) * (pooled mean of h)^2
double optimal_linear_stat(const ColourBlindSample& s, const EqualityAlternative& alt);

// (1/sqrt(n)) sum alpha(u_i) - sqrt(n) int alpha dQn^2, the Qn^2 integral
// taken over the sorted distinct pooled values
double maxima_stat(const ColourBlindSample& s, const std::function<double(double)>& alpha);

// ---- maxima-statistic analytics ----

// (S alpha)(x) = alpha(x) Q(x) + 4 int_x^1 alpha dQ
std::function<double(double)> s_operator(const std::function<double(double)>& alpha,
                                         const DistributionSpec& Q);

struct MaximaSnr {
    double snr = 0.0;              // sqrt(n) eps^2 <alpha,q> / sd, alpha centered under Q^2
    double shift_rate = 0.0;       // <alpha, q>_{Q^2}
    double variance = 0.0;         // <alpha,alpha>_{Q^2} - <alpha, S alpha>_{Q^2}
    double variance_direct = 0.0;  // <L* phi_alpha, L* phi_alpha>_{QxQ}, cross-check
};

// centers alpha under Q^2 internally (the statistic and all inner products
// against q are invariant to that); throws std::domain_error when the
// variance is not positive (degenerate direction)
MaximaSnr snr_maxima(const std::function<double(double)>& alpha, const EqualityAlternative& alt,
                     int n);

struct ConeResult {
    bool is_member = false;
    std::function<double(double)> H;  // sqrt of the running integral, positive branch
    std::function<double(double)> h;  // Q*alpha/H, reported as 0 where |H| <= 1e-8
    double min_running_integral = 0.0;
};

// membership in {alpha : int_0^u alpha dQ^2 >= 0 for all u}: exactly the
// directions realizable as q = dH^2/dQ^2 of some equality alternative
ConeResult cone_membership(const std::function<double(double)>& alpha, const DistributionSpec& Q);

// ---- diagnostics ----

// U-statistic (1/(n(n-1))) #{(i,j), i != j : u_j > v_i}; 5/6 under the null
double cross_probability(const ColourBlindSample& s);

struct Chain {
    double lo = 0.0, mid = 0.0, hi = 0.0;
};

// the three curves P1*P2, ((P1+P2)/2)^2, (1-sqrt((1-P1)(1-P2)))^2 at x;
// always lo <= mid <= hi, with equality throughout iff P1(x) = P2(x)
Chain inequality_chain(const DistributionSpec& p1, const DistributionSpec& p2, double x);

}  // namespace cbtest
