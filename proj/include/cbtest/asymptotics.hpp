#pragma once

#include <functional>

#include "cbtest/alternatives.hpp"
#include "cbtest/distribution.hpp"
#include "cbtest/statistics.hpp"

namespace cbtest {

// (L* phi)(x,y) = phi~(x,y) - (Q phi)(x) - (Q phi)(y) + E_Q phi, the
// projection onto kernels with vanishing Q-marginals. Marginals are
// precomputed on a fine grid; the returned kernel owns the cache.
SymmetricKernel project_Lstar(const SymmetricKernel& k, const DistributionSpec& Q);

// <phi, psi>_{QxQ} by the symmetric triangle rule 2 * int_{y<x}; exact
// Simpson accuracy also for kernels with a diagonal kink (max-type)
double inner_product(const SymmetricKernel& k1, const SymmetricKernel& k2,
                     const DistributionSpec& Q);

// Expected value of R_n^s under a local alternative, as a surface in (u,v).
struct ShiftSurface {
    std::function<double(double, double)> eval;  // requires v <= u
    double rate_exponent = 0.0;                  // -1/4 equality, -1/2 dependence
    double scale = 0.0;                          // sqrt(n) eps^2, resp. sqrt(n) eps
};

// sqrt(n) eps^2 [-2 H(u) H(v) + H(v)^2]; diagonal value -sqrt(n) eps^2 H(u)^2
ShiftSurface shift_equality(const EqualityAlternative& alt, int n);

// sqrt(n) eps [G(u,v) + G(v,u) - G(v,v)]; identically 0 for anti-symmetric g
ShiftSurface shift_dependence(const DependenceAlternative& alt, int n);

std::function<double(double, double)> antisymmetric_part(
    const std::function<double(double, double)>& g);

// sqrt(n) eps^2 ||h||^2_Q, the best achievable signal-to-noise ratio among
// linear statistics; throws std::domain_error for h = 0
double snr_linear(const EqualityAlternative& alt, int n);

// T_phi = sqrt(n) eps^2 <L* phi~, h x h> / ||L* phi~||; equals snr_linear at
// the maximiser phi~ = h x h
double snr_linear_general(const SymmetricKernel& phi, const EqualityAlternative& alt, int n);

// total-variation power bound 2 Phi(T/2) - 1 of the Gaussian mean-shift
// testing problem; T >= 0 required
double tv_power(double T);

}  // namespace cbtest
