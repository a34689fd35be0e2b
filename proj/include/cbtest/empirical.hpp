#pragma once

#include "cbtest/distribution.hpp"
#include "cbtest/samples.hpp"

namespace cbtest {

// Point evaluators for the empirical processes. These are the reference
// implementations (O(n) per point); the sup statistics use dedicated sweeps.

// (1/n) #{i : u_i <= u and v_i <= v}; the empirical mass of the symmetrised
// rectangle [0,u]x[0,v] u [0,v]x[0,u]. Requires v <= u.
double sym_rect_mass(const ColourBlindSample& s, double u, double v);

// sqrt(n) * [sym_rect_mass(u,v) - (2 Qn(u) Qn(v) - Qn(v)^2)], v <= u
double process_Rs(const ColourBlindSample& s, double u, double v);

// sqrt(n) * [(1/n)#{i: x_i <= x, y_i <= y} - Qn(x) Qn(y)] with pooled Qn
double process_R_full(const LabeledSample& s, double x, double y);

// z_n = L v_n with the true Q:
// v_n(x,y) - Q(x) v_n(1,y) - Q(y) v_n(x,1) + Q(x)Q(y) v_n(1,1),
// where v_n(x,y) = sqrt(n)[bivariate EDF - Q(x)Q(y)]. Vanishes when x or y
// is 0 or 1. Simulation-only: needs labels and the true Q.
double pillow_zn(const LabeledSample& s, const DistributionSpec& trueQ, double x, double y);

// Finite-n remainder on symmetrised rectangles, sign fixed so that
// process_Rs(u,v) = zn(S_{u,v}) + residual_rn(u,v) holds exactly, with
// zn(S_{u,v}) = zn(u,v) + zn(v,u) - zn(v,v):
//   sqrt(n)[Qn(v)-Q(v)]^2 - 2 sqrt(n)[Qn(u)-Q(u)][Qn(v)-Q(v)]
// Note the v = u value is -sqrt(n)[Qn(u)-Q(u)]^2.
double residual_rn(const LabeledSample& s, const DistributionSpec& trueQ, double u, double v);

}  // namespace cbtest
