#include "cbtest/empirical.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cbtest {

namespace {

double pooled_edf(const ColourBlindSample& s, double t) {
    auto it = std::upper_bound(s.pooled.begin(), s.pooled.end(), t);
    return static_cast<double>(it - s.pooled.begin()) / static_cast<double>(s.pooled.size());
}

double pooled_edf(const LabeledSample& s, double t) {
    long c = 0;
    for (const auto& [x, y] : s.pairs) c += (x <= t) + (y <= t);
    return static_cast<double>(c) / (2.0 * s.n());
}

}  // namespace

double sym_rect_mass(const ColourBlindSample& s, double u, double v) {
    if (v > u) throw std::domain_error("sym_rect_mass: requires v <= u");
    long c = 0;
    for (const auto& [ui, vi] : s.pairs) c += (ui <= u && vi <= v);
    return static_cast<double>(c) / s.n();
}

double process_Rs(const ColourBlindSample& s, double u, double v) {
    if (v > u) throw std::domain_error("process_Rs: requires v <= u");
    double qu = pooled_edf(s, u), qv = pooled_edf(s, v);
    return std::sqrt(static_cast<double>(s.n())) *
           (sym_rect_mass(s, u, v) - (2.0 * qu * qv - qv * qv));
}

double process_R_full(const LabeledSample& s, double x, double y) {
    long c = 0;
    for (const auto& [xi, yi] : s.pairs) c += (xi <= x && yi <= y);
    double qx = pooled_edf(s, x), qy = pooled_edf(s, y);
    return std::sqrt(static_cast<double>(s.n())) * (static_cast<double>(c) / s.n() - qx * qy);
}

double pillow_zn(const LabeledSample& s, const DistributionSpec& trueQ, double x, double y) {
    long cxy = 0, cx = 0, cy = 0;
    for (const auto& [xi, yi] : s.pairs) {
        bool bx = xi <= x, by = yi <= y;
        cxy += (bx && by);
        cx += bx;
        cy += by;
    }
    double n = s.n();
    double rt = std::sqrt(n);
    double qx = trueQ.cdf(x), qy = trueQ.cdf(y);
    double vxy = rt * (cxy / n - qx * qy);
    double vx1 = rt * (cx / n - qx);   // v_n(x, 1)
    double v1y = rt * (cy / n - qy);   // v_n(1, y)
    return vxy - qx * v1y - qy * vx1;  // v_n(1,1) term is identically 0
}

double residual_rn(const LabeledSample& s, const DistributionSpec& trueQ, double u, double v) {
    if (v > u) throw std::domain_error("residual_rn: requires v <= u");
    double rt = std::sqrt(static_cast<double>(s.n()));
    double du = pooled_edf(s, u) - trueQ.cdf(u);
    double dv = pooled_edf(s, v) - trueQ.cdf(v);
    return rt * dv * dv - 2.0 * rt * du * dv;
}

}  // namespace cbtest
