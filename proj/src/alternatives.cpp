#include "cbtest/alternatives.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>
#include <utility>

namespace cbtest {

namespace {

void check_direction(const EqualityAlternative& alt) {
    if (std::fabs(alt.H(1.0)) > 1e-8)
        throw std::invalid_argument("equality alternative: int h dQ != 0");
    const auto& h = alt.h;
    double eps = alt.epsilon;
    for (int i = 0; i <= 1000; ++i) {
        double x = i / 1000.0;
        double hx = h(x);
        if (!std::isfinite(hx))
            throw std::invalid_argument("equality alternative: non-finite h on the grid");
        if (1.0 + eps * hx < -1e-9 || 1.0 - eps * hx < -1e-9)
            throw std::invalid_argument(
                "equality alternative: 1 +- eps*h goes negative; not a density");
    }
}

void build_marginals(EqualityAlternative& alt) {
    if (alt.epsilon == 0.0) {
        alt.a1 = alt.a2 = ensure_inverse(alt.base);
        return;
    }
    if (alt.epsilon == 1.0 && alt.pair_a1 && alt.pair_a2) {
        alt.a1 = *alt.pair_a1;
        alt.a2 = *alt.pair_a2;
        return;
    }
    auto q = alt.base.density;
    auto h = alt.h;
    double eps = alt.epsilon;
    auto c1 = std::make_shared<const CachedCdf>(
        [q, h, eps](double x) { return (1.0 + eps * h(x)) * q(x); }, alt.base.name + "+eps*h");
    auto c2 = std::make_shared<const CachedCdf>(
        [q, h, eps](double x) { return (1.0 - eps * h(x)) * q(x); }, alt.base.name + "-eps*h");
    alt.a1 = CachedCdf::spec_of(c1);
    alt.a2 = CachedCdf::spec_of(c2);
}

}  // namespace

EqualityAlternative EqualityAlternative::with_epsilon(double eps) const {
    EqualityAlternative out = *this;
    out.epsilon = eps;
    check_direction(out);
    build_marginals(out);
    return out;
}

EqualityAlternative make_equality_alt(DistributionSpec base, std::function<double(double)> h,
                                      double epsilon) {
    EqualityAlternative alt;
    alt.base = ensure_inverse(std::move(base));
    alt.h = std::move(h);
    alt.epsilon = epsilon;
    auto q = alt.base.density;
    auto hh = alt.h;
    auto cum = std::make_shared<const CumulativeIntegral>(
        [q, hh](double x) { return hh(x) * q(x); });
    alt.H = [cum](double x) { return (*cum)(x); };
    check_direction(alt);
    build_marginals(alt);
    return alt;
}

EqualityAlternative direction_from_pair(const DistributionSpec& a1, const DistributionSpec& a2) {
    auto d1 = a1.density, d2 = a2.density;
    int degenerate = 0;
    for (int i = 0; i <= 1000; ++i) {
        double x = i / 1000.0;
        if (d1(x) + d2(x) < 1e-9) ++degenerate;
    }
    if (degenerate > 5)
        throw std::invalid_argument("direction_from_pair: a1'+a2' vanishes on a set of "
                                    "positive measure");

    EqualityAlternative alt;
    auto f1 = a1.cdf, f2 = a2.cdf;
    alt.base.density = [d1, d2](double x) { return 0.5 * (d1(x) + d2(x)); };
    alt.base.cdf = [f1, f2](double x) { return 0.5 * (f1(x) + f2(x)); };
    alt.base.name = "(" + a1.name + "+" + a2.name + ")/2";
    alt.base = ensure_inverse(std::move(alt.base));
    alt.h = [d1, d2](double x) {
        double s = d1(x) + d2(x);
        return s > 1e-12 ? (d1(x) - d2(x)) / s : 0.0;
    };
    alt.H = [f1, f2](double x) { return 0.5 * (f1(x) - f2(x)); };  // exact: int h dQ = (A1-A2)/2
    alt.epsilon = 1.0;
    alt.pair_a1 = ensure_inverse(a1);
    alt.pair_a2 = ensure_inverse(a2);
    check_direction(alt);
    build_marginals(alt);
    return alt;
}

EqualityAlternative uniform_vs_square_alt() {
    EqualityAlternative alt = direction_from_pair(uniform_dist(), square_dist());
    alt.base = mix_uniform_square_dist();  // same distribution, analytic inverse
    return alt;
}

std::function<double(double)> q_direction(const EqualityAlternative& alt) {
    auto h = alt.h;
    auto H = alt.H;
    auto Q = alt.base.cdf;
    return [h, H, Q](double x) {
        double qx = Q(x);
        if (qx <= 1e-12) {
            double h0 = h(x);
            return h0 * h0;  // limit of h*H/Q as Q -> 0
        }
        return h(x) * H(x) / qx;
    };
}

DependenceAlternative make_dependence_alt(DistributionSpec base,
                                          std::function<double(double, double)> g,
                                          double epsilon) {
    DependenceAlternative alt;
    alt.base = ensure_inverse(std::move(base));
    alt.g = std::move(g);
    alt.epsilon = epsilon;

    const auto& gg = alt.g;
    auto qd = alt.base.density;
    QuadratureRule marginal_rule = QuadratureRule::fixed(512);
    for (int i = 0; i <= 20; ++i) {
        double t = i / 20.0;
        double mx = quad([&](double x) { return gg(x, t) * qd(x); }, 0.0, 1.0, marginal_rule);
        double my = quad([&](double y) { return gg(t, y) * qd(y); }, 0.0, 1.0, marginal_rule);
        if (std::fabs(mx) > 1e-6 || std::fabs(my) > 1e-6)
            throw std::invalid_argument("dependence alternative: g has nonzero Q-marginals");
    }
    double sup = 0.0, inf = 0.0;
    for (int i = 0; i <= 200; ++i)
        for (int j = 0; j <= 200; ++j) {
            double v = gg(i / 200.0, j / 200.0);
            if (!std::isfinite(v))
                throw std::invalid_argument("dependence alternative: non-finite g on the grid");
            sup = std::max(sup, v);
            inf = std::min(inf, v);
        }
    if (1.0 + epsilon * inf < -1e-9)
        throw std::invalid_argument("dependence alternative: 1 + eps*g goes negative");
    alt.g_sup = sup;

    QuadratureRule rule = QuadratureRule::fixed(256);
    alt.G = [gg, qd, rule](double x, double y) {
        if (x <= 0.0 || y <= 0.0) return 0.0;
        return quad(
            [&](double s) {
                return qd(s) * quad([&](double t) { return gg(s, t) * qd(t); }, 0.0, y, rule);
            },
            0.0, x, rule);
    };
    return alt;
}

LabeledSample sample_null(const DistributionSpec& q, int n, philox4x32& rng) {
    auto inv = q.inverse ? q.inverse
                         : std::function<double(double)>([&q](double p) { return inverse_cdf(q, p); });
    LabeledSample s;
    s.pairs.reserve(n);
    for (int i = 0; i < n; ++i) {
        double x = inv(rng.next_double());
        double y = inv(rng.next_double());
        s.pairs.emplace_back(x, y);
    }
    return s;
}

LabeledSample sample_equality_alt(const EqualityAlternative& alt, int n, philox4x32& rng) {
    const auto& i1 = alt.a1.inverse;
    const auto& i2 = alt.a2.inverse;
    if (!i1 || !i2) throw std::logic_error("equality alternative: marginals not invertible");
    LabeledSample s;
    s.pairs.reserve(n);
    for (int i = 0; i < n; ++i) {
        double x = i1(rng.next_double());
        double y = i2(rng.next_double());
        s.pairs.emplace_back(x, y);
    }
    return s;
}

LabeledSample sample_dependence_alt(const DependenceAlternative& alt, int n, philox4x32& rng) {
    const auto& inv = alt.base.inverse;
    const auto& g = alt.g;
    double envelope = 1.0 + alt.epsilon * (alt.g_sup > 0.0 ? alt.g_sup * 1.05 + 1e-9 : 0.0);
    LabeledSample s;
    s.pairs.reserve(n);
    while (s.n() < n) {
        double x = inv(rng.next_double());
        double y = inv(rng.next_double());
        double ratio = (1.0 + alt.epsilon * g(x, y)) / envelope;
        if (ratio > 1.0)
            throw std::runtime_error("dependence sampler: acceptance ratio > 1, envelope "
                                     "misconfigured (sup g underestimated)");
        if (ratio < 0.0) ratio = 0.0;
        if (rng.next_double() <= ratio) s.pairs.emplace_back(x, y);
    }
    return s;
}

}  // namespace cbtest
