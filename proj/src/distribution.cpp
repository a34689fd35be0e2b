#include "cbtest/distribution.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace cbtest {

namespace {

double clamp01(double x) { return x < 0.0 ? 0.0 : (x > 1.0 ? 1.0 : x); }

// monotone bisection for |cdf(x) - p| <= 1e-10; assumes cdf continuous
double bisect_inverse(const std::function<double(double)>& cdf, double p) {
    double lo = 0.0, hi = 1.0;
    double flo = cdf(0.0), fhi = cdf(1.0);
    if (p <= flo) return 0.0;
    if (p >= fhi) return 1.0;
    for (int it = 0; it < 200 && fhi - flo > 5e-11; ++it) {
        double mid = 0.5 * (lo + hi);
        double fm = cdf(mid);
        if (fm < p) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
            fhi = fm;
        }
        if (hi - lo < 1e-16) break;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

DistributionSpec uniform_dist() {
    DistributionSpec d;
    d.cdf = [](double x) { return clamp01(x); };
    d.density = [](double) { return 1.0; };
    d.inverse = [](double p) { return p; };
    d.name = "uniform";
    return d;
}

DistributionSpec square_dist() {
    DistributionSpec d;
    d.cdf = [](double x) { return clamp01(x * x); };
    d.density = [](double x) { return 2.0 * x; };
    d.inverse = [](double p) { return std::sqrt(p); };
    d.name = "square";
    return d;
}

DistributionSpec mix_uniform_square_dist() {
    DistributionSpec d;
    d.cdf = [](double x) { return clamp01(0.5 * (x + x * x)); };
    d.density = [](double x) { return 0.5 * (1.0 + 2.0 * x); };
    d.inverse = [](double p) { return 0.5 * (std::sqrt(1.0 + 8.0 * p) - 1.0); };
    d.name = "mix-uniform-square";
    return d;
}

DistributionSpec poly_density_dist(const std::vector<double>& coeffs, const std::string& name) {
    if (coeffs.empty()) throw std::invalid_argument("poly density: no coefficients");
    for (double c : coeffs)
        if (!std::isfinite(c)) throw std::invalid_argument("poly density: non-finite coefficient");
    auto dens = [coeffs](double x) {
        double v = 0.0;
        for (size_t k = coeffs.size(); k-- > 0;) v = v * x + coeffs[k];
        return v;
    };
    auto cdf = [coeffs](double x) {
        double v = 0.0;
        for (size_t k = coeffs.size(); k-- > 0;) v = v * x + coeffs[k] / static_cast<double>(k + 1);
        return clamp01(v * x);
    };
    double total = cdf(1.0);
    double raw = 0.0;
    for (size_t k = 0; k < coeffs.size(); ++k) raw += coeffs[k] / static_cast<double>(k + 1);
    if (std::fabs(raw - 1.0) > 1e-8)
        throw std::invalid_argument("poly density: coefficients do not integrate to 1");
    for (int i = 0; i <= 1000; ++i)
        if (dens(i / 1000.0) < -1e-12)
            throw std::invalid_argument("poly density: negative density on [0,1]");
    (void)total;
    DistributionSpec d;
    d.cdf = cdf;
    d.density = dens;
    d.name = name;
    return d;
}

DistributionSpec builtin_dist(const std::string& name) {
    if (name == "uniform") return uniform_dist();
    if (name == "square") return square_dist();
    if (name == "mix-uniform-square") return mix_uniform_square_dist();
    throw std::invalid_argument("unknown builtin distribution: " + name);
}

void validate(const DistributionSpec& d) {
    if (!d.cdf || !d.density) throw std::invalid_argument(d.name + ": cdf/density not set");
    if (std::fabs(d.cdf(0.0)) > 1e-9 || std::fabs(d.cdf(1.0) - 1.0) > 1e-9)
        throw std::invalid_argument(d.name + ": cdf endpoints are not 0 and 1");
    double prev = -1e-12;
    for (int i = 0; i <= 1000; ++i) {
        double x = i / 1000.0;
        double f = d.cdf(x);
        if (!std::isfinite(f) || f < -1e-9 || f > 1.0 + 1e-9)
            throw std::invalid_argument(d.name + ": cdf leaves [0,1]");
        if (f < prev - 1e-12) throw std::invalid_argument(d.name + ": cdf not nondecreasing");
        prev = f;
        if (d.density(x) < -1e-12) throw std::invalid_argument(d.name + ": negative density");
    }
    double mass = quad(d.density, 0.0, 1.0);
    if (std::fabs(mass - 1.0) > 1e-8)
        throw std::invalid_argument(d.name + ": density does not integrate to 1");
    CumulativeIntegral cum(d.density);
    for (int i = 0; i <= 1000; ++i) {
        double x = i / 1000.0;
        if (std::fabs(d.cdf(x) - cum(x)) > 1e-6)
            throw std::invalid_argument(d.name + ": cdf is not the integral of density");
    }
}

double inverse_cdf(const DistributionSpec& d, double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("inverse_cdf: p outside [0,1]");
    return bisect_inverse(d.cdf, p);
}

DistributionSpec ensure_inverse(DistributionSpec d) {
    if (!d.inverse) {
        auto cdf = d.cdf;
        d.inverse = [cdf](double p) { return bisect_inverse(cdf, p); };
    }
    return d;
}

double quad(const std::function<double(double)>& f, const DistributionSpec& weight, double a,
            double b, const QuadratureRule& rule) {
    const auto& w = weight.density;
    return quad([&](double x) { return f(x) * w(x); }, a, b, rule);
}

CachedCdf::CachedCdf(std::function<double(double)> density, std::string name, int cells)
    : density_(std::move(density)), name_(std::move(name)), cum_(density_, cells),
      raw_total_(cum_.total()) {
    if (!(raw_total_ > 0.0) || std::fabs(raw_total_ - 1.0) > 1e-6)
        throw std::invalid_argument(name_ + ": density mass " + std::to_string(raw_total_) +
                                    " is not 1");
    scale_ = 1.0 / raw_total_;
}

double CachedCdf::cdf(double x) const {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    return clamp01(cum_(x) * scale_);
}

double CachedCdf::inverse(double p) const {
    if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("inverse: p outside [0,1]");
    if (p <= 0.0) return 0.0;
    if (p >= 1.0) return 1.0;
    const auto& nodes = cum_.node_values();
    double target = p * raw_total_;
    // cell bracket, then guarded Newton on the interpolated cdf
    int lo_i = 0, hi_i = static_cast<int>(nodes.size()) - 1;
    while (hi_i - lo_i > 1) {
        int mid = (lo_i + hi_i) / 2;
        if (nodes[mid] < target)
            lo_i = mid;
        else
            hi_i = mid;
    }
    double h = 1.0 / cum_.cells();
    double lo = lo_i * h, hi = hi_i * h;
    double span = nodes[hi_i] - nodes[lo_i];
    double x = span > 0.0 ? lo + h * (target - nodes[lo_i]) / span : 0.5 * (lo + hi);
    double flo = cdf(lo) - p, fhi = cdf(hi) - p;
    for (int it = 0; it < 100; ++it) {
        double fx = cdf(x) - p;
        if (std::fabs(fx) <= 1e-12) return x;
        if (fx < 0.0) {
            lo = x;
            flo = fx;
        } else {
            hi = x;
            fhi = fx;
        }
        double d = density_(x) * scale_;
        double xn = d > 1e-12 ? x - fx / d : 0.5 * (lo + hi);
        x = (xn > lo && xn < hi) ? xn : 0.5 * (lo + hi);
        if (hi - lo < 1e-16 && std::fabs(fx) <= 1e-10) return x;
    }
    (void)flo;
    (void)fhi;
    return x;
}

DistributionSpec CachedCdf::spec_of(const std::shared_ptr<const CachedCdf>& c) {
    DistributionSpec d;
    d.cdf = [c](double x) { return c->cdf(x); };
    d.density = [c](double x) { return c->density(x); };
    d.inverse = [c](double p) { return c->inverse(p); };
    d.name = c->name_;
    return d;
}

}  // namespace cbtest
