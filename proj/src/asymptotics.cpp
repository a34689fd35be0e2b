#include "cbtest/asymptotics.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>
#include <utility>
#include <vector>

namespace cbtest {

namespace {

// uniform-grid samples with cubic interpolation (central-difference slopes);
// interpolation error is far below the 1e-6 contracts of this module
class GridFunction {
public:
    GridFunction(const std::function<double(double)>& f, int cells) : h_(1.0 / cells) {
        values_.resize(cells + 1);
        for (int i = 0; i <= cells; ++i) values_[i] = f(i * h_);
    }

    double operator()(double x) const {
        int cells = static_cast<int>(values_.size()) - 1;
        if (x <= 0.0) return values_.front();
        if (x >= 1.0) return values_.back();
        int j = static_cast<int>(x * cells);
        if (j >= cells) j = cells - 1;
        double t = (x - j * h_) / h_;
        double d0 = slope(j), d1 = slope(j + 1);
        double t2 = t * t, t3 = t2 * t;
        return values_[j] * (2 * t3 - 3 * t2 + 1) + h_ * d0 * (t3 - 2 * t2 + t) +
               values_[j + 1] * (-2 * t3 + 3 * t2) + h_ * d1 * (t3 - t2);
    }

private:
    double slope(int i) const {
        int last = static_cast<int>(values_.size()) - 1;
        if (i == 0) return (values_[1] - values_[0]) / h_;
        if (i == last) return (values_[last] - values_[last - 1]) / h_;
        return (values_[i + 1] - values_[i - 1]) / (2.0 * h_);
    }

    std::vector<double> values_;
    double h_;
};

constexpr int marginal_cells = 1024;

}  // namespace

SymmetricKernel project_Lstar(const SymmetricKernel& k, const DistributionSpec& Q) {
    auto tilde = [k](double x, double y) { return k.tilde(x, y); };
    auto qd = Q.density;
    QuadratureRule half = QuadratureRule::fixed(512);
    // split the marginal integral at y = x so max-type kernels stay smooth on
    // each side of the diagonal
    auto marginal_exact = [tilde, qd, half](double x) {
        double lower = x > 0.0 ? quad([&](double y) { return tilde(x, y) * qd(y); }, 0.0, x, half)
                               : 0.0;
        double upper = x < 1.0 ? quad([&](double y) { return tilde(x, y) * qd(y); }, x, 1.0, half)
                               : 0.0;
        return lower + upper;
    };
    auto grid = std::make_shared<const GridFunction>(marginal_exact, marginal_cells);
    double mean = quad([&](double x) { return (*grid)(x)*qd(x); }, 0.0, 1.0);
    auto phi = k.phi;
    return SymmetricKernel{[phi, grid, mean](double u, double v) {
        return phi(u, v) - (*grid)(u) - (*grid)(v) + mean;
    }};
}

double inner_product(const SymmetricKernel& k1, const SymmetricKernel& k2,
                     const DistributionSpec& Q) {
    auto qd = Q.density;
    QuadratureRule inner = QuadratureRule::fixed(512);
    QuadratureRule outer = QuadratureRule::fixed(1024);
    double tri = quad(
        [&](double x) {
            if (x <= 0.0) return 0.0;
            return qd(x) *
                   quad([&](double y) { return k1.tilde(x, y) * k2.tilde(x, y) * qd(y); }, 0.0,
                        x, inner);
        },
        0.0, 1.0, outer);
    return 2.0 * tri;
}

ShiftSurface shift_equality(const EqualityAlternative& alt, int n) {
    double scale = std::sqrt(static_cast<double>(n)) * alt.epsilon * alt.epsilon;
    auto H = alt.H;
    ShiftSurface s;
    s.rate_exponent = -0.25;
    s.scale = scale;
    s.eval = [H, scale](double u, double v) {
        if (v > u) throw std::domain_error("shift surface: requires v <= u");
        double Hu = H(u), Hv = H(v);
        return scale * (-2.0 * Hu * Hv + Hv * Hv);
    };
    return s;
}

ShiftSurface shift_dependence(const DependenceAlternative& alt, int n) {
    double scale = std::sqrt(static_cast<double>(n)) * alt.epsilon;
    auto G = alt.G;
    ShiftSurface s;
    s.rate_exponent = -0.5;
    s.scale = scale;
    s.eval = [G, scale](double u, double v) {
        if (v > u) throw std::domain_error("shift surface: requires v <= u");
        return scale * (G(u, v) + G(v, u) - G(v, v));
    };
    return s;
}

std::function<double(double, double)> antisymmetric_part(
    const std::function<double(double, double)>& g) {
    return [g](double x, double y) { return 0.5 * (g(x, y) - g(y, x)); };
}

double snr_linear(const EqualityAlternative& alt, int n) {
    double norm_sq = quad([&](double x) { return alt.h(x) * alt.h(x); }, alt.base, 0.0, 1.0);
    if (!(norm_sq > 1e-14)) throw std::domain_error("snr_linear: degenerate direction h = 0");
    return std::sqrt(static_cast<double>(n)) * alt.epsilon * alt.epsilon * norm_sq;
}

double snr_linear_general(const SymmetricKernel& phi, const EqualityAlternative& alt, int n) {
    SymmetricKernel proj = project_Lstar(phi, alt.base);
    SymmetricKernel hh = SymmetricKernel::product(alt.h);
    double num = inner_product(proj, hh, alt.base);
    double den_sq = inner_product(proj, proj, alt.base);
    if (!(den_sq > 1e-14))
        throw std::domain_error("snr_linear_general: kernel projects to 0");
    return std::sqrt(static_cast<double>(n)) * alt.epsilon * alt.epsilon * num /
           std::sqrt(den_sq);
}

double tv_power(double T) {
    if (T < 0.0) throw std::domain_error("tv_power: T must be nonnegative");
    // 2 Phi(T/2) - 1 = erf(T / (2 sqrt(2)))
    return std::erf(T / (2.0 * std::sqrt(2.0)));
}

}  // namespace cbtest
