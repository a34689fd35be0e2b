#include "cbtest/quadrature.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace cbtest {

QuadratureRule QuadratureRule::fixed(int panels) {
    QuadratureRule r;
    r.kind = Kind::fixed_simpson;
    r.panels = panels;
    return r;
}

QuadratureRule QuadratureRule::adaptive_to(double tol) {
    QuadratureRule r;
    r.kind = Kind::adaptive;
    r.tol = tol;
    return r;
}

namespace {

[[noreturn]] void throw_nonfinite(double x) {
    char buf[80];
    std::snprintf(buf, sizeof buf, "quadrature: non-finite integrand value at x=%.17g", x);
    throw std::domain_error(buf);
}

double eval_checked(const std::function<double(double)>& f, double x) {
    double v = f(x);
    if (!std::isfinite(v)) throw_nonfinite(x);
    return v;
}

void validate(const QuadratureRule& rule) {
    if (rule.kind == QuadratureRule::Kind::fixed_simpson) {
        if (rule.panels < 64 || rule.panels % 2 != 0)
            throw std::invalid_argument("quadrature: panel count must be even and >= 64");
    } else {
        if (!(rule.tol > 0.0) || rule.tol > 1e-4)
            throw std::invalid_argument("quadrature: adaptive tolerance must be in (0, 1e-4]");
    }
}

double simpson_fixed(const std::function<double(double)>& f, double a, double b, int panels) {
    double h = (b - a) / panels;
    double sum = eval_checked(f, a) + eval_checked(f, b);
    for (int i = 1; i < panels; ++i) {
        double x = a + i * h;
        sum += (i % 2 ? 4.0 : 2.0) * eval_checked(f, x);
    }
    return sum * h / 3.0;
}

double adaptive_step(const std::function<double(double)>& f, double a, double b, double fa,
                     double fm, double fb, double whole, double tol, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = eval_checked(f, lm), frm = eval_checked(f, rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    double delta = left + right - whole;
    if (depth <= 0 || std::fabs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adaptive_step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
           adaptive_step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

}  // namespace

double quad(const std::function<double(double)>& f, double a, double b,
            const QuadratureRule& rule) {
    validate(rule);
    if (a > b) throw std::invalid_argument("quadrature: a > b");
    if (a == b) return 0.0;
    if (rule.kind == QuadratureRule::Kind::fixed_simpson)
        return simpson_fixed(f, a, b, rule.panels);
    double fa = eval_checked(f, a), fb = eval_checked(f, b);
    double m = 0.5 * (a + b);
    double fm = eval_checked(f, m);
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_step(f, a, b, fa, fm, fb, whole, rule.tol, 48);
}

CumulativeIntegral::CumulativeIntegral(const std::function<double(double)>& f, int cells) {
    if (cells < 2) throw std::invalid_argument("cumulative integral: need at least 2 cells");
    h_ = 1.0 / cells;
    values_.resize(cells + 1);
    deriv_.resize(cells + 1);
    mid_.resize(cells);
    values_[0] = 0.0;
    deriv_[0] = eval_checked(f, 0.0);
    for (int i = 0; i < cells; ++i) {
        double x1 = (i + 1) * h_;
        mid_[i] = eval_checked(f, (i + 0.5) * h_);
        deriv_[i + 1] = eval_checked(f, x1);
        values_[i + 1] = values_[i] + h_ / 6.0 * (deriv_[i] + 4.0 * mid_[i] + deriv_[i + 1]);
    }
}

double CumulativeIntegral::operator()(double x) const {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return values_.back();
    int cells = static_cast<int>(mid_.size());
    int j = static_cast<int>(x * cells);
    if (j >= cells) j = cells - 1;
    double t = (x - j * h_) / h_;
    double s = (values_[j + 1] - values_[j]) / h_;  // secant slope of this cell
    double d0 = deriv_[j], d1 = deriv_[j + 1];
    // keep the patch monotone where the integrand does not change sign in the
    // cell (Fritsch-Carlson bound); leaves signed integrands untouched
    if (d0 >= 0.0 && d1 >= 0.0 && mid_[j] >= 0.0) {
        if (d0 > 3.0 * s) d0 = 3.0 * s;
        if (d1 > 3.0 * s) d1 = 3.0 * s;
    } else if (d0 <= 0.0 && d1 <= 0.0 && mid_[j] <= 0.0) {
        if (d0 < 3.0 * s) d0 = 3.0 * s;
        if (d1 < 3.0 * s) d1 = 3.0 * s;
    }
    double t2 = t * t, t3 = t2 * t;
    return values_[j] * (2 * t3 - 3 * t2 + 1) + h_ * d0 * (t3 - 2 * t2 + t) +
           values_[j + 1] * (-2 * t3 + 3 * t2) + h_ * d1 * (t3 - t2);
}

double CumulativeIntegral::derivative(double x) const {
    if (x <= 0.0) return deriv_.front();
    if (x >= 1.0) return deriv_.back();
    int cells = static_cast<int>(mid_.size());
    int j = static_cast<int>(x * cells);
    if (j >= cells) j = cells - 1;
    double t = (x - j * h_) / h_;
    return deriv_[j] + t * (deriv_[j + 1] - deriv_[j]);
}

}  // namespace cbtest
