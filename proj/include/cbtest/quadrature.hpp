#pragma once

#include <functional>
#include <vector>

namespace cbtest {

// Fixed composite Simpson is the default everywhere: deterministic node set,
// reproducible constants. The adaptive rule exists for integrands flagged
// non-smooth by the caller.
struct QuadratureRule {
    enum class Kind { fixed_simpson, adaptive };
    Kind kind = Kind::fixed_simpson;
    int panels = 1024;      // even, >= 64
    double tol = 1e-10;     // adaptive only; in (0, 1e-4]

    static QuadratureRule fixed(int panels = 1024);
    static QuadratureRule adaptive_to(double tol);
};

// integral of f over [a, b]; throws std::invalid_argument on a bad rule or
// a > b, std::domain_error naming the node if f returns a non-finite value
double quad(const std::function<double(double)>& f, double a, double b,
            const QuadratureRule& rule = QuadratureRule{});

// Cumulative integral C(x) = int_0^x f(t) dt on [0,1], tabulated once on a
// uniform grid (Simpson per cell) and evaluated by a cubic Hermite patch whose
// slopes are f itself, so |C' - f| stays at interpolation error. Backbone for
// cached CDFs and cached running integrals such as H.
class CumulativeIntegral {
public:
    explicit CumulativeIntegral(const std::function<double(double)>& f, int cells = 4096);

    double operator()(double x) const;
    double total() const { return values_.back(); }
    double derivative(double x) const;  // the tabulated integrand, interpolated
    int cells() const { return static_cast<int>(values_.size()) - 1; }

    const std::vector<double>& node_values() const { return values_; }

private:
    std::vector<double> values_;  // C at i/cells
    std::vector<double> deriv_;   // f at i/cells
    std::vector<double> mid_;     // f at cell midpoints, kept for the Hermite guard
    double h_;
};

}  // namespace cbtest
