#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "cbtest/quadrature.hpp"

namespace cbtest {

// A continuous distribution on [0,1]. `inverse` is optional: analytic where a
// closed form exists, otherwise filled in from a cached numeric CDF. All
// sampling goes through `inverse`.
struct DistributionSpec {
    std::function<double(double)> cdf;
    std::function<double(double)> density;
    std::string name;
    std::function<double(double)> inverse;  // may be empty; see ensure_inverse
};

DistributionSpec uniform_dist();             // F(x) = x
DistributionSpec square_dist();              // F(x) = x^2
DistributionSpec mix_uniform_square_dist();  // F(x) = (x + x^2)/2
// density sum c_k x^k (ascending); must be a probability density on [0,1]
DistributionSpec poly_density_dist(const std::vector<double>& coeffs, const std::string& name);
// builtin by name: "uniform" | "square" | "mix-uniform-square"
DistributionSpec builtin_dist(const std::string& name);

// grid checks of the type invariants: cdf in [0,1] and nondecreasing on a
// 1001-point grid, endpoints 0 and 1, density >= 0 integrating to 1 within
// 1e-8, |cdf - int density| <= 1e-6; throws std::invalid_argument on failure
void validate(const DistributionSpec& d);

// |cdf(result) - p| <= 1e-10 by bracketed bisection; p outside [0,1] -> std::domain_error
double inverse_cdf(const DistributionSpec& d, double p);

// same spec with `inverse` filled in (bisection on cdf) when absent
DistributionSpec ensure_inverse(DistributionSpec d);

// int_a^b f dP, i.e. f weighted by the distribution's density
double quad(const std::function<double(double)>& f, const DistributionSpec& weight, double a,
            double b, const QuadratureRule& rule = QuadratureRule{});

// CDF integrated once on a fine grid; cheap repeated cdf/inverse evaluations.
// The inverse does a bracketed Newton refinement per draw, falling back to
// bisection, and honors the same 1e-10 contract as inverse_cdf.
class CachedCdf {
public:
    explicit CachedCdf(std::function<double(double)> density, std::string name = "cached",
                       int cells = 4096);

    double cdf(double x) const;
    double density(double x) const { return density_(x); }
    double inverse(double p) const;
    double total_mass() const { return raw_total_; }  // before normalization

    // view as a DistributionSpec (shares this cache; keep it alive via shared_ptr)
    static DistributionSpec spec_of(const std::shared_ptr<const CachedCdf>& c);

private:
    std::function<double(double)> density_;
    std::string name_;
    CumulativeIntegral cum_;
    double raw_total_;
    double scale_;  // 1/raw_total, applied so cdf(1) == 1 exactly
};

}  // namespace cbtest
