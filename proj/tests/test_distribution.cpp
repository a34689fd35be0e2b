#include <doctest.h>

#include <cmath>
#include <memory>
#include <stdexcept>

#include "cbtest/distribution.hpp"

using namespace cbtest;

TEST_CASE("builtins validate and hit closed-form values") {
    for (const char* name : {"uniform", "square", "mix-uniform-square"}) {
        DistributionSpec d = builtin_dist(name);
        CHECK_NOTHROW(validate(d));
        CHECK(d.cdf(0.0) == doctest::Approx(0.0));
        CHECK(d.cdf(1.0) == doctest::Approx(1.0));
    }
    CHECK(square_dist().cdf(0.5) == doctest::Approx(0.25));
    CHECK(mix_uniform_square_dist().cdf(0.5) == doctest::Approx(0.375));
    CHECK(mix_uniform_square_dist().density(0.5) == doctest::Approx(1.0));
    CHECK_THROWS_AS(builtin_dist("cauchy"), std::invalid_argument);
}

TEST_CASE("analytic inverses round-trip") {
    // mix CDF (x + x^2)/2 = 1/2 at x = (sqrt(5) - 1)/2
    CHECK(mix_uniform_square_dist().inverse(0.5) ==
          doctest::Approx((std::sqrt(5.0) - 1.0) / 2.0).epsilon(1e-12));
    CHECK(square_dist().inverse(0.25) == doctest::Approx(0.5).epsilon(1e-12));
    for (double p : {0.0, 0.013, 0.4, 0.77, 1.0}) {
        for (const char* name : {"uniform", "square", "mix-uniform-square"}) {
            DistributionSpec d = builtin_dist(name);
            CHECK(d.cdf(d.inverse(p)) == doctest::Approx(p).epsilon(1e-10));
        }
    }
}

TEST_CASE("polynomial densities: closed-form cdf and input checking") {
    // density 6x(1-x) = 6x - 6x^2, cdf 3x^2 - 2x^3
    DistributionSpec d = poly_density_dist({0.0, 6.0, -6.0}, "bump");
    CHECK_NOTHROW(validate(d));
    CHECK(d.cdf(0.5) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(d.cdf(0.25) == doctest::Approx(3 * 0.0625 - 2 * 0.015625).epsilon(1e-12));
    // mass 2, and a sign flip
    CHECK_THROWS_AS(poly_density_dist({2.0}, "m2"), std::invalid_argument);
    CHECK_THROWS_AS(poly_density_dist({-0.5, 3.0}, "neg"), std::invalid_argument);
}

TEST_CASE("validate rejects a broken cdf") {
    DistributionSpec d = uniform_dist();
    d.cdf = [](double x) { return x * 0.9; };  // endpoint 1 fails
    CHECK_THROWS_AS(validate(d), std::invalid_argument);
}

TEST_CASE("numeric inverse honors its tolerance and rejects bad p") {
    DistributionSpec d = square_dist();
    d.inverse = nullptr;
    for (double p : {1e-6, 0.2, 0.5, 0.9, 0.999999})
        CHECK(d.cdf(inverse_cdf(d, p)) == doctest::Approx(p).epsilon(1e-9));
    CHECK_THROWS_AS(inverse_cdf(d, -0.1), std::domain_error);
    CHECK_THROWS_AS(inverse_cdf(d, 1.1), std::domain_error);

    DistributionSpec e = ensure_inverse(std::move(d));
    CHECK(e.inverse(0.25) == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("distribution-weighted quadrature") {
    // E[x] under density 2x is 2/3
    CHECK(quad([](double x) { return x; }, square_dist(), 0, 1) ==
          doctest::Approx(2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("cached cdf tracks the analytic one and inverts") {
    auto cache = std::make_shared<const CachedCdf>([](double x) { return 2.0 * x; }, "square");
    CHECK(cache->total_mass() == doctest::Approx(1.0).epsilon(1e-10));
    for (double x : {0.0, 0.2, 0.5, 0.83, 1.0})
        CHECK(cache->cdf(x) == doctest::Approx(x * x).epsilon(1e-10));
    for (double p : {0.01, 0.25, 0.6, 0.99})
        CHECK(cache->inverse(p) == doctest::Approx(std::sqrt(p)).epsilon(1e-9));

    DistributionSpec view = CachedCdf::spec_of(cache);
    CHECK_NOTHROW(validate(view));
    CHECK(view.inverse(0.25) == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("cached cdf normalizes slightly-off mass but rejects garbage") {
    CachedCdf c([](double x) { return 1.0 + 2e-7 * x; }, "near-uniform");
    CHECK(c.cdf(1.0) == doctest::Approx(1.0));
    CHECK_THROWS_AS(CachedCdf([](double) { return 2.0; }, "double-mass"), std::invalid_argument);
}
