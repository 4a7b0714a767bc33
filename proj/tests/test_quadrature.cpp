#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "hypk/quadrature.hpp"

#include <cmath>
#include <numbers>

using namespace hypk;

TEST_CASE("Gauss-Legendre is exact to degree 2n-1")
{
    const double v = quad::gl([](double x) { return std::pow(x, 9) + 3 * x * x; }, -1.0, 2.0, 5);
    CHECK(v == doctest::Approx((std::pow(2.0, 10) - 1) / 10 + (8.0 + 1)).epsilon(1e-14));
    double w = 0;
    for (double wi : quad::gauss_legendre(17).w) w += wi;
    CHECK(w == doctest::Approx(2).epsilon(1e-15));
}

TEST_CASE("adaptive Gauss on a peaked integrand")
{
    const auto r = quad::adaptive([](double x) { return 1 / (1e-4 + x * x); }, -1, 1, 1e-12);
    CHECK(r.value == doctest::Approx(2 / 1e-2 * std::atan(1 / 1e-2)).epsilon(1e-11));
}

TEST_CASE("tanh-sinh handles endpoint singularities")
{
    CHECK(quad::tanh_sinh([](double x) { return 1 / std::sqrt(x); }, 0, 1, 1e-12) == doctest::Approx(2).epsilon(1e-11));
    // log singularity at the right end, using the cancellation-free distance
    const auto r = quad::tanh_sinh3([](double, double, double db) { return std::log(db); }, 0, 1, 1e-12);
    CHECK(r.value == doctest::Approx(-1).epsilon(1e-11));
}

TEST_CASE("periodic trapezoid converges geometrically")
{
    const double v = quad::trapezoid_periodic([](double t) { return 1 / (2 + std::cos(t)); }, 64);
    CHECK(v == doctest::Approx(2 * std::numbers::pi / std::sqrt(3.0)).epsilon(1e-14));
}
