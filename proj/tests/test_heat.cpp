#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "hypk/heat.hpp"
#include "hypk/kernels.hpp"
#include "hypk/quadrature.hpp"
#include "hypk/specfun.hpp"

#include <cmath>

using namespace hypk;

namespace {
double mass(const std::function<double(double)>& k, const std::function<double(double)>& jac, double om, double r_max)
{
    double s = 0;
    for (double a = 0; a < r_max; a += 1) s += quad::adaptive([&](double r) { return k(r) * jac(r); }, a, a + 1, 1e-13).value;
    return om * s;
}
} // namespace

TEST_CASE("dimension 3 closed form")
{
    // (4 pi t)^{-3/2} (rho / sinh rho) e^{-t - rho^2/4t}, mpmath value
    CHECK(heat_real_odd(0.5, 1.3, 1) == doctest::Approx(0.012662281999770847413).epsilon(1e-13));
    CHECK(heat_real_odd(0.5, 0.0, 1) == doctest::Approx(std::pow(4 * std::numbers::pi * 0.5, -1.5) * std::exp(-0.5)).epsilon(1e-13));
}

TEST_CASE("heat kernels have unit mass")
{
    const double t = 0.5;
    CHECK(mass([&](double r) { return heat_real_odd(t, r, 2); }, [](double r) { return std::pow(std::sinh(r), 4); },
               sphere_measure(4), 20) == doctest::Approx(1).epsilon(1e-9));
    CHECK(mass([&](double r) { return heat_real_even(t, r, 1); }, [](double r) { return std::sinh(r); }, sphere_measure(1), 20) ==
          doctest::Approx(1).epsilon(1e-7));
    CHECK(mass([&](double r) { return heat_complex(t, r, 2); }, [](double r) { return std::pow(std::sinh(r), 3) * std::cosh(r); },
               sphere_measure(3), 20) == doctest::Approx(1).epsilon(1e-7));
}

TEST_CASE("complex heat kernel: two independent routes agree")
{
    for (double t : {0.2, 1.0})
        for (double rho : {0.0, 0.7, 2.0}) CHECK(heat_complex(t, rho, 2) == doctest::Approx(heat_complex_direct(t, rho, 2)).epsilon(1e-9));
}

TEST_CASE("real semigroup in dimension 3")
{
    auto h = [](double t) { return [t](double r) { return heat_real_odd(t, r, 1); }; };
    for (double rho : {0.0, 1.0, 2.5})
        CHECK(convolve_radial_real(h(0.3), h(0.7), rho, 3, 14, 1e-10) == doctest::Approx(heat_real_odd(1.0, rho, 1)).epsilon(1e-8));
}

TEST_CASE("argument handling")
{
    CHECK_THROWS(heat_real_odd(-1, 0.5, 1));
    CHECK(heat_complex(0.5, -1, 2) == heat_complex(0.5, 1, 2)); // even in rho
}
