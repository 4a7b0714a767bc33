#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "hypk/geometry.hpp"

#include <cmath>

using namespace hypk;

namespace {
const BallPoint P(cvec{{0.3, -0.1}, {0.2, 0.25}});
const BallPoint Q(cvec{{-0.4, 0.05}, {0.1, -0.5}});
const BallPoint C(cvec{{0.1, 0.2}, {-0.3, 0.1}});
} // namespace

TEST_CASE("Mobius maps are involutions that swap a and 0")
{
    const BallPoint back = mobius(P, mobius(P, Q));
    for (int j = 0; j < 2; ++j) CHECK(std::abs(back.z()[j] - Q.z()[j]) < 1e-14);
    CHECK(mobius(P, P).abs() < 1e-15);
}

TEST_CASE("distance is symmetric and invariant")
{
    CHECK(distance(P, Q) == doctest::Approx(distance(Q, P)).epsilon(1e-14));
    CHECK(distance(BallPoint::origin(2), P) == doctest::Approx(std::atanh(P.abs())).epsilon(1e-14));
    CHECK(distance(mobius(C, P), mobius(C, Q)) == doctest::Approx(distance(P, Q)).epsilon(1e-13));
    // 1 - |phi_c(z)|^2 = (1 - |c|^2)(1 - |z|^2) / |1 - (z, c)|^2
    const double lhs = 1 - norm2(mobius(C, P).z());
    const double rhs = (1 - norm2(C.z())) * (1 - norm2(P.z())) / std::norm(1.0 - herm(P.z(), C.z()));
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-14));
}

TEST_CASE("Cayley transform is an isometry onto the Siegel domain")
{
    const SiegelPoint a = cayley(P), b = cayley(Q);
    CHECK(a.varrho > 0);
    const BallPoint back = cayley_inverse(a);
    for (int j = 0; j < 2; ++j) CHECK(std::abs(back.z()[j] - P.z()[j]) < 1e-14);
    CHECK(siegel_distance(a, b) == doctest::Approx(distance(P, Q)).epsilon(1e-12));
}

TEST_CASE("points outside the ball are rejected")
{
    CHECK_THROWS_AS(BallPoint(cvec{{1.0, 0.0}, {0.0, 0.0}}), std::invalid_argument);
    CHECK_THROWS(SiegelPoint(cvec{{0.0, 0.0}}, 0.0, -1.0));
}

TEST_CASE("sphere rules integrate monomials exactly")
{
    for (int n : {2, 3}) {
        const SphereRule r = sphere_rule(n, 8);
        const double om = sphere_measure(2 * n - 1);
        CHECK(integrate_sphere(r, [](const cvec&) { return 1.0; }) == doctest::Approx(om).epsilon(1e-12));
        CHECK(integrate_sphere(r, [](const cvec& z) { return std::norm(z[0]); }) == doctest::Approx(om / n).epsilon(1e-12));
        CHECK(integrate_sphere(r, [](const cvec& z) { return std::pow(std::norm(z[0]), 2); }) ==
              doctest::Approx(2 * om / (n * (n + 1))).epsilon(1e-12));
        CHECK(std::fabs(integrate_sphere(r, [](const cvec& z) { return (z[0] * z[0] * std::conj(z[1])).real(); })) < 1e-14);
    }
    const SphereRule r4 = sphere_rule(4, 8, 7, 4000);
    CHECK(integrate_sphere(r4, [](const cvec&) { return 1.0; }) == doctest::Approx(sphere_measure(7)).epsilon(1e-13));
}

TEST_CASE("grid volume matches the geodesic ball volume")
{
    const QuadratureGrid g = build_grid(2, 48, 6, 3.0);
    const std::vector<double> one(g.size(), 1.0);
    CHECK(integrate_grid(g, one) == doctest::Approx(ball_volume(2, 3.0)).epsilon(1e-12));
    const auto conv = convolve_radial([](double) { return 1.0; }, g, one, {BallPoint::origin(2)});
    CHECK(conv[0] == doctest::Approx(ball_volume(2, 3.0)).epsilon(1e-12));
    CHECK_THROWS(build_grid(2, 2, 6));
}
