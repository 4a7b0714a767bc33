#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "hypk/funkhecke.hpp"

#include <cmath>
#include <numbers>

using namespace hypk;

TEST_CASE("sphere integral is hypergeometric in r with constant omega")
{
    for (auto [n, alpha] : {std::pair{2, 1.0}, std::pair{2, 2.0}, std::pair{3, 2.0}}) {
        const auto r = verify_sphere_hypergeometric(alpha, {0.0, 0.3, 0.6, 0.9}, n);
        CHECK(r.pass);
        CHECK(r.variation < 1e-10);
        CHECK(r.constant_estimate == doctest::Approx(sphere_measure(2 * n - 1)).epsilon(1e-10));
    }
    // the alternative normalization 2 pi / Gamma(n) differs by pi^{n-1}
    const auto r = verify_sphere_hypergeometric(1.0, {0.5}, 2);
    CHECK(r.constant_estimate / r.two_pi_over_gamma_n == doctest::Approx(std::numbers::pi).epsilon(1e-10));
}

TEST_CASE("zonal and cubature routes agree")
{
    const PairingKernel K = [](cplx w) { return std::pow(std::norm(1.0 - w), -0.5); };
    const SphereRule rule = sphere_rule(2, 40);
    const cvec xi{{0.6, 0.0}, {0.0, 0.8}};
    CHECK(sphere_integral(K, 0.4, xi, rule) == doctest::Approx(sphere_integral_zonal(K, 0.4, 2)).epsilon(1e-10));
    CHECK_THROWS(sphere_integral(K, 1.0, xi, rule));
}

TEST_CASE("Funk-Hecke eigenvalues")
{
    const PairingKernel K = [](cplx w) { return std::pow(std::norm(1.0 - 0.5 * w), -1.0); };
    const int n = 2;
    // lambda_00 is the full sphere integral; K(w) = K1(0.5 w) with K1(w) = |1 - w|^{-2}
    const PairingKernel K1 = [](cplx w) { return std::pow(std::norm(1.0 - w), -1.0); };
    CHECK(funk_hecke_eigenvalue(0, 0, K, n) == doctest::Approx(sphere_integral_zonal(K1, 0.5, n)).epsilon(1e-10));
    // eigen-relation on a bidegree (1,1) harmonic
    const SphereRule rule = sphere_rule(n, 40);
    const cvec xi{{0.6, 0.0}, {0.0, 0.8}};
    cplx I = 0;
    for (std::size_t i = 0; i < rule.size(); ++i) I += rule.weights[i] * K(herm(xi, rule.nodes[i])) * rule.nodes[i][0] * std::conj(rule.nodes[i][1]);
    const double lam = funk_hecke_eigenvalue(1, 1, K, n);
    CHECK(std::abs(I - lam * xi[0] * std::conj(xi[1])) < 1e-9 * std::abs(lam));
    CHECK(funk_hecke_eigenvalue(2, 1, K, n) == doctest::Approx(funk_hecke_eigenvalue(1, 2, K, n)).epsilon(1e-12));
    CHECK(std::fabs(funk_hecke_eigenvalue(1, 0, [](cplx) { return 1.0; }, n)) < 1e-12);
    CHECK_THROWS(funk_hecke_eigenvalue(-1, 0, K, n));
}
