#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "hypk/diffops.hpp"

#include <cmath>
#include <random>

using namespace hypk;

namespace {

std::vector<std::vector<ld>> ball_points()
{
    return {{0.1L, -0.2L, 0.05L, 0.3L}, {-0.3L, 0.1L, 0.2L, -0.1L}, {0.0L, 0.0L, 0.0L, 0.0L}};
}

std::vector<std::vector<ld>> siegel_points()
{
    return {{0.1L, -0.2L, 0.3L, 1.0L}, {-0.3L, 0.4L, -0.1L, 0.7L}, {0.2L, 0.1L, 0.0L, 1.4L}};
}

cld smooth(const ld* x) { return std::exp(cld(0.3L * x[0] - 0.2L * x[1] * x[2], 0.5L * x[3] + x[0] * x[1])); }

} // namespace

TEST_CASE("fourth-order stencils are exact on quartics")
{
    const PointFn f = [](const ld* x) { return cld(x[0] * x[0] * x[0] * x[0] + x[1] * x[2] * x[3], 0); };
    const std::vector<ld> p{0.2L, 0.1L, -0.1L, 0.3L};
    const cld d2 = apply_at(combine({{1, [](const ld*, Coeffs& c) { c.c2[0][0] += 1; }}}), f, p.data(), 4, 1.0L / 64);
    CHECK(std::abs(d2 - cld(12 * 0.04L, 0)) < 1e-10L);
}

TEST_CASE("ball eigenfunctions of the Laplace-Beltrami operator")
{
    const int n = 2;
    const EigenParams e(1.3, cvec{{0.6, 0.0}, {0.0, 0.8}});
    const PointFn f = [&](const ld* x) { return eigenfunction(x, n, e); };
    for (const auto& p : ball_points()) {
        const cld lap = apply_at(ball::laplace_beltrami(n), f, p.data(), 2 * n, 1.0L / 128);
        const cld expect = -cld(1.3L * 1.3L + n * n, 0) * f(p.data());
        CHECK(std::abs(lap - expect) / std::abs(expect) < 1e-7);
    }
}

TEST_CASE("eigenfunction special values")
{
    const EigenParams e(1.0, cvec{{1.0, 0.0}, {0.0, 0.0}});
    CHECK(std::abs(eigenfunction(BallPoint::origin(2), e, 2) - cplx(1, 0)) < 1e-15);
    const EigenParams e0(0.0, cvec{{1.0, 0.0}, {0.0, 0.0}});
    const cplx v = eigenfunction(BallPoint(cvec{{0.3, 0.1}, {0.0, 0.2}}), e0, 2);
    CHECK(std::fabs(v.imag()) < 1e-15);
    CHECK(v.real() > 0);
}

TEST_CASE("Heisenberg commutator [X, Y] = -4T on polynomials")
{
    const int n = 2;
    const PointFn f = [](const ld* x) { return cld(x[0] * x[0] * x[2] + x[1] * x[2] * x[2] + x[0] * x[1], 0); };
    const std::vector<ld> p{0.3L, -0.2L, 0.4L, 1.0L};
    const GridFunction g = sample_patch(p, 4, 1.0L / 32, f);
    const GridFunction xy = hypk::apply(siegel::X(n, 0), hypk::apply(siegel::Y(n, 0), g));
    const GridFunction yx = hypk::apply(siegel::Y(n, 0), hypk::apply(siegel::X(n, 0), g));
    const GridFunction t = hypk::apply(siegel::T(n), g);
    CHECK(std::abs((xy - yx).center() + cld(4) * t.center()) < 1e-10L);
}

TEST_CASE("factorization holds in both models")
{
    StencilConfig cfg;
    for (int k : {1, 2}) {
        const auto rb = verify_factorization(Model::ball, 0.5L, k, smooth, ball_points(), cfg);
        CHECK(rb.pass);
        CHECK(rb.extrapolated_residual < 1e-5);
        const auto rs = verify_factorization(Model::siegel, 0.5L, k, smooth, siegel_points(), cfg);
        CHECK(rs.pass);
        CHECK(rs.extrapolated_residual < 1e-5);
    }
}

TEST_CASE("factorization fails for a wrong shift")
{
    // replacing the product by a different shift breaks the identity; the residual study must see it
    StencilConfig cfg;
    SidesFn sides = [&](const std::vector<ld>& x, ld h, int order) {
        const GridFunction g = sample_patch(x, 2 * stencil_radius(order), h, smooth);
        return std::pair{factor_product(Model::ball, 0.5L, 2, g, order).center(),
                         factor_rhs(Model::ball, 0.25L, 2, g, order).center()};
    };
    const auto r = residual_study("wrong shift", sides, ball_points(), cfg, 1e-5, 12.0);
    CHECK_FALSE(r.pass);
}

TEST_CASE("intertwining identities")
{
    StencilConfig cfg;
    CHECK(verify_intertwining(Intertwining::siegel_product, 0.5L, 0, smooth, siegel_points(), cfg).pass);
    CHECK(verify_intertwining(Intertwining::siegel_square, 0.5L, 0, smooth, siegel_points(), cfg).pass);
    CHECK(verify_intertwining(Intertwining::siegel_beta, 0.5L, 2.5L, smooth, siegel_points(), cfg).pass);
    CHECK(verify_intertwining(Intertwining::ball_geller, 0.5L, 1.0L, smooth, ball_points(), cfg).pass);
}

TEST_CASE("Rayleigh quotient of a compactly supported bump is above n^2")
{
    const int n = 2;
    const QuadratureGrid g = build_grid(n, 48, 8, 4.0);
    const RealBallFn f = [](const ld* x) -> ld {
        ld r2 = 0;
        for (int i = 0; i < 4; ++i) r2 += x[i] * x[i];
        const ld s = std::atanh(std::sqrt(r2)) / 2.5L;
        return s < 1 ? std::exp(-1 / (1 - s * s)) : 0;
    };
    const double q = rayleigh_quotient(g, f);
    CHECK(q > n * n);
    CHECK(q < 3 * n * n);
    CHECK(rayleigh_quotient(g, [&](const ld* x) { return 2 * f(x); }) == doctest::Approx(q).epsilon(1e-12));
    CHECK_THROWS(rayleigh_quotient(g, [](const ld*) -> ld { return 0; }));
}
