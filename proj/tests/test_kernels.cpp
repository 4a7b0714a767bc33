#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "hypk/kernels.hpp"

#include <cmath>
#include <filesystem>

using namespace hypk;

TEST_CASE("Bessel-Green-Riesz kernel against an independent scipy evaluation")
{
    // n = 2, alpha = 1
    CHECK(bgr_kernel(0, 1, 1.0, 2) == doctest::Approx(0.01669596280456).epsilon(1e-9));
    CHECK(bgr_kernel(0.5, 1, 1.0, 2) == doctest::Approx(0.014984784360861).epsilon(1e-9));
    CHECK(bgr_kernel(1, 1, 5.0, 2) == doctest::Approx(1.92235275e-08).epsilon(1e-7));
    CHECK(bgr_kernel(0.5, 1, 0.05, 2) == doctest::Approx(202.3285375646).epsilon(1e-9));
}

TEST_CASE("kernel parameter ranges")
{
    CHECK_THROWS_AS(bgr_kernel(0, 3.5, 1.0, 2), parameter_error);
    CHECK_THROWS(bgr_kernel(0.5, 1, 0.0, 2));
    CHECK_THROWS_AS(conv_kernel(1, 3.5, 1, 1.0, 2), parameter_error);
    MellinConfig bad;
    bad.rel_tol = 0.1;
    CHECK_THROWS(bad.validate());
}

TEST_CASE("Green's functions")
{
    // dimension 3: e^{-nu rho} / (4 pi sinh rho)
    CHECK(green_real(1, 1, 3) == doctest::Approx(0.024910556524700641418).epsilon(1e-13));
    CHECK(green_real_mellin(1, 1, 3) == doctest::Approx(0.024910556524700641418).epsilon(1e-8));
    for (double nu : {0.5, 1.0})
        for (double rho : {0.5, 2.0}) CHECK(green_complex(nu, rho, 2) == doctest::Approx(bgr_kernel(nu, 2, rho, 2)).epsilon(1e-8));
}

TEST_CASE("cosh 2r identity")
{
    for (double beta : {1.0, 2.5, 4.0})
        for (double rho : {0.1, 1.0, 3.0}) CHECK(cosh2r_identity_check(beta, rho).rel_err < 1e-10);
}

TEST_CASE("asymptotic fits recover the laws")
{
    auto k = [](double r) { return bgr_kernel(0.5, 1, r, 2); };
    CHECK(fit_power_exponent(k, 1e-3, 1e-2) == doctest::Approx(-3).epsilon(1e-3));
    CHECK(fit_decay_rate(k, -0.5, 8, 14) == doctest::Approx(2.5).epsilon(0.01));
    const auto lf = fit_line({0, 1, 2}, {1, 3, 5});
    CHECK(lf.slope == doctest::Approx(2));
}

TEST_CASE("radial kernel tables round-trip exactly")
{
    const auto nodes = kernel_nodes(1e-3, 0.5, 6, 8, 10);
    std::vector<double> v;
    for (double r : nodes) v.push_back(std::exp(-2 * r) / (r * r));
    const RadialKernel k("demo", {{"alpha", 1.0}}, nodes, v, -2.0);
    CHECK(k.tail.q == doctest::Approx(2).epsilon(1e-12));
    // two-node power fit also sees the e^{-2r} factor: slope -2 - 2r near r = 1e-3
    CHECK(k.small.p == doctest::Approx(-2).epsilon(0.01));
    CHECK(k(nodes[5]) == v[5]);
    const auto dir = std::filesystem::temp_directory_path() / "hypk_table_test";
    std::filesystem::create_directories(dir);
    k.save((dir / "k.csv").string(), (dir / "k.json").string());
    const RadialKernel back = RadialKernel::load((dir / "k.csv").string(), (dir / "k.json").string());
    CHECK(back.rho == k.rho);
    CHECK(back.value == k.value);
    CHECK(back.tail.q == k.tail.q);
    CHECK(back.kind == "demo");
    CHECK(back(3.3) == k(3.3));
    std::vector<double> bad = v;
    bad[2] = -1;
    CHECK_THROWS(RadialKernel("demo", {}, nodes, bad, -2.0));
}
