#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "hypk/rearrange.hpp"

#include <cmath>
#include <random>

using namespace hypk;

namespace {
StepFunction indicator(double M)
{
    StepFunction s;
    s.t = {0, M};
    s.value = {1};
    return s;
}
} // namespace

TEST_CASE("rearrangement merges equal values and keeps distribution")
{
    const StepFunction fs = decreasing_rearrangement(WeightedSamples({1, -3, 1, 2}, {0.5, 1, 0.25, 2}));
    CHECK(fs.value == std::vector<double>{3, 2, 1});
    CHECK(fs.t == std::vector<double>{0, 1, 3, 3.75});
    CHECK(fs(0.5) == 3);
    CHECK(fs(3.75) == 0);
    CHECK(fs.power_integral(2) == doctest::Approx(9 + 8 + 0.75).epsilon(1e-15));
    CHECK_THROWS(WeightedSamples({1, 2}, {1, 0}));
    CHECK_THROWS(WeightedSamples({1, 2}, {1}));
}

TEST_CASE("double star averages")
{
    const DoubleStar ds = double_star(decreasing_rearrangement(WeightedSamples({1, 0}, {1, 1})));
    CHECK(ds(2) == doctest::Approx(0.5));
    CHECK(ds(0.5) == doctest::Approx(1));
    CHECK_THROWS(ds(0));
}

TEST_CASE("Lorentz norms of indicators")
{
    // M^{1/p} (p/q)^{1/q}
    CHECK(lorentz_norm(indicator(1), 2, 1) == doctest::Approx(2).epsilon(1e-15));
    CHECK(lorentz_norm(indicator(3), 4, 2) == doctest::Approx(std::pow(3.0, 0.25) * std::sqrt(2.0)).epsilon(1e-14));
    CHECK(lorentz_norm(indicator(3), 4, std::numeric_limits<double>::infinity()) == doctest::Approx(std::pow(3.0, 0.25)));
    CHECK_THROWS(lorentz_norm(indicator(1), 1, 2));
    CHECK_THROWS(lorentz_norm(indicator(1), 2, 0.5));
}

TEST_CASE("p = q recovers the L^p norm and the two-sided comparison holds")
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(0, 1);
    for (int it = 0; it < 20; ++it) {
        std::vector<double> v, w;
        for (int i = 0; i < 12; ++i) v.push_back(U(rng) * 4 - 1), w.push_back(0.1 + U(rng));
        const StepFunction fs = decreasing_rearrangement(WeightedSamples(v, w));
        const double p = 1.5 + 2 * U(rng), q = 1 + 3 * U(rng);
        CHECK(lorentz_norm(fs, p, p) == doctest::Approx(std::pow(fs.power_integral(p), 1 / p)).epsilon(1e-12));
        const double L = lorentz_norm(fs, p, q), Ls = lorentz_norm_star(fs, p, q);
        CHECK(L <= Ls * (1 + 1e-12));
        CHECK(Ls <= p / (p - 1) * L * (1 + 1e-12));
    }
}

TEST_CASE("ball volume bijection")
{
    for (double rho : {0.01, 1.0, 4.0}) CHECK(ball_volume_inverse(2, ball_volume(2, rho)) == doctest::Approx(rho).epsilon(1e-13));
    CHECK(radial_mass([](double) { return 1.0; }, 2, 1.5) == doctest::Approx(ball_volume(2, 1.5)).epsilon(1e-10));
    CHECK_THROWS(ball_volume_inverse(2, -1));
}

TEST_CASE("rearranged kernel leading constant")
{
    const auto r = rearranged_kernel_bounds("k_zeta_alpha", {{"zeta", 1.0}, {"alpha", 1.0}}, 2, {1e-4});
    CHECK(r.pass);
    CHECK(r.small_t_ratio == doctest::Approx(1).epsilon(0.01));
    CHECK_THROWS(rearranged_kernel_bounds("nope", {}, 2, {1e-4}));
    CHECK_THROWS(rearranged_kernel_bounds("k_alpha", {}, 2, {1e-4}));
}

TEST_CASE("O'Neil bound: zero kernel and homogeneity")
{
    const QuadratureGrid g = build_grid(2, 32, 4, 6.0);
    auto f = [](double x) { return std::exp(-x * x); };
    auto k = [](double x) { return std::exp(-3 * x); };
    const auto base = oneil_pointwise_check(f, k, g, {0.1, 1.0});
    CHECK(base.pass);
    const auto twice = oneil_pointwise_check([&](double x) { return 2 * f(x); }, k, g, {0.1, 1.0});
    for (std::size_t i = 0; i < base.t.size(); ++i) {
        CHECK(twice.lhs[i] == doctest::Approx(2 * base.lhs[i]).epsilon(1e-9));
        CHECK(twice.rhs[i] == doctest::Approx(2 * base.rhs[i]).epsilon(1e-9));
    }
    const auto zero = oneil_pointwise_check(f, [](double) { return 0.0; }, g, {1.0});
    CHECK(zero.lhs[0] == 0);
    CHECK(zero.rhs[0] == 0);
}
