#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "hypk/harness.hpp"

#include <cmath>

using namespace hypk;

TEST_CASE("config parsing")
{
    RunConfig cfg;
    apply_config(cfg, parse_config_text("# demo\nseed = 7\njobs=2\n\nout = r  # trailing\nh=0.03125\n"));
    CHECK(cfg.seed == 7);
    CHECK(cfg.jobs == 2);
    CHECK(cfg.out_dir == "r");
    CHECK(cfg.h == 0.03125);
    CHECK_THROWS(parse_config_text("seed 7"));
    RunConfig c2;
    CHECK_THROWS(apply_config(c2, {{"colour", "blue"}}));
    CHECK_THROWS(apply_config(c2, {{"seed", "x"}}));
    CHECK_THROWS(apply_config(c2, {{"jobs", "0"}}));
}

TEST_CASE("report pass is the conjunction of tolerances")
{
    ExperimentReport r;
    r.id = "x";
    r.anchor = {"label", "quote"};
    r.upper("err", 1e-9, 1e-8);
    r.lower("ratio", 15, 12);
    r.info("note", 3);
    CHECK(r.evaluate());
    r.lower("ratio", 11, 12);
    CHECK_FALSE(r.evaluate());
    r.lower("ratio", 13, 12);
    r.upper("err", std::nan(""), 1e-8);
    CHECK_FALSE(r.evaluate());
    const json j = r.to_json();
    for (const char* key : {"id", "anchor", "params", "metrics", "tolerance", "pass", "runtime_s"}) CHECK(j.contains(key));
    CHECK(j["tolerance"].contains("ratio:min"));
    ExperimentReport bad;
    bad.id = "y";
    CHECK_THROWS(bad.evaluate());
}

TEST_CASE("exceptions become failed reports")
{
    const auto r = run_experiment("boom", {"l", "q"}, [](ExperimentReport&) { throw std::runtime_error("bad"); });
    CHECK_FALSE(r.pass);
    CHECK(r.error == "bad");
}

TEST_CASE("seeded families are reproducible")
{
    const auto a = factorization_family(Model::siegel, 2, 42, 5), b = factorization_family(Model::siegel, 2, 42, 5);
    const auto c = factorization_family(Model::siegel, 2, 43, 5);
    REQUIRE(a.points.size() == 5);
    CHECK(a.points == b.points);
    CHECK(a.points != c.points);
    for (std::size_t i = 0; i < a.fns.size(); ++i) CHECK(a.fns[i](a.points[0].data()) == b.fns[i](a.points[0].data()));
    for (const auto& p : a.points) CHECK(p[siegel::rho_axis(2)] > 0);
    for (const auto& p : factorization_family(Model::ball, 2, 1, 20).points) {
        ld r2 = 0;
        for (ld v : p) r2 += v * v;
        CHECK(r2 <= 0.36L + 1e-15L);
    }
}

TEST_CASE("minorant delta")
{
    // exact optima: sum c_j^2 for k = 2; min(e1/2, sqrt(e2)) for k = 3
    CHECK(minorant_delta_exact(0, 2) == doctest::Approx(4));
    CHECK(minorant_delta_exact(0, 3) == doctest::Approx(std::sqrt(19.0)));
    CHECK(minorant_delta_exact(0.5, 2) == doctest::Approx(2.5));
    CHECK(minorant_delta_exact(0.5, 3) == doctest::Approx(std::sqrt(16.1875)));
    for (auto [a, k] : {std::pair{0.0, 2}, std::pair{0.5, 3}, std::pair{0.0, 3}, std::pair{0.5, 2}}) {
        const auto r = minorant_delta(a, k);
        CHECK(r.found);
        CHECK(r.delta > 0);
        CHECK(r.delta <= minorant_delta_exact(a, k));
        CHECK(r.delta >= minorant_delta_exact(a, k) - 2 * r.grid_step);
        CHECK(r.min_scaled_gap >= 0);
        CHECK(r.leading_coefficient >= 0);
    }
    const auto one = minorant_delta(0.3, 1);
    CHECK(one.found);
    CHECK(one.delta == doctest::Approx(2 * std::pow(0.3 - 1, 2) + 1));
    CHECK_THROWS(minorant_delta(0, 0));
}

TEST_CASE("planar Riesz composition")
{
    const double v = planar_riesz_composition(0.5, 0.5);
    CHECK(v == doctest::Approx(gamma_riesz(2, 0.5) * gamma_riesz(2, 0.5) / gamma_riesz(2, 1.0)).epsilon(1e-6));
    CHECK(planar_riesz_composition(0.3, 0.9) == doctest::Approx(gamma_riesz(2, 0.3) * gamma_riesz(2, 0.9) / gamma_riesz(2, 1.2)).epsilon(1e-6));
    CHECK_THROWS(planar_riesz_composition(1.5, 1.0));
}

TEST_CASE("manifest covers every family once")
{
    const auto m = report_manifest();
    std::set<std::string> names;
    for (const auto& f : m) names.insert(f.name);
    CHECK(names.size() == m.size());
    for (const char* n : {"factorization", "intertwining", "heat", "identity", "green", "asymptotics", "funk-hecke",
                          "spectral-gap", "constants", "rearrange", "conv", "l2-tail", "minorant"})
        CHECK(names.count(n) == 1);
}
