#pragma once

#include "hypk/diffops.hpp"
#include "hypk/funkhecke.hpp"
#include "hypk/geometry.hpp"
#include "hypk/heat.hpp"
#include "hypk/kernels.hpp"
#include "hypk/parallel.hpp"
#include "hypk/rearrange.hpp"
#include "hypk/specfun.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace hypk {

using json = nlohmann::json;

// ---- configuration ----

struct RunConfig {
    int n = 2;
    std::uint64_t seed = 42;
    int jobs = 1;
    std::string out_dir = "reports";
    int stencil_order = 4;
    double h = 1.0 / 64;
    int points = 20;
    int radial_count = 48;
    int sphere_degree = 12;
    double tol = 0; // > 0 overrides the primary tolerance of a single verify run

    void validate() const
    {
        if (n < 2) throw std::invalid_argument("config: n must be >= 2");
        if (jobs < 1) throw std::invalid_argument("config: jobs must be >= 1");
        if (stencil_order != 2 && stencil_order != 4) throw std::invalid_argument("config: stencil order must be 2 or 4");
        if (!(h > 0 && h < 0.1)) throw std::invalid_argument("config: h must be in (0, 0.1)");
        if (points < 1) throw std::invalid_argument("config: points must be >= 1");
        if (tol < 0) throw std::invalid_argument("config: tol must be >= 0");
    }

    StencilConfig stencil() const
    {
        StencilConfig c;
        c.order = stencil_order;
        c.h = static_cast<ld>(h);
        c.richardson = true;
        return c;
    }
};

inline std::string trim(const std::string& s)
{
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

// Flat key=value lines; '#' starts a comment.
inline std::map<std::string, std::string> parse_config_text(const std::string& text)
{
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto c = line.find('#'); c != std::string::npos) line.resize(c);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("config line " + std::to_string(lineno) + ": missing '='");
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) throw std::invalid_argument("config line " + std::to_string(lineno) + ": empty key");
        kv[key] = trim(line.substr(eq + 1));
    }
    return kv;
}

inline void apply_config(RunConfig& cfg, const std::map<std::string, std::string>& kv)
{
    for (const auto& [k, v] : kv) {
        try {
            if (k == "n") cfg.n = std::stoi(v);
            else if (k == "seed") cfg.seed = std::stoull(v);
            else if (k == "jobs") cfg.jobs = std::stoi(v);
            else if (k == "out") cfg.out_dir = v;
            else if (k == "stencil_order") cfg.stencil_order = std::stoi(v);
            else if (k == "h") cfg.h = std::stod(v);
            else if (k == "points") cfg.points = std::stoi(v);
            else if (k == "radial_count") cfg.radial_count = std::stoi(v);
            else if (k == "sphere_degree") cfg.sphere_degree = std::stoi(v);
            else if (k == "tol") cfg.tol = std::stod(v);
            else throw std::invalid_argument("unknown config key '" + k + "'");
        } catch (const std::invalid_argument& e) {
            if (std::string(e.what()).rfind("unknown", 0) == 0) throw;
            throw std::invalid_argument("config: bad value for '" + k + "': " + v);
        }
    }
    cfg.validate();
}

inline RunConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot read config " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    RunConfig cfg;
    apply_config(cfg, parse_config_text(ss.str()));
    return cfg;
}

// ---- reports ----

struct Anchor {
    std::string label, quote;
};

// Tolerances are upper bounds on the metric of the same name, or lower bounds when the
// tolerance key is "<metric>:min".
struct ExperimentReport {
    std::string id;
    Anchor anchor;
    json params = json::object();
    std::map<std::string, double> metrics;
    std::map<std::string, double> tolerance;
    bool pass = false;
    double runtime_s = 0;
    std::string error;

    void upper(const std::string& name, double value, double bound)
    {
        metrics[name] = value;
        tolerance[name] = bound;
    }
    void lower(const std::string& name, double value, double bound)
    {
        metrics[name] = value;
        tolerance[name + ":min"] = bound;
    }
    void info(const std::string& name, double value) { metrics[name] = value; }

    bool evaluate()
    {
        if (anchor.label.empty() || anchor.quote.empty()) throw std::logic_error("report " + id + ": empty anchor");
        pass = error.empty();
        for (const auto& [key, bound] : tolerance) {
            const bool is_min = key.size() > 4 && key.compare(key.size() - 4, 4, ":min") == 0;
            const std::string name = is_min ? key.substr(0, key.size() - 4) : key;
            const auto it = metrics.find(name);
            if (it == metrics.end()) throw std::logic_error("report " + id + ": tolerance without metric " + name);
            const double v = it->second;
            const bool ok = std::isfinite(v) && (is_min ? v >= bound : v <= bound);
            pass = pass && ok;
        }
        return pass;
    }

    json to_json() const
    {
        json m = json::object(), t = json::object();
        for (const auto& [k, v] : metrics) m[k] = std::isfinite(v) ? json(v) : json(nullptr);
        for (const auto& [k, v] : tolerance) t[k] = v;
        json j = {{"id", id},
                  {"anchor", {{"label", anchor.label}, {"quote", anchor.quote}}},
                  {"params", params},
                  {"metrics", m},
                  {"tolerance", t},
                  {"pass", pass},
                  {"runtime_s", runtime_s}};
        if (!error.empty()) j["error"] = error;
        return j;
    }
};

inline json residual_json(const ResidualReport& r)
{
    return {{"lemma_or_theorem", r.label},
            {"model", r.model},
            {"a", r.a},
            {"k", r.k},
            {"h", r.h},
            {"residual", r.residual},
            {"extrapolated_residual", r.extrapolated_residual},
            {"pass", r.pass}};
}

// Runs body(report) with timing; exceptions become a failed report carrying the message.
template <class F>
ExperimentReport run_experiment(const std::string& id, Anchor anchor, F&& body)
{
    ExperimentReport rep;
    rep.id = id;
    rep.anchor = std::move(anchor);
    const auto t0 = std::chrono::steady_clock::now();
    try {
        body(rep);
    } catch (const std::exception& e) {
        rep.error = e.what();
    }
    rep.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    rep.evaluate();
    return rep;
}

// ---- seeded test families ----

struct Monomial {
    cld coef;
    std::vector<int> pow;
};

// Random complex polynomial in `dim` real variables with `terms` monomials of total degree <= deg.
inline PointFn random_polynomial(std::mt19937_64& rng, int dim, int terms, int deg)
{
    std::uniform_real_distribution<double> U(-1, 1);
    std::vector<Monomial> ms;
    ms.push_back({cld(1, 0), std::vector<int>(dim, 0)});
    for (int t = 0; t < terms; ++t) {
        Monomial m{cld(U(rng), U(rng)), std::vector<int>(dim, 0)};
        const int d = 1 + static_cast<int>(rng() % deg);
        for (int i = 0; i < d; ++i) m.pow[rng() % dim] += 1;
        ms.push_back(std::move(m));
    }
    return [ms](const ld* x) {
        cld s = 0;
        for (const auto& m : ms) {
            ld p = 1;
            for (std::size_t i = 0; i < m.pow.size(); ++i)
                for (int e = 0; e < m.pow[i]; ++e) p *= x[i];
            s += m.coef * p;
        }
        return s;
    };
}

// Gaussian bump with a linear phase: exp(-|x - c|^2 / (2 s^2) + i b.x)
inline PointFn random_gaussian(std::mt19937_64& rng, const std::vector<ld>& center, ld spread)
{
    std::uniform_real_distribution<double> U(-1, 1);
    std::vector<ld> c = center, b(center.size());
    for (auto& v : b) v = U(rng);
    const ld s2 = 2 * spread * spread;
    return [c, b, s2](const ld* x) {
        ld r2 = 0, ph = 0;
        for (std::size_t i = 0; i < c.size(); ++i) {
            r2 += (x[i] - c[i]) * (x[i] - c[i]);
            ph += b[i] * x[i];
        }
        return std::exp(cld(-r2 / s2, ph));
    };
}

inline std::vector<ld> random_interior_point(std::mt19937_64& rng, Model model, int n)
{
    std::uniform_real_distribution<double> U(-1, 1), P(0.6, 1.6);
    std::vector<ld> x(2 * n);
    if (model == Model::ball) {
        // uniform direction, radius <= 0.6
        ld r2 = 0;
        for (auto& v : x) v = U(rng), r2 += v * v;
        const ld scale = 0.6L * std::pow(std::fabs(U(rng)), 0.5) / std::sqrt(r2);
        for (auto& v : x) v *= scale;
    } else {
        for (int i = 0; i < 2 * n - 2; ++i) x[i] = 0.5 * U(rng);
        x[siegel::t_axis(n)] = 0.5 * U(rng);
        x[siegel::rho_axis(n)] = P(rng);
    }
    return x;
}

struct TestFamily {
    std::vector<PointFn> fns;
    std::vector<std::string> names;
    std::vector<std::vector<ld>> points;
};

inline TestFamily factorization_family(Model model, int n, std::uint64_t seed, int points, int polys = 3,
                                       int gaussians = 2, int poly_degree = 4)
{
    std::mt19937_64 rng(seed);
    TestFamily fam;
    for (int i = 0; i < polys; ++i) {
        fam.fns.push_back(random_polynomial(rng, 2 * n, 8, poly_degree));
        fam.names.push_back("poly" + std::to_string(i));
    }
    std::uniform_real_distribution<double> S(0.5, 1.0);
    for (int i = 0; i < gaussians; ++i) {
        fam.fns.push_back(random_gaussian(rng, random_interior_point(rng, model, n), S(rng)));
        fam.names.push_back("gauss" + std::to_string(i));
    }
    for (int i = 0; i < points; ++i) fam.points.push_back(random_interior_point(rng, model, n));
    return fam;
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt)
{
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// ---- scalar minorant ----

struct MinorantResult {
    double delta = 0;
    bool found = false;
    double leading_coefficient = 0; // e1 - (k-1) delta, the top coefficient of the difference over lambda^2
    double min_scaled_gap = 0;      // min over the lambda grid of the difference / (lambda^2 (1+lambda^2)^{k-1})
    double grid_step = 0;
};

namespace detail {

// Coefficients in u = lambda^2 of G(u) = ([prod (u + c_j^2) - prod c_j^2] / u) - (u + delta)^{k-1}
inline std::vector<long double> minorant_poly(const std::vector<long double>& c2, long double delta)
{
    const std::size_t k = c2.size();
    std::vector<long double> p{1.0L};
    for (long double c : c2) {
        std::vector<long double> q(p.size() + 1, 0.0L);
        for (std::size_t i = 0; i < p.size(); ++i) q[i] += c * p[i], q[i + 1] += p[i];
        p = q;
    }
    std::vector<long double> g(k, 0.0L);
    for (std::size_t i = 1; i <= k; ++i) g[i - 1] = p[i];
    // (u + delta)^{k-1}
    long double binom = 1;
    for (std::size_t i = 0; i < k; ++i) {
        if (i > 0) binom = binom * (k - i) / i;
        g[i] -= binom * std::pow(delta, static_cast<long double>(k - 1 - i));
    }
    return g;
}

inline long double poly_eval(const std::vector<long double>& g, long double u)
{
    long double s = 0;
    for (std::size_t i = g.size(); i-- > 0;) s = s * u + g[i];
    return s;
}

} // namespace detail

// Largest delta on the grid {i * step} with prod(l^2 + c_j^2) - prod c_j^2 >= l^2 (l^2 + delta)^{k-1} on a
// dense lambda grid in [0, lambda_max] and a nonnegative leading coefficient beyond it; the returned
// delta is one grid step below the largest passing value.
inline MinorantResult minorant_delta(double a, int k, double lambda_max = 50, int grid_count = 4000,
                                     int lambda_points = 20001)
{
    if (k < 1) throw std::invalid_argument("minorant_delta: k must be >= 1");
    if (!(lambda_max > 0) || grid_count < 2 || lambda_points < 2)
        throw std::invalid_argument("minorant_delta: bad grid");
    std::vector<long double> c2;
    long double e1 = 0;
    for (int j = 1; j <= k; ++j) {
        const long double c = static_cast<long double>(a) - k + 2 * j - 2;
        c2.push_back(c * c);
        e1 += c * c;
    }
    MinorantResult res;
    const long double delta_hi = 2 * e1 + 1;
    res.grid_step = static_cast<double>(delta_hi / grid_count);
    if (k == 1) {
        // the inequality reads l^2 >= l^2 for every delta
        res.delta = static_cast<double>(delta_hi);
        res.found = true;
        return res;
    }
    auto check = [&](long double delta, long double& lead, long double& gap) {
        const auto g = detail::minorant_poly(c2, delta);
        lead = g[k - 2]; // the u^{k-1} terms cancel
        gap = std::numeric_limits<long double>::infinity();
        for (int i = 0; i < lambda_points; ++i) {
            const long double l = static_cast<long double>(lambda_max) * i / (lambda_points - 1);
            const long double u = l * l;
            gap = std::min(gap, detail::poly_eval(g, u) / std::pow(1 + u, static_cast<long double>(k - 1)));
        }
        // beyond lambda_max the sign is that of the leading coefficient
        return gap >= 0 && lead >= 0;
    };
    for (int i = grid_count; i >= 1; --i) {
        const long double delta = delta_hi * i / grid_count;
        long double lead, gap;
        if (!check(delta, lead, gap)) continue;
        const long double safe = delta_hi * (i - 1) / grid_count;
        if (safe <= 0) break;
        check(safe, lead, gap);
        res.delta = static_cast<double>(safe);
        res.found = true;
        res.leading_coefficient = static_cast<double>(lead);
        res.min_scaled_gap = static_cast<double>(gap);
        return res;
    }
    return res;
}

// Exact optimum for k = 2, 3 (used as an oracle): k = 2: c1^2 + c2^2; k = 3: min(e1/2, sqrt(e2)) in c_j^2.
inline double minorant_delta_exact(double a, int k)
{
    std::vector<double> c2;
    for (int j = 1; j <= k; ++j) c2.push_back(std::pow(a - k + 2 * j - 2, 2));
    if (k == 2) return c2[0] + c2[1];
    if (k == 3) {
        const double e1 = c2[0] + c2[1] + c2[2];
        const double e2 = c2[0] * c2[1] + c2[0] * c2[2] + c2[1] * c2[2];
        return std::min(e1 / 2, std::sqrt(e2));
    }
    throw std::invalid_argument("minorant_delta_exact: k must be 2 or 3");
}

// ---- Euclidean Riesz composition ----

namespace detail {

// int over the half plane {y1 < 1/2} of |y|^{a-2} |x - y|^{b-2} dy with x = (1, 0), polar about 0.
// Only the origin singularity lies inside; r beyond 1 uses r = 1/u.
inline double riesz_half_plane(double a, double b)
{
    const double rel = 1e-9;
    auto g = [&](double r, double c) { return std::pow(r * r + 1 - 2 * r * c, (b - 2) / 2); };
    auto ray = [&](double th) {
        const double c = std::cos(th);
        const double u_min = std::max(0.0, 2 * c); // r <= 1/(2 cos) when cos > 0
        auto near = [&](double r, double, double) { return std::pow(r, a - 1) * g(r, c); };
        double v = 0;
        if (u_min < 1) {
            v += quad::tanh_sinh3(near, 0.0, 1.0, rel).value;
            auto far = [&](double u, double, double) { return std::pow(u, -a - 1) * g(1 / u, c); };
            v += quad::tanh_sinh3(far, u_min, 1.0, rel).value;
        } else {
            v += quad::tanh_sinh3(near, 0.0, 1 / u_min, rel).value;
        }
        return v;
    };
    const double pi = std::numbers::pi;
    double s = 0;
    for (auto [lo, hi] : {std::pair{0.0, pi / 3}, std::pair{pi / 3, pi / 2}, std::pair{pi / 2, pi}})
        s += quad::adaptive(ray, lo, hi, rel).value;
    return 2 * s;
}

} // namespace detail

// int_{R^2} |y|^{a-2} |x - y|^{b-2} dy at |x| = 1, split along the bisector of 0 and x
inline double planar_riesz_composition(double a, double b)
{
    if (!(a > 0 && b > 0 && a + b < 2)) throw std::domain_error("planar_riesz_composition: need a, b > 0, a + b < 2");
    return detail::riesz_half_plane(a, b) + detail::riesz_half_plane(b, a);
}

// ---- experiment families ----

inline Anchor anchor(const std::string& label, const std::string& quote) { return {label, quote}; }

inline std::vector<ExperimentReport> run_factorization(const RunConfig& cfg, const std::vector<Model>& models,
                                                       const std::vector<double>& as, const std::vector<int>& ks)
{
    std::vector<ExperimentReport> out;
    const double tol = cfg.tol > 0 ? cfg.tol : 1e-5;
    std::uint64_t salt = 100;
    for (Model model : models) {
        const TestFamily fam = factorization_family(model, cfg.n, mix_seed(cfg.seed, salt++), cfg.points);
        for (double a : as) {
            for (int k : ks) {
                std::ostringstream id;
                id << "factorization-" << model_name(model) << "-a" << a << "-k" << k;
                out.push_back(run_experiment(
                    id.str(),
                    anchor("factorization identity",
                           "conjugated product of first-order-in-rho factors equals the product of shifted invariant "
                           "Laplacians"),
                    [&](ExperimentReport& rep) {
                        rep.params = {{"model", model_name(model)}, {"n", cfg.n}, {"a", a}, {"k", k},
                                      {"h", cfg.h}, {"order", cfg.stencil_order}, {"points", fam.points.size()},
                                      {"functions", fam.names}, {"seed", cfg.seed}};
                        std::vector<ResidualReport> rr(fam.fns.size());
                        parallel_for(fam.fns.size(), cfg.jobs, [&](std::size_t i) {
                            rr[i] = verify_factorization(model, static_cast<ld>(a), k, fam.fns[i], fam.points,
                                                         cfg.stencil(), tol);
                        });
                        double ext = 0, raw = 0, min_ratio = std::numeric_limits<double>::infinity();
                        json per = json::array();
                        for (std::size_t i = 0; i < rr.size(); ++i) {
                            ext = std::max(ext, rr[i].extrapolated_residual);
                            raw = std::max(raw, rr[i].residual);
                            if (rr[i].residual_half > fd_noise_floor) min_ratio = std::min(min_ratio, rr[i].ratio);
                            json j = residual_json(rr[i]);
                            j["function"] = fam.names[i];
                            j["ratio"] = rr[i].ratio;
                            per.push_back(j);
                        }
                        rep.params["residual_reports"] = per;
                        rep.upper("extrapolated_residual", ext, tol);
                        rep.info("raw_residual", raw);
                        rep.lower("refinement_ratio", min_ratio, cfg.stencil_order == 4 ? 12.0 : 3.0);
                    }));
            }
        }
    }
    return out;
}

inline std::vector<ExperimentReport> run_intertwining(const RunConfig& cfg)
{
    struct Case {
        Intertwining which;
        double a, p;
    };
    const std::vector<Case> cases = {{Intertwining::siegel_beta, 0.5, 1.0},  {Intertwining::siegel_beta, 0.5, 2.5},
                                     {Intertwining::siegel_square, 0.5, 0},  {Intertwining::siegel_product, 0.5, 0},
                                     {Intertwining::ball_geller, 0.5, 1.0}, {Intertwining::ball_geller, 0.0, 2.0}};
    const double tol = cfg.tol > 0 ? cfg.tol : 1e-4;
    std::vector<ExperimentReport> out;
    std::uint64_t salt = 200;
    for (const auto& c : cases) {
        const Model model = c.which == Intertwining::ball_geller ? Model::ball : Model::siegel;
        // degree 6 keeps both sides of the third-order compositions away from zero
        TestFamily fam = factorization_family(model, cfg.n, mix_seed(cfg.seed, salt++), 8, 1, 1, 6);
        if (c.which == Intertwining::ball_geller) {
            std::mt19937_64 rng(mix_seed(cfg.seed, salt++));
            fam.fns.push_back(random_polynomial(rng, 2 * cfg.n, 8, 2));
            fam.names.push_back("quadratic");
        }
        std::ostringstream id;
        id << "intertwining-" << intertwining_name(c.which) << "-a" << c.a << "-p" << c.p;
        out.push_back(run_experiment(
            id.str(), anchor("intertwining identity", "commutation of shifted second-order operators used to build the factorization"),
            [&](ExperimentReport& rep) {
                rep.params = {{"identity", intertwining_name(c.which)}, {"a", c.a}, {"p", c.p}, {"n", cfg.n},
                              {"h", cfg.h}, {"points", fam.points.size()}, {"functions", fam.names}};
                double ext = 0, min_ratio = std::numeric_limits<double>::infinity();
                json per = json::array();
                for (std::size_t i = 0; i < fam.fns.size(); ++i) {
                    const auto r = verify_intertwining(c.which, static_cast<ld>(c.a), static_cast<ld>(c.p), fam.fns[i],
                                                       fam.points, cfg.stencil(), tol);
                    ext = std::max(ext, r.extrapolated_residual);
                    if (r.residual_half > fd_noise_floor) min_ratio = std::min(min_ratio, r.ratio);
                    json j = residual_json(r);
                    j["function"] = fam.names[i];
                    per.push_back(j);
                }
                rep.params["residual_reports"] = per;
                rep.upper("extrapolated_residual", ext, tol);
                rep.info("refinement_ratio", min_ratio);
            }));
    }
    return out;
}

// mass of a radial kernel: omega_{N-1} int k(r) J(r) dr with the given Jacobian
inline double radial_mass_integral(const std::function<double(double)>& k, const std::function<double(double)>& jac,
                                   double omega, double r_max)
{
    double s = 0;
    for (double a = 0; a < r_max; a += 1.0) s += quad::adaptive([&](double r) { return k(r) * jac(r); }, a, a + 1, 1e-13).value;
    return omega * s;
}

inline RadialKernel tabulate(const std::string& kind, const std::map<std::string, double>& params,
                             const std::function<double(double)>& k, const std::vector<double>& nodes, double tail_power,
                             int jobs)
{
    std::vector<double> vals(nodes.size());
    parallel_for(nodes.size(), jobs, [&](std::size_t i) { vals[i] = k(nodes[i]); });
    return RadialKernel(kind, params, nodes, vals, tail_power);
}

inline std::vector<ExperimentReport> run_heat(const RunConfig& cfg)
{
    std::vector<ExperimentReport> out;
    out.push_back(run_experiment("heat-mass", anchor("heat kernel mass", "every heat kernel integrates to one"),
                                 [&](ExperimentReport& rep) {
        for (double t : {0.25, 1.0}) {
            const double r_max = 12 + 20 * std::sqrt(t);
            for (int m : {1, 2}) {
                const int N = 2 * m + 1;
                const double mass = radial_mass_integral([&](double r) { return heat_real_odd(t, r, m); },
                                                         [&](double r) { return std::pow(std::sinh(r), N - 1); },
                                                         sphere_measure(N - 1), r_max);
                std::ostringstream k;
                k << "real_dim" << N << "_t" << t;
                rep.upper(k.str(), std::fabs(mass - 1), 1e-8);
            }
            {
                const double mass = radial_mass_integral([&](double r) { return heat_real_even(t, r, 1); },
                                                         [&](double r) { return std::sinh(r); }, sphere_measure(1), r_max);
                std::ostringstream k;
                k << "real_dim2_t" << t;
                rep.upper(k.str(), std::fabs(mass - 1), 1e-6);
            }
            {
                const int n = 2;
                const double mass = radial_mass_integral([&](double r) { return heat_complex(t, r, n); },
                                                         [&](double r) { return volume_density(n, r); },
                                                         sphere_measure(2 * n - 1), r_max);
                std::ostringstream k;
                k << "complex_n2_t" << t;
                rep.upper(k.str(), std::fabs(mass - 1), 1e-5);
            }
        }
        rep.params = {{"t", {0.25, 1.0}}, {"real_dims", {2, 3, 5}}, {"complex_n", 2}};
    }));
    out.push_back(run_experiment("heat-routes", anchor("two heat kernel routes", "closed formula with n derivatives versus the odd-dimensional kernel pushed down by the cosh 2r substitution"),
                                 [&](ExperimentReport& rep) {
        double worst = 0;
        for (double t : {0.25, 0.5, 1.0})
            for (double rho : {0.0, 0.3, 1.0, 2.5}) {
                const double a = heat_complex(t, rho, 2), b = heat_complex_direct(t, rho, 2);
                worst = std::max(worst, std::fabs(a - b) / b);
            }
        rep.params = {{"n", 2}, {"t", {0.25, 0.5, 1.0}}, {"rho", {0.0, 0.3, 1.0, 2.5}}};
        rep.upper("max_rel_diff", worst, 1e-8);
    }));
    const std::vector<double> rhos = {0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0};
    out.push_back(run_experiment("heat-semigroup-real", anchor("heat semigroup", "h_t * h_s = h_{t+s} on real hyperbolic space of dimension 3"),
                                 [&](ExperimentReport& rep) {
        const double t = 0.3, s = 0.7;
        std::vector<double> dev(rhos.size());
        parallel_for(rhos.size(), cfg.jobs, [&](std::size_t i) {
            const double c = convolve_radial_real([&](double x) { return heat_real_odd(t, x, 1); },
                                                  [&](double x) { return heat_real_odd(s, x, 1); }, rhos[i], 3, 14, 1e-9);
            const double e = heat_real_odd(t + s, rhos[i], 1);
            dev[i] = std::fabs(c - e) / e;
        });
        rep.params = {{"dim", 3}, {"t", t}, {"s", s}, {"rho", rhos}};
        rep.upper("sup_rel_defect", *std::max_element(dev.begin(), dev.end()), 1e-4);
    }));
    out.push_back(run_experiment("heat-semigroup-complex", anchor("heat semigroup", "h_t * h_s = h_{t+s} on complex hyperbolic space, n = 2"),
                                 [&](ExperimentReport& rep) {
        const double t = 0.3, s = 0.7;
        const int n = 2;
        const auto nodes = kernel_nodes(1e-3, 0.5, 14, 24, 108);
        const RadialKernel kt = tabulate("heat", {{"t", t}, {"n", 2.0}}, [&](double r) { return heat_complex(t, r, n); },
                                         nodes, 0.0, cfg.jobs);
        const RadialKernel ks = tabulate("heat", {{"t", s}, {"n", 2.0}}, [&](double r) { return heat_complex(s, r, n); },
                                         nodes, 0.0, cfg.jobs);
        auto ft = [&](double r) { return r > 0 ? kt(r) : heat_complex(t, 0.0, n); };
        auto fs = [&](double r) { return r > 0 ? ks(r) : heat_complex(s, 0.0, n); };
        std::vector<double> dev(rhos.size());
        parallel_for(rhos.size(), cfg.jobs, [&](std::size_t i) {
            const double c = convolve_radial_complex(ft, fs, rhos[i], n, 14, 1e-7);
            const double e = heat_complex(t + s, rhos[i], n);
            dev[i] = std::fabs(c - e) / e;
        });
        rep.params = {{"n", n}, {"t", t}, {"s", s}, {"rho", rhos}, {"table_nodes", nodes.size()}};
        rep.upper("sup_rel_defect", *std::max_element(dev.begin(), dev.end()), 1e-4);
    }));
    return out;
}

inline std::vector<ExperimentReport> run_identity(const RunConfig&)
{
    return {run_experiment("cosh2r-identity", anchor("cosh 2r substitution identity", "closed form of the radial integral of cosh r sinh^{-beta} r against (cosh 2r - cosh 2rho)^{-1/2}"),
                           [&](ExperimentReport& rep) {
        double worst = 0;
        for (double beta : {1.0, 2.5, 4.0})
            for (double rho : {0.1, 1.0, 3.0}) worst = std::max(worst, cosh2r_identity_check(beta, rho).rel_err);
        rep.params = {{"beta", {1.0, 2.5, 4.0}}, {"rho", {0.1, 1.0, 3.0}}};
        rep.upper("max_rel_err", worst, 1e-8);
    })};
}

inline std::vector<ExperimentReport> run_green(const RunConfig& cfg)
{
    std::vector<ExperimentReport> out;
    out.push_back(run_experiment("green-crosscheck", anchor("Green's function", "resolvent kernel on complex hyperbolic space equals the Bessel-Green-Riesz kernel of order 2"),
                                 [&](ExperimentReport& rep) {
        const double tol = cfg.tol > 0 ? cfg.tol : 1e-4;
        double worst = 0;
        for (double nu : {0.5, 1.0})
            for (double rho : {0.5, 1.0, 2.0}) {
                const double g = green_complex(nu, rho, 2), b = bgr_kernel(nu, 2.0, rho, 2);
                worst = std::max(worst, std::fabs(g - b) / std::fabs(g));
            }
        rep.params = {{"n", 2}, {"nu", {0.5, 1.0}}, {"rho", {0.5, 1.0, 2.0}}};
        rep.upper("max_rel_diff", worst, tol);
    }));
    out.push_back(run_experiment("green-real-routes", anchor("real Green's function", "closed form versus the heat-kernel Mellin route in dimension 3"),
                                 [&](ExperimentReport& rep) {
        const double a = green_real(1.0, 1.0, 3), b = green_real_mellin(1.0, 1.0, 3);
        rep.params = {{"dim", 3}, {"nu", 1.0}, {"rho", 1.0}};
        rep.upper("rel_diff", std::fabs(a - b) / a, 1e-4);
        auto k = [](double r) { return green_real(1.0, r, 3); };
        const double q = fit_decay_rate(k, 0.0, 8, 14);
        rep.upper("decay_rate_rel_err", std::fabs(q - 2.0) / 2.0, 0.02);
    }));
    out.push_back(run_experiment("green-complex-asymptotics", anchor("Green's function asymptotics", "blow-up exponent 2n-2 at the origin and decay rate nu+n"),
                                 [&](ExperimentReport& rep) {
        auto k = [](double r) { return green_complex(1.0, r, 2); };
        const double p = fit_power_exponent(k, 1e-3, 1e-2);
        const double q = fit_decay_rate(k, 0.0, 8, 14);
        rep.params = {{"n", 2}, {"nu", 1.0}};
        rep.upper("small_exponent_rel_err", std::fabs(-p - 2.0) / 2.0, 0.03);
        rep.upper("decay_rate_rel_err", std::fabs(q - 3.0) / 3.0, 0.02);
    }));
    return out;
}

inline std::vector<ExperimentReport> run_asymptotics(const RunConfig& cfg)
{
    std::vector<ExperimentReport> out;
    const int n = 2;
    for (double alpha : {1.0, 2.0}) {
        for (double zeta : {0.0, 0.5, 1.0}) {
            std::ostringstream id;
            id << "kernel-asymptotics-alpha" << alpha << "-zeta" << zeta;
            out.push_back(run_experiment(id.str(), anchor("Bessel-Green-Riesz kernel asymptotics", "power law rho^{alpha-2n} at the origin and exponential decay at rate n or zeta+n"),
                                         [&](ExperimentReport& rep) {
                auto k = [&](double r) { return bgr_kernel(zeta, alpha, r, n); };
                const double p = fit_power_exponent(k, 1e-3, 1e-2);
                const double pt = zeta > 0 ? alpha / 2 - 1 : alpha - 2;
                const double q = fit_decay_rate(k, pt, 8, 14);
                const double q_ref = zeta > 0 ? zeta + n : n;
                rep.params = {{"n", n}, {"alpha", alpha}, {"zeta", zeta}, {"small_window", {1e-3, 1e-2}},
                              {"decay_window", {8, 14}}, {"tail_power", pt}};
                rep.info("small_exponent", p);
                rep.info("decay_rate", q);
                rep.upper("small_exponent_rel_err", std::fabs(p - (alpha - 2 * n)) / std::fabs(alpha - 2 * n), 0.02);
                rep.upper("decay_rate_rel_err", std::fabs(q - q_ref) / q_ref, 0.02);
                if (zeta == 0 && alpha == 1.0) {
                    // leading constant of the small-rho law at rho = 0.02
                    const double r = 0.02;
                    const double lead = k(r) * gamma_riesz(2 * n, alpha) * std::pow(r, 2 * n - alpha);
                    rep.upper("small_rho_constant_rel_err", std::fabs(lead - 1), 0.05);
                }
            }));
        }
    }
    (void)cfg;
    return out;
}

inline std::vector<ExperimentReport> run_funk_hecke(const RunConfig& cfg)
{
    std::vector<ExperimentReport> out;
    const std::vector<double> rs = {0.0, 0.3, 0.6, 0.9};
    for (auto [n, alpha] : std::vector<std::pair<int, double>>{{2, 1.0}, {2, 2.0}, {3, 2.0}}) {
        std::ostringstream id;
        id << "sphere-hypergeometric-n" << n << "-alpha" << alpha;
        out.push_back(run_experiment(id.str(), anchor("sphere integral of |1-(r xi,eta)|^{-alpha}", "hypergeometric profile F(alpha/2, alpha/2; n; r^2) times a constant"),
                                     [&](ExperimentReport& rep) {
            const double tol = cfg.tol > 0 ? cfg.tol : 1e-6;
            const auto r = verify_sphere_hypergeometric(alpha, rs, n, tol);
            rep.params = r.to_json();
            rep.upper("Q_variation", r.variation, tol);
            rep.upper("constant_rel_err", r.constant_error, tol);
            rep.info("constant_estimate", r.constant_estimate);
            rep.info("two_pi_over_gamma_n", r.two_pi_over_gamma_n);
        }));
    }
    out.push_back(run_experiment("funk-hecke-eigenvalues", anchor("Funk-Hecke formula", "eigenvalues of pairing kernels on bidegree spaces via a Jacobi-weighted integral"),
                                 [&](ExperimentReport& rep) {
        const PairingKernel K = [](cplx w) { return std::pow(std::norm(1.0 - 0.6 * w), -1.0); };
        double worst = 0, sym = 0;
        for (int n : {2, 3}) {
            const SphereRule rule = sphere_rule(n, 40);
            cvec xi(n);
            std::mt19937_64 rng(mix_seed(cfg.seed, 300 + n));
            std::normal_distribution<double> N01;
            for (auto& c : xi) c = cplx(N01(rng), N01(rng));
            const double nx = std::sqrt(norm2(xi));
            for (auto& c : xi) c /= nx;
            struct Witness {
                int j, k;
                std::function<cplx(const cvec&)> Y;
            };
            const std::vector<Witness> ws = {
                {0, 0, [](const cvec&) { return cplx(1); }},
                {1, 0, [](const cvec& e) { return e[0]; }},
                {0, 1, [](const cvec& e) { return std::conj(e[0]); }},
                {1, 1, [](const cvec& e) { return e[0] * std::conj(e[1]); }},
                {2, 0, [](const cvec& e) { return e[0] * e[0]; }},
                {2, 1, [](const cvec& e) { return e[0] * e[0] * std::conj(e[1]); }}};
            for (const auto& w : ws) {
                cplx I = 0;
                for (std::size_t i = 0; i < rule.size(); ++i) I += rule.weights[i] * K(herm(xi, rule.nodes[i])) * w.Y(rule.nodes[i]);
                const double lam = funk_hecke_eigenvalue(w.j, w.k, K, n);
                worst = std::max(worst, std::abs(I - lam * w.Y(xi)) / std::abs(lam * w.Y(xi)));
                sym = std::max(sym, std::fabs(lam - funk_hecke_eigenvalue(w.k, w.j, K, n)) / std::fabs(lam));
            }
            const PairingKernel one = [](cplx) { return 1.0; };
            rep.upper("constant_kernel_orthogonality_n" + std::to_string(n),
                      std::max(std::fabs(funk_hecke_eigenvalue(1, 0, one, n)), std::fabs(funk_hecke_eigenvalue(1, 1, one, n))),
                      1e-10);
        }
        rep.params = {{"kernel", "|1 - 0.6 w|^{-2}"}, {"bidegrees", "(0,0) (1,0) (0,1) (1,1) (2,0) (2,1)"}, {"n", {2, 3}}};
        rep.upper("eigen_rel_err", worst, 1e-6);
        rep.upper("bidegree_symmetry", sym, 1e-12);
    }));
    out.push_back(run_experiment("sphere-rotation-invariance", anchor("sphere integral invariance", "the pairing integral does not depend on the pole"),
                                 [&](ExperimentReport& rep) {
        const int n = 2;
        const SphereRule rule = sphere_rule(n, 40);
        const PairingKernel K = [](cplx w) { return std::pow(std::norm(1.0 - w), -0.5); };
        std::mt19937_64 rng(mix_seed(cfg.seed, 310));
        std::normal_distribution<double> N01;
        cvec e0(n, 0.0);
        e0[0] = 1;
        const double ref = sphere_integral(K, 0.5, e0, rule);
        double worst = 0;
        for (int i = 0; i < 10; ++i) {
            cvec xi(n);
            for (auto& c : xi) c = cplx(N01(rng), N01(rng));
            const double s = std::sqrt(norm2(xi));
            for (auto& c : xi) c /= s;
            worst = std::max(worst, std::fabs(sphere_integral(K, 0.5, xi, rule) - ref) / ref);
        }
        rep.params = {{"n", n}, {"r", 0.5}, {"alpha", 1.0}, {"rotations", 10}, {"rule_degree", 40}};
        rep.upper("max_rel_diff", worst, 1e-9);
        rep.upper("zonal_vs_rule", std::fabs(sphere_integral_zonal(K, 0.5, n) - ref) / ref, 1e-9);
    }));
    return out;
}

// smooth bump exp(-1/(1-s^2)) in s = d(z, c)/R times a real polynomial
inline RealBallFn random_bump(std::mt19937_64& rng, int n)
{
    std::uniform_real_distribution<double> U(-1, 1), Rad(1.0, 3.0);
    std::vector<ld> c(2 * n);
    ld c2 = 0;
    for (auto& v : c) v = U(rng), c2 += v * v;
    const ld cr = 0.5L * std::fabs(U(rng)) / std::sqrt(c2);
    for (auto& v : c) v *= cr;
    c2 = 0;
    for (auto v : c) c2 += v * v;
    const ld R = Rad(rng);
    std::vector<ld> lin(2 * n);
    for (auto& v : lin) v = U(rng);
    const ld q = U(rng);
    return [c, c2, R, lin, q, n](const ld* x) -> ld {
        ld r2 = 0;
        cld zc = 0;
        for (int j = 0; j < n; ++j) {
            const cld z(x[2 * j], x[2 * j + 1]), w(c[2 * j], c[2 * j + 1]);
            r2 += std::norm(z);
            zc += z * std::conj(w);
        }
        // 1 - |phi_c(z)|^2 = (1-|c|^2)(1-|z|^2)/|1-(z,c)|^2
        const ld om = (1 - c2) * (1 - r2) / std::norm(1.0L - zc);
        const ld phi = std::sqrt(std::max<ld>(0, 1 - om));
        const ld d = std::atanh(std::min<ld>(phi, 1 - 1e-18L));
        const ld s = d / R;
        if (s >= 1) return 0;
        ld p = 1 + q * r2;
        for (int i = 0; i < 2 * n; ++i) p += 0.5L * lin[i] * x[i];
        return p * std::exp(-1 / (1 - s * s));
    };
}

inline std::vector<ExperimentReport> run_spectral_gap(const RunConfig& cfg)
{
    std::vector<ExperimentReport> out;
    const int n = 2;
    out.push_back(run_experiment("spectral-gap-random", anchor("spectral gap", "the L^2 spectrum of -Delta_B is [n^2, infinity)"),
                                 [&](ExperimentReport& rep) {
        const QuadratureGrid g = build_grid(n, cfg.radial_count, cfg.sphere_degree, 4.0, 16);
        std::mt19937_64 rng(mix_seed(cfg.seed, 400));
        std::vector<RealBallFn> fs;
        for (int i = 0; i < 20; ++i) fs.push_back(random_bump(rng, n));
        std::vector<double> q(fs.size());
        parallel_for(fs.size(), cfg.jobs, [&](std::size_t i) { q[i] = rayleigh_quotient(g, fs[i]); });
        rep.params = {{"n", n}, {"functions", 20}, {"radial_count", cfg.radial_count}, {"sphere_degree", cfg.sphere_degree},
                      {"rho_max", 4.0}, {"quotients", q}};
        rep.lower("min_quotient_over_n2", *std::min_element(q.begin(), q.end()) / (n * n), 1 - 1e-3);
    }));
    out.push_back(run_experiment("spectral-gap-wide-bump", anchor("spectral gap", "wide radial bumps approach the bottom of the spectrum"),
                                 [&](ExperimentReport& rep) {
        const double L = 10;
        const QuadratureGrid g = build_grid(n, 160, 4, L, 16);
        const RealBallFn f = [L, n](const ld* x) -> ld {
            ld r2 = 0;
            for (int i = 0; i < 2 * n; ++i) r2 += x[i] * x[i];
            const ld rho = std::atanh(std::sqrt(r2));
            if (rho >= L) return 0;
            const ld s = std::sin(std::numbers::pi_v<long double> * rho / L);
            return std::pow(1 - r2, ld(n) / 2) * s * s;
        };
        const double q = rayleigh_quotient(g, f);
        rep.params = {{"n", n}, {"L", L}};
        rep.upper("quotient_over_n2", q / (n * n), 1.1);
        rep.lower("quotient_over_n2_floor", q / (n * n), 1 - 1e-3);
    }));
    return out;
}

inline std::vector<ExperimentReport> run_constants(const RunConfig&)
{
    std::vector<ExperimentReport> out;
    out.push_back(run_experiment("constants", anchor("sharp constants", "Adams constant beta_0(m, n), Riesz constant gamma_n(alpha) and beta(2n, alpha)"),
                                 [&](ExperimentReport& rep) {
        const double pi = std::numbers::pi;
        rep.upper("beta0_1_2_rel_err", std::fabs(beta0(1, 2) - 4 * pi) / (4 * pi), 1e-12);
        rep.upper("beta0_2_4_rel_err", std::fabs(beta0(2, 4) - 32 * pi * pi) / (32 * pi * pi), 1e-12);
        const int n = 2;
        const double alpha = 1, p = 2.0 * n / alpha, pp = p / (p - 1);
        const double rhs = 2 * n / sphere_measure(2 * n - 1) * std::pow(constants_direct::gamma_riesz(2 * n, alpha), pp);
        rep.upper("beta_frac_identity_rel_err", std::fabs(beta_frac(2 * n, alpha) - rhs) / rhs, 1e-12);
        rep.upper("log_vs_direct_rel_err",
                  std::max({std::fabs(beta0(2, 4) / constants_direct::beta0(2, 4) - 1),
                            std::fabs(sobolev_S(4, 1) / constants_direct::sobolev_S(4, 1) - 1),
                            std::fabs(gamma_riesz(4, 1.5) / constants_direct::gamma_riesz(4, 1.5) - 1)}),
                  1e-12);
        json table = json::array();
        for (const auto& e : constants(2 * n, 1, alpha, 2).entries)
            table.push_back({{"name", e.name}, {"params", e.params}, {"value", e.value}});
        rep.params = {{"constants", table}};
    }));
    out.push_back(run_experiment("riesz-composition", anchor("Euclidean Riesz composition", "I_alpha * I_beta = I_{alpha+beta} with the gamma_n normalization"),
                                 [&](ExperimentReport& rep) {
        const double a = 0.5, b = 0.5;
        const double num = planar_riesz_composition(a, b);
        const double pred = gamma_riesz(2, a) * gamma_riesz(2, b) / gamma_riesz(2, a + b);
        rep.params = {{"dim", 2}, {"alpha", a}, {"beta", b}, {"quadrature", num}, {"gamma_ratio", pred}};
        rep.upper("rel_err", std::fabs(num - pred) / pred, 0.01);
    }));
    return out;
}

inline std::vector<ExperimentReport> run_rearrange(const RunConfig& cfg)
{
    std::vector<ExperimentReport> out;
    out.push_back(run_experiment("rearrange-equimeasurability", anchor("non-increasing rearrangement", "f* is equimeasurable with f"),
                                 [&](ExperimentReport& rep) {
        std::mt19937_64 rng(mix_seed(cfg.seed, 500));
        std::uniform_real_distribution<double> U(0, 1);
        double worst = 0, ds_violation = 0;
        for (int it = 0; it < 50; ++it) {
            const int m = 1 + static_cast<int>(rng() % 40);
            std::vector<double> v, w;
            for (int i = 0; i < m; ++i) v.push_back((U(rng) - 0.3) * 5), w.push_back(0.01 + 3 * U(rng));
            const StepFunction fs = decreasing_rearrangement(WeightedSamples(v, w));
            for (double p : {1.0, 2.0, 3.5}) {
                double direct = 0;
                for (int i = 0; i < m; ++i) direct += std::pow(std::fabs(v[i]), p) * w[i];
                worst = std::max(worst, std::fabs(fs.power_integral(p) - direct) / direct);
            }
            const DoubleStar dstar(fs);
            double prev = std::numeric_limits<double>::infinity();
            for (int i = 1; i <= 200; ++i) {
                const double t = fs.support() * 1.2 * i / 200;
                const double a = dstar(t), b = fs(t);
                ds_violation = std::max({ds_violation, b - a, a - prev});
                prev = a;
            }
        }
        rep.params = {{"step_functions", 50}, {"p", {1.0, 2.0, 3.5}}};
        rep.upper("max_rel_err", worst, 1e-12);
        rep.upper("double_star_violation", std::max(0.0, ds_violation), 1e-12);
    }));
    out.push_back(run_experiment("rearrange-lorentz-comparison", anchor("Lorentz norms", "||f||_{p,q} <= ||f||*_{p,q} <= p/(p-1) ||f||_{p,q}"),
                                 [&](ExperimentReport& rep) {
        std::mt19937_64 rng(mix_seed(cfg.seed, 510));
        std::uniform_real_distribution<double> U(0, 1);
        double worst_lower = -1e300, worst_upper = -1e300;
        int failures = 0;
        for (int it = 0; it < 50; ++it) {
            const int m = 1 + static_cast<int>(rng() % 30);
            std::vector<double> v, w;
            for (int i = 0; i < m; ++i) v.push_back((U(rng) - 0.3) * 5), w.push_back(0.01 + 3 * U(rng));
            const StepFunction fs = decreasing_rearrangement(WeightedSamples(v, w));
            const double p = 1.2 + 4 * U(rng);
            const double q = (it % 5 == 0) ? std::numeric_limits<double>::infinity() : 1 + 5 * U(rng);
            const double L = lorentz_norm(fs, p, q), Ls = lorentz_norm_star(fs, p, q);
            const double lo = (L - Ls) / L, hi = (Ls - p / (p - 1) * L) / L;
            worst_lower = std::max(worst_lower, lo);
            worst_upper = std::max(worst_upper, hi);
            if (lo > 1e-12 || hi > 1e-12) ++failures;
        }
        StepFunction ind;
        ind.t = {0, 1};
        ind.value = {1};
        rep.params = {{"step_functions", 50}};
        rep.upper("failures", failures, 0);
        rep.info("max_lower_excess", worst_lower);
        rep.info("max_upper_excess", worst_upper);
        rep.upper("indicator_2_1_err", std::fabs(lorentz_norm(ind, 2, 1) - 2), 1e-12);
    }));
    out.push_back(run_experiment("rearrange-oneil", anchor("O'Neil pointwise bound", "(f*g)*(t) <= t^{-1} int_0^t f* int_0^t g* + int_t^inf f* g*"),
                                 [&](ExperimentReport& rep) {
        const QuadratureGrid g = build_grid(2, 48, 4, 8.0, 16);
        std::mt19937_64 rng(mix_seed(cfg.seed, 520));
        std::uniform_real_distribution<double> U(0, 1);
        double min_slack = std::numeric_limits<double>::infinity();
        json pairs = json::array();
        for (int pi = 0; pi < 3; ++pi) {
            const double s = 0.5 + U(rng), q = 2.2 + 1.5 * U(rng), amp = 0.5 + U(rng);
            auto f = [s, amp](double x) { return amp * std::exp(-x * x / (s * s)); };
            auto gk = [q](double x) { return std::exp(-q * x) / (1 + x * x); };
            const auto r = oneil_pointwise_check(f, gk, g, {0.1, 1.0, 5.0});
            for (std::size_t i = 0; i < r.t.size(); ++i) min_slack = std::min(min_slack, r.slack[i] / r.rhs[i]);
            pairs.push_back({{"spread", s}, {"decay", q}, {"amplitude", amp}, {"lhs", r.lhs}, {"rhs", r.rhs}});
        }
        rep.params = {{"n", 2}, {"t", {0.1, 1.0, 5.0}}, {"pairs", pairs}};
        rep.lower("min_relative_slack", min_slack, 0.0);
    }));
    out.push_back(run_experiment("rearranged-kernel-small-t", anchor("rearranged kernels", "small-t leading constants of k_{zeta,alpha}* and (k_{alpha/2} * k_{zeta,(2n-alpha)/2})*"),
                                 [&](ExperimentReport& rep) {
        const auto a = rearranged_kernel_bounds("k_zeta_alpha", {{"zeta", 1.0}, {"alpha", 1.0}}, 2, {1e-4});
        const auto c = rearranged_kernel_bounds("conv", {{"alpha", 1.0}, {"beta", 1.0}, {"zeta", 1.0}}, 2, {1e-6});
        const auto al = rearranged_kernel_bounds("k_alpha", {{"alpha", 1.0}}, 2, {1e-4});
        rep.params = {{"n", 2}, {"k_zeta_alpha", {{"zeta", 1.0}, {"alpha", 1.0}, {"t", 1e-4}}},
                      {"conv", {{"alpha", 1.0}, {"beta", 1.0}, {"zeta", 1.0}, {"t", 1e-6}}}};
        rep.info("k_zeta_alpha_ratio", a.small_t_ratio);
        rep.info("conv_ratio", c.small_t_ratio);
        rep.upper("k_zeta_alpha_upper", a.small_t_ratio, 1.1);
        rep.upper("k_zeta_alpha_rel_err", std::fabs(a.small_t_ratio - 1), 0.1);
        rep.upper("k_alpha_rel_err", std::fabs(al.small_t_ratio - 1), 0.1);
        rep.upper("conv_rel_err", std::fabs(c.small_t_ratio - 1), 0.1);
    }));
    return out;
}

// Small-rho bound with leading constant 1/gamma_{2n}(alpha+beta) and the large-rho envelope
// max(e^{-(zeta'+n) rho}, rho^{alpha-2} e^{-n rho}) with zeta' = zeta/2 and a fitted constant.
inline ExperimentReport conv_bound_check(double alpha, double beta, double zeta, int n, int jobs = 1)
{
    std::ostringstream id;
    id << "conv-bounds-alpha" << alpha << "-beta" << beta << "-zeta" << zeta;
    return run_experiment(id.str(), anchor("convolution kernel bounds", "k_alpha * k_{zeta,beta} near the origin and at infinity"),
                          [&](ExperimentReport& rep) {
        auto K = [&](double r) { return conv_kernel(alpha, beta, zeta, r, n); };
        const double r0 = 0.05;
        const double small = K(r0) * gamma_riesz(2 * n, alpha + beta) * std::pow(r0, 2 * n - alpha - beta);
        rep.upper("small_rho_normalized", small, 1.1);
        const double zp = zeta / 2;
        auto env = [&](double r) { return std::max(std::exp(-(zp + n) * r), std::pow(r, alpha - 2) * std::exp(-n * r)); };
        std::vector<double> fit_r = {3.0, 4.0, 5.0, 6.0};
        std::vector<double> vals(fit_r.size());
        parallel_for(fit_r.size(), jobs, [&](std::size_t i) { vals[i] = K(fit_r[i]); });
        double C = 0;
        for (std::size_t i = 0; i < fit_r.size(); ++i) C = std::max(C, vals[i] / env(fit_r[i]));
        const double k8 = K(8.0);
        rep.upper("log_excess_at_8", std::log(k8) - std::log(C * env(8.0)), 0.2);
        // independent route: direct 2-D convolution of the two kernels at moderate rho
        const auto nodes = kernel_nodes(1e-4, 0.5, 16, 40, 62);
        const RadialKernel ka = tabulate("k_alpha", {{"alpha", alpha}}, [&](double r) { return bgr_kernel(0, alpha, r, n); },
                                         nodes, alpha - 2, jobs);
        const RadialKernel kb = tabulate("k_zeta_alpha", {{"alpha", beta}, {"zeta", zeta}},
                                         [&](double r) { return bgr_kernel(zeta, beta, r, n); }, nodes, beta / 2 - 1, jobs);
        const double direct = convolve_radial_complex(ka, kb, 1.0, n, 16, 1e-6);
        const double via = K(1.0);
        rep.info("grid_route_rel_diff_rho1", std::fabs(direct - via) / via);
        rep.params = {{"n", n}, {"alpha", alpha}, {"beta", beta}, {"zeta", zeta}, {"rho_small", r0},
                      {"envelope_fit_rho", fit_r}, {"envelope_constant", C}, {"zeta_prime", zp},
                      {"grid_route_value_rho1", direct}, {"mellin_route_value_rho1", via}};
    });
}

inline std::vector<ExperimentReport> run_l2_tail(const RunConfig& cfg)
{
    return {run_experiment("l2-tail", anchor("L^2 tail of the rearranged convolution kernel", "int_c^inf |[k_alpha * k_{zeta,beta}]*(t)|^2 dt is finite"),
                           [&](ExperimentReport& rep) {
        const auto r = l2_tail_check(1, 1, 1, 2, 1.0, 12.0, cfg.jobs);
        rep.params = {{"n", 2}, {"alpha", 1}, {"beta", 1}, {"zeta", 1}, {"c", 1.0}, {"rho_c", r.rho_c},
                      {"table_rho_max", r.table_rho_max}, {"value_doubled", r.value_doubled}};
        rep.info("tail_integral", r.value);
        rep.upper("relative_change", r.relative_change, 0.01);
    })};
}

inline std::vector<ExperimentReport> run_minorant(const RunConfig&, const std::vector<std::pair<double, int>>& cases)
{
    std::vector<ExperimentReport> out;
    for (auto [a, k] : cases) {
        std::ostringstream id;
        id << "minorant-a" << a << "-k" << k;
        out.push_back(run_experiment(id.str(), anchor("scalar minorant", "prod(l^2 + c_j^2) - prod c_j^2 >= l^2 (l^2 + delta)^{k-1} with c_j = a-k+2j-2"),
                                     [&](ExperimentReport& rep) {
            const double lmax = 50;
            const auto r = minorant_delta(a, k, lmax);
            rep.params = {{"a", a}, {"k", k}, {"lambda_max", lmax}, {"grid_step", r.grid_step}};
            rep.lower("delta", r.found ? r.delta : 0.0, 1e-12);
            rep.lower("min_scaled_gap", r.min_scaled_gap, 0.0);
            rep.lower("leading_coefficient", r.leading_coefficient, 0.0);
            if (k == 2 || k == 3) {
                const double ex = minorant_delta_exact(a, k);
                rep.info("delta_exact", ex);
                rep.upper("delta_gap_to_exact", (ex - r.delta) / ex, 2 * r.grid_step / ex);
            }
        }));
    }
    return out;
}

// ---- report all ----

struct FamilyEntry {
    std::string name;
    std::function<std::vector<ExperimentReport>(const RunConfig&)> run;
};

inline std::vector<FamilyEntry> report_manifest()
{
    return {
        {"factorization", [](const RunConfig& c) { return run_factorization(c, {Model::ball, Model::siegel}, {0, 0.5, 1}, {1, 2}); }},
        {"intertwining", run_intertwining},
        {"heat", run_heat},
        {"identity", run_identity},
        {"green", run_green},
        {"asymptotics", run_asymptotics},
        {"funk-hecke", run_funk_hecke},
        {"spectral-gap", run_spectral_gap},
        {"constants", run_constants},
        {"rearrange", run_rearrange},
        {"conv", [](const RunConfig& c) { return std::vector<ExperimentReport>{conv_bound_check(1, 1, 1, 2, c.jobs)}; }},
        {"l2-tail", run_l2_tail},
        {"minorant", [](const RunConfig& c) { return run_minorant(c, {{0.0, 2}, {0.5, 3}}); }},
    };
}

inline void write_report(const std::string& dir, const ExperimentReport& r)
{
    std::filesystem::create_directories(dir);
    std::ofstream out(std::filesystem::path(dir) / (r.id + ".json"));
    if (!out) throw std::runtime_error("cannot write report " + r.id);
    out << r.to_json().dump(2) << '\n';
}

// Families run concurrently up to cfg.jobs; each writes its own reports; the index is assembled afterwards.
inline std::vector<ExperimentReport> report_all(const RunConfig& cfg, const std::function<void(const ExperimentReport&)>& progress = {})
{
    const auto manifest = report_manifest();
    std::vector<std::vector<ExperimentReport>> results(manifest.size());
    RunConfig inner = cfg;
    inner.tol = 0;
    parallel_for(manifest.size(), cfg.jobs, [&](std::size_t i) {
        RunConfig c = inner;
        c.jobs = 1;
        results[i] = manifest[i].run(c);
        if (results[i].empty()) throw std::logic_error("family " + manifest[i].name + " produced no reports");
    });
    std::vector<ExperimentReport> all;
    json index = json::array();
    for (std::size_t i = 0; i < manifest.size(); ++i) {
        for (const auto& r : results[i]) {
            write_report(cfg.out_dir, r);
            if (progress) progress(r);
            index.push_back({{"id", r.id}, {"family", manifest[i].name}, {"pass", r.pass}, {"runtime_s", r.runtime_s}});
            all.push_back(r);
        }
    }
    std::filesystem::create_directories(cfg.out_dir);
    std::ofstream out(std::filesystem::path(cfg.out_dir) / "index.json");
    out << json{{"seed", cfg.seed}, {"reports", index}}.dump(2) << '\n';
    return all;
}

} // namespace hypk
