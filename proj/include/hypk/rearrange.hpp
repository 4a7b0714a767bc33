#pragma once

#include "hypk/geometry.hpp"
#include "hypk/kernels.hpp"
#include "hypk/parallel.hpp"
#include "hypk/quadrature.hpp"
#include "hypk/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace hypk {

struct WeightedSamples {
    std::vector<double> value, measure;
    double total = 0;

    WeightedSamples() = default;
    WeightedSamples(std::vector<double> v, std::vector<double> m) : value(std::move(v)), measure(std::move(m))
    {
        total = 0;
        for (double x : measure) total += x;
        validate();
    }

    void validate() const
    {
        if (value.size() != measure.size()) throw std::invalid_argument("WeightedSamples: size mismatch");
        double s = 0;
        for (double m : measure) {
            if (!(m > 0)) throw std::invalid_argument("WeightedSamples: measures must be positive");
            s += m;
        }
        if (std::fabs(s - total) > 1e-12 * std::max(1.0, std::fabs(s)))
            throw std::invalid_argument("WeightedSamples: total does not match the parts");
    }
};

// Right-continuous nonincreasing step function: value[i] on [t[i], t[i+1]), t[0] = 0, zero beyond t.back().
struct StepFunction {
    std::vector<double> t;     // breakpoints, size = value.size() + 1
    std::vector<double> value; // nonincreasing, nonnegative

    double support() const { return t.empty() ? 0.0 : t.back(); }

    double operator()(double s) const
    {
        if (s < 0) throw std::domain_error("StepFunction: negative argument");
        if (value.empty() || s >= t.back()) return 0.0;
        const std::size_t i = std::upper_bound(t.begin(), t.end(), s) - t.begin() - 1;
        return value[i];
    }

    // int_0^s f
    double integral(double s) const
    {
        double acc = 0;
        for (std::size_t i = 0; i < value.size() && t[i] < s; ++i) acc += value[i] * (std::min(s, t[i + 1]) - t[i]);
        return acc;
    }

    // int_0^inf f^p
    double power_integral(double p) const
    {
        double acc = 0;
        for (std::size_t i = 0; i < value.size(); ++i) acc += std::pow(value[i], p) * (t[i + 1] - t[i]);
        return acc;
    }

    void save_csv(const std::string& path) const
    {
        std::ofstream out(path);
        if (!out) throw std::runtime_error("cannot write " + path);
        out << "t_breakpoint,value\n";
        for (std::size_t i = 0; i < value.size(); ++i) out << format_double(t[i]) << ',' << format_double(value[i]) << '\n';
        out << format_double(t.back()) << ",0\n";
    }
};

// Sort by |value| descending and accumulate measures; equal values merge into one step.
inline StepFunction decreasing_rearrangement(const WeightedSamples& f)
{
    f.validate();
    std::vector<std::size_t> idx(f.value.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return std::fabs(f.value[a]) > std::fabs(f.value[b]); });
    StepFunction s;
    s.t.push_back(0.0);
    double acc = 0;
    for (std::size_t i : idx) {
        const double v = std::fabs(f.value[i]);
        acc += f.measure[i];
        if (!s.value.empty() && s.value.back() == v) {
            s.t.back() = acc;
        } else {
            s.value.push_back(v);
            s.t.push_back(acc);
        }
    }
    return s;
}

// f** on a step function: (1/t) int_0^t f*, exact
class DoubleStar {
public:
    explicit DoubleStar(StepFunction f) : f_(std::move(f)) {}
    double operator()(double t) const
    {
        if (!(t > 0)) throw std::domain_error("double_star: t must be positive");
        return f_.integral(t) / t;
    }
    const StepFunction& base() const { return f_; }

private:
    StepFunction f_;
};

inline DoubleStar double_star(const StepFunction& fstar) { return DoubleStar(fstar); }

namespace detail {

inline void check_lorentz(double p, double q)
{
    if (!(p > 1 && std::isfinite(p))) throw std::domain_error("lorentz_norm: p must be in (1, inf)");
    if (!(q >= 1)) throw std::domain_error("lorentz_norm: q must be >= 1");
}

} // namespace detail

// ||f||_{p,q} = (int_0^inf (t^{1/p} f*(t))^q dt/t)^{1/q}, sup_t t^{1/p} f*(t) for q = inf
inline double lorentz_norm(const StepFunction& fs, double p, double q)
{
    detail::check_lorentz(p, q);
    if (std::isinf(q)) {
        double m = 0;
        // on [t_i, t_{i+1}) the sup is approached at the right end
        for (std::size_t i = 0; i < fs.value.size(); ++i) m = std::max(m, std::pow(fs.t[i + 1], 1 / p) * fs.value[i]);
        return m;
    }
    // int t^{q/p - 1} dt = (p/q) t^{q/p}
    double acc = 0;
    for (std::size_t i = 0; i < fs.value.size(); ++i)
        acc += std::pow(fs.value[i], q) * (p / q) * (std::pow(fs.t[i + 1], q / p) - std::pow(fs.t[i], q / p));
    return std::pow(acc, 1 / q);
}

// Same with f** in place of f*; on each step f** = (A + v (t - t_i))/t, integrated in closed form where
// possible and by Gauss-Legendre on each step otherwise.
inline double lorentz_norm_star(const StepFunction& fs, double p, double q)
{
    detail::check_lorentz(p, q);
    const DoubleStar ds(fs);
    if (std::isinf(q)) {
        // t^{1/p} f**(t) = t^{1/p - 1} int_0^t f*: increasing on each step while f* > (1 - 1/p) f**, check ends and the
        // tail beyond the support where it decays
        double m = 0;
        for (std::size_t i = 0; i < fs.value.size(); ++i) {
            const double a = fs.t[i], b = fs.t[i + 1];
            const double A = fs.integral(a), v = fs.value[i];
            // stationary point of t^{1/p-1}(A + v(t-a)): t* = (1/p - 1)(A - v a) / (-v/p)
            const double c0 = A - v * a;
            const double ts = (v > 0) ? (p - 1) * c0 / v : -1;
            for (double t : {a, b, ts})
                if (t > 0 && t >= a && t <= b) m = std::max(m, std::pow(t, 1 / p) * ds(t));
        }
        return m;
    }
    double acc = 0;
    const double e = q / p - 1;
    for (std::size_t i = 0; i < fs.value.size(); ++i) {
        const double a = fs.t[i], b = fs.t[i + 1];
        const double c0 = fs.integral(a) - fs.value[i] * a, v = fs.value[i];
        // int_a^b t^{q/p - 1 - q} (c0 + v t)^q dt
        auto g = [&](double t) { return std::pow(t, e - q) * std::pow(c0 + v * t, q); };
        if (a == 0) {
            // c0 = 0 on the first step: integrand v^q t^{q/p - 1}
            acc += std::pow(v, q) * (p / q) * std::pow(b, q / p);
        } else {
            acc += quad::adaptive(g, a, b, 1e-14).value;
        }
    }
    // beyond the support f** = F/t with F = int f*: int_T^inf t^{q/p - 1 - q} F^q dt
    const double T = fs.support(), F = fs.integral(T);
    if (T > 0 && F > 0) acc += std::pow(F, q) * std::pow(T, q / p - q) / (q - q / p);
    return std::pow(acc, 1 / q);
}

// ---- rearranged radial kernels through the ball-volume bijection ----

// t = |B_rho| = omega_{2n-1} sinh^{2n}(rho) / (2n) and its inverse
inline double ball_volume_inverse(int n, double t)
{
    if (t < 0) throw std::domain_error("ball_volume_inverse: negative volume");
    const double s = std::pow(2 * n * t / sphere_measure(2 * n - 1), 1.0 / (2 * n));
    return std::asinh(s);
}

// k*(t) = k(rho(t)) for a radial nonincreasing kernel
inline std::function<double(double)> rearranged_radial(const std::function<double(double)>& k, int n)
{
    return [k, n](double t) { return k(ball_volume_inverse(n, t)); };
}

// int_0^{|B_R|} f*(s) ds = int_{B_R} f dV for radial nonincreasing f
inline double radial_mass(const std::function<double(double)>& f, int n, double R, double rel_tol = 1e-10)
{
    auto g = [&](double r, double, double) { return f(r) * volume_density(n, r); };
    return sphere_measure(2 * n - 1) * quad::tanh_sinh3(g, 0.0, R, rel_tol).value;
}

struct RearrangedKernelReport {
    std::string kind;
    int n = 0;
    std::vector<double> t_samples, values, normalized;
    double small_t_ratio = 0; // value / predicted leading term at the smallest t
    double large_t_exponent = 0, large_t_log_power = 0;
    double tolerance = 0.1;
    bool pass = false;
};

// kind: "k_zeta_alpha" (params zeta, alpha), "k_alpha" (alpha), "conv" (alpha, beta, zeta).
// Small-t leading term: 1/gamma_{2n}(s) (2n t / omega_{2n-1})^{(s - 2n)/2n} with s = alpha or alpha + beta.
inline RearrangedKernelReport rearranged_kernel_bounds(const std::string& kind, const std::map<std::string, double>& params,
                                                       int n, const std::vector<double>& t_samples,
                                                       double tol = 0.1)
{
    auto get = [&](const char* key) {
        auto it = params.find(key);
        if (it == params.end()) throw parameter_error(std::string("rearranged_kernel_bounds: missing ") + key);
        return it->second;
    };
    std::function<double(double)> k;
    double s;
    if (kind == "k_zeta_alpha") {
        const double zeta = get("zeta"), alpha = get("alpha");
        k = [=](double r) { return bgr_kernel(zeta, alpha, r, n); };
        s = alpha;
    } else if (kind == "k_alpha") {
        const double alpha = get("alpha");
        k = [=](double r) { return bgr_kernel(0.0, alpha, r, n); };
        s = alpha;
    } else if (kind == "conv") {
        const double alpha = get("alpha"), beta = get("beta"), zeta = get("zeta");
        k = [=](double r) { return conv_kernel(alpha, beta, zeta, r, n); };
        s = alpha + beta;
    } else {
        throw parameter_error("rearranged_kernel_bounds: unknown kind " + kind);
    }
    if (t_samples.empty()) throw std::invalid_argument("rearranged_kernel_bounds: no t samples");
    RearrangedKernelReport rep;
    rep.kind = kind;
    rep.n = n;
    rep.t_samples = t_samples;
    rep.tolerance = tol;
    const double om = sphere_measure(2 * n - 1), g = gamma_riesz(2 * n, s);
    for (double t : t_samples) {
        const double v = k(ball_volume_inverse(n, t));
        rep.values.push_back(v);
        rep.normalized.push_back(v * g * std::pow(2 * n * t / om, (2 * n - s) / (2 * n)));
    }
    const std::size_t i0 = std::min_element(t_samples.begin(), t_samples.end()) - t_samples.begin();
    rep.small_t_ratio = rep.normalized[i0];
    rep.pass = std::fabs(rep.small_t_ratio - 1) <= tol;
    return rep;
}

// ---- O'Neil's pointwise bound for u = f * g with radial f, g ----

struct ONeilReport {
    std::vector<double> t, lhs, rhs, slack;
    double min_slack = 0;
    bool pass = false;
};

// u*(t) <= (1/t) int_0^t f* int_0^t g* + int_t^inf f* g*, for nonnegative radial nonincreasing f, g.
// u is computed on the radial nodes of `grid` and rearranged from its shell samples.
inline ONeilReport oneil_pointwise_check(const std::function<double(double)>& f, const std::function<double(double)>& g,
                                         const QuadratureGrid& grid, const std::vector<double>& t_samples,
                                         double rel_tol = 1e-8)
{
    const int n = grid.n;
    const double R = grid.rho_max;
    // shells carry the full sphere measure since u is radial
    const double om = sphere_measure(2 * n - 1);
    std::vector<double> uv, um;
    for (std::size_t i = 0; i < grid.rho.size(); ++i) {
        uv.push_back(convolve_radial_complex(f, g, grid.rho[i], n, R, rel_tol));
        um.push_back(grid.radial_weight[i] * om);
    }
    const StepFunction us = decreasing_rearrangement(WeightedSamples(uv, um));
    ONeilReport rep;
    rep.min_slack = std::numeric_limits<double>::infinity();
    for (double t : t_samples) {
        const double r = ball_volume_inverse(n, t);
        const double F = radial_mass(f, n, r), G = radial_mass(g, n, r);
        auto fg = [&](double x) { return f(x) * g(x) * volume_density(n, x); };
        double tail = 0;
        for (double a = r; a < R; a += 1.0) tail += quad::adaptive(fg, a, std::min(a + 1.0, R), 1e-12).value;
        const double rhs = F * G / t + om * tail;
        const double lhs = us(t);
        rep.t.push_back(t);
        rep.lhs.push_back(lhs);
        rep.rhs.push_back(rhs);
        rep.slack.push_back(rhs - lhs);
        rep.min_slack = std::min(rep.min_slack, rhs - lhs);
    }
    rep.pass = rep.min_slack >= 0;
    return rep;
}

// ---- L^2 tail of the rearranged convolution kernel ----

struct L2TailReport {
    double value = 0, value_doubled = 0, relative_change = 0;
    double rho_c = 0, table_rho_max = 0;
    bool pass = false;
};

namespace detail {

// log of omega_{2n-1} sinh^{2n-1} r cosh r, safe for large r
inline double log_volume_density(int n, double r)
{
    const double e = std::exp(-2 * r);
    const double log_sinh = r + std::log1p(-e) - std::log(2.0), log_cosh = r + std::log1p(e) - std::log(2.0);
    return log_sphere_measure(2 * n - 1) + (2 * n - 1) * log_sinh + log_cosh;
}

// int_{rho_c}^{R} K^2 dV on the table plus the tail model c rho^p e^{-q rho} beyond R, the latter in x = R/rho
inline double l2_tail_value(const RadialKernel& K, int n, double rho_c, double R)
{
    auto g = [&](double r) {
        const double v = K(r);
        return v * v * volume_density(n, r);
    };
    double s = 0;
    for (double a = rho_c; a < R; a += 0.5) s += quad::adaptive(g, a, std::min(a + 0.5, R), 1e-10).value;
    s *= sphere_measure(2 * n - 1);
    const double lc = std::log(K.tail.c);
    auto tail = [&](double x, double, double) {
        const double r = R / x;
        return std::exp(2 * (lc + K.tail.p * std::log(r) - K.tail.q * r) + log_volume_density(n, r)) * R / (x * x);
    };
    return s + quad::tanh_sinh3(tail, 0.0, 1.0, 1e-10).value;
}

inline RadialKernel table_prefix(const RadialKernel& k, double rho_max, double tail_power)
{
    std::vector<double> r, v;
    for (std::size_t i = 0; i < k.rho.size() && k.rho[i] <= rho_max * (1 + 1e-12); ++i) {
        r.push_back(k.rho[i]);
        v.push_back(k.value[i]);
    }
    return RadialKernel(k.kind, k.params, r, v, tail_power);
}

} // namespace detail

// Table of k_alpha * k_{zeta,beta} on log-spaced nodes below 0.5 and a 0.25 step above.
inline RadialKernel conv_table(double alpha, double beta, double zeta, int n, double rho_max, int jobs = 1)
{
    const auto nodes = kernel_nodes(1e-3, 0.5, rho_max, 24, static_cast<int>(std::lround((rho_max - 0.5) * 4)));
    std::vector<double> vals(nodes.size());
    parallel_for(nodes.size(), jobs, [&](std::size_t i) { vals[i] = conv_kernel(alpha, beta, zeta, nodes[i], n); });
    return RadialKernel("conv", {{"alpha", alpha}, {"beta", beta}, {"zeta", zeta}, {"n", double(n)}}, nodes, vals,
                        alpha - 2);
}

// int_c^inf |[k_alpha * k_{zeta,beta}]*(t)|^2 dt = int_{rho > rho(c)} K^2 dV, computed with the table range R and
// again with 2R to show that the tail extrapolation is stable.
inline L2TailReport l2_tail_check(double alpha, double beta, double zeta, int n, double c, double rho_max = 12.0,
                                  int jobs = 1, double tol = 0.01)
{
    if (!(alpha > 0 && alpha < 1.5) || !(beta > 0 && beta < 2 * n - alpha) || !(zeta > 0))
        throw parameter_error("l2_tail_check: requires 0 < alpha < 3/2, 0 < beta < 2n - alpha, zeta > 0");
    if (!(c > 0)) throw parameter_error("l2_tail_check: c must be positive");
    L2TailReport rep;
    rep.rho_c = ball_volume_inverse(n, c);
    rep.table_rho_max = rho_max;
    const RadialKernel k2 = conv_table(alpha, beta, zeta, n, 2 * rho_max, jobs);
    const RadialKernel k1 = detail::table_prefix(k2, rho_max, alpha - 2);
    rep.value = detail::l2_tail_value(k1, n, rep.rho_c, k1.rho.back());
    rep.value_doubled = detail::l2_tail_value(k2, n, rep.rho_c, k2.rho.back());
    rep.relative_change = std::fabs(rep.value - rep.value_doubled) / rep.value_doubled;
    rep.pass = std::isfinite(rep.value) && rep.relative_change < tol;
    return rep;
}

} // namespace hypk
