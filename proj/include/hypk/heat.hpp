#pragma once

#include "hypk/quadrature.hpp"
#include "hypk/specfun.hpp"

#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace hypk {

namespace detail {

// One term c * r^a coth^b(r) csch^c(r) t^{-d} of (-(1/sinh r) d/dr)^m exp(-r^2/4t).
struct OddTerm {
    int a, b, c, d;
    long double coef;
};

inline std::vector<OddTerm> odd_terms_build(int m)
{
    using Key = std::array<int, 4>;
    std::map<Key, long double> cur{{{0, 0, 0, 0}, 1.0L}};
    for (int step = 0; step < m; ++step) {
        std::map<Key, long double> nxt;
        for (const auto& [k, v] : cur) {
            const auto [a, b, c, d] = k;
            // -(1/sinh) d/dr of each factor
            if (a > 0) nxt[{a - 1, b, c + 1, d}] += -a * v;
            if (b > 0) nxt[{a, b - 1, c + 3, d}] += b * v;
            if (c > 0) nxt[{a, b + 1, c + 1, d}] += c * v;
            nxt[{a + 1, b, c + 1, d + 1}] += v / 2;
        }
        cur.clear();
        for (const auto& [k, v] : nxt)
            if (v != 0) cur[k] = v;
    }
    std::vector<OddTerm> out;
    for (const auto& [k, v] : cur) out.push_back({k[0], k[1], k[2], k[3], v});
    return out;
}

inline const std::vector<OddTerm>& odd_terms(int m)
{
    static std::mutex mu;
    static std::map<int, std::vector<OddTerm>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(m);
    if (it == cache.end()) it = cache.emplace(m, odd_terms_build(m)).first;
    return it->second;
}

inline constexpr int odd_series_terms = 40;

// Taylor coefficients in r^2 of r / sinh r.
inline const std::array<long double, odd_series_terms>& r_over_sinh_series()
{
    static const auto s = [] {
        std::array<long double, odd_series_terms> q{}, inv{};
        long double f = 1;
        for (int j = 0; j < odd_series_terms; ++j) {
            q[j] = 1 / f; // sinh r / r = sum r^{2j}/(2j+1)!
            f *= (2 * j + 2) * (2 * j + 3);
        }
        inv[0] = 1;
        for (int j = 1; j < odd_series_terms; ++j) {
            long double acc = 0;
            for (int i = 1; i <= j; ++i) acc += q[i] * inv[j - i];
            inv[j] = -acc;
        }
        return inv;
    }();
    return s;
}

// P_m with (-(1/sinh r) d/dr)^m G = P_m G, G = exp(-r^2/4t), as a series in r^2:
// P_{k+1} = (r/sinh r) (P_k / (2t) - P_k'/r).
inline long double odd_series_value(int m, long double t, long double r)
{
    const auto& s = r_over_sinh_series();
    std::array<long double, odd_series_terms> p{}, q{};
    p[0] = 1;
    for (int k = 0; k < m; ++k) {
        for (int j = 0; j < odd_series_terms; ++j) {
            const long double dp = (j + 1 < odd_series_terms) ? 2 * (j + 1) * p[j + 1] : 0;
            q[j] = p[j] / (2 * t) - dp;
        }
        for (int j = 0; j < odd_series_terms; ++j) {
            long double acc = 0;
            for (int i = 0; i <= j; ++i) acc += s[i] * q[j - i];
            p[j] = acc;
        }
    }
    const long double r2 = r * r;
    long double v = 0;
    for (int j = odd_series_terms - 1; j >= 0; --j) v = v * r2 + p[j];
    return v;
}

} // namespace detail

// (-(1/sinh r) d/dr)^m exp(-r^2/4t), r >= 0
inline double odd_profile(int m, double t, double r)
{
    if (m < 0) throw std::invalid_argument("odd_profile: m < 0");
    const long double tl = t, rl = std::fabs(r);
    const long double g = std::exp(-rl * rl / (4 * tl));
    if (m == 0) return static_cast<double>(g);
    if (rl < 0.5L) return static_cast<double>(detail::odd_series_value(m, tl, rl) * g);
    const long double cth = 1 / std::tanh(rl), csh = 1 / std::sinh(rl), it = 1 / tl;
    long double s = 0;
    for (const auto& term : detail::odd_terms(m))
        s += term.coef * std::pow(rl, term.a) * std::pow(cth, term.b) * std::pow(csh, term.c) * std::pow(it, term.d);
    return static_cast<double>(s * g);
}

// Heat kernel on real hyperbolic space of odd dimension 2m+1, times exp(m^2 t).
inline double heat_real_odd_scaled(double t, double rho, int m)
{
    if (!(t > 0)) throw std::invalid_argument("heat kernel: t must be positive");
    if (m < 1) throw std::invalid_argument("heat_real_odd: m must be >= 1");
    const double pre = std::pow(2.0, -m - 1) * std::pow(std::numbers::pi, -m - 0.5) / std::sqrt(t);
    return pre * odd_profile(m, t, rho);
}

inline double heat_real_odd(double t, double rho, int m)
{
    return std::exp(-double(m) * m * t) * heat_real_odd_scaled(t, rho, m);
}

namespace detail {

inline constexpr double heat_rel_tol = 1e-12;

// Integral over r in (rho, r_cut) split into a near part in the variable v that removes the
// inverse square root and a far part in r.  near(v) and far(r) are the two integrands.
template <class Near, class Far, class VofR>
double split_integral(double rho, double r_cut, Near&& near, Far&& far, VofR&& v_of_r, double rel_tol)
{
    const double r1 = std::min(r_cut, rho + 1.0);
    const double v1 = v_of_r(r1);
    double s = quad::adaptive(near, 0.0, v1, rel_tol).value;
    if (r_cut > r1) {
        s += quad::adaptive(far, r1, r_cut, rel_tol, rel_tol * std::fabs(s)).value;
    }
    return s;
}

inline double cutoff_radius(double rho, double t, double max_extent)
{
    return std::min(std::sqrt(rho * rho + 200 * t), rho + max_extent);
}

} // namespace detail

// Heat kernel on real hyperbolic space of even dimension 2m, times exp((2m-1)^2 t / 4).
inline double heat_real_even_scaled(double t, double rho, int m, double rel_tol = detail::heat_rel_tol)
{
    if (!(t > 0)) throw std::invalid_argument("heat kernel: t must be positive");
    if (m < 1) throw std::invalid_argument("heat_real_even: m must be >= 1");
    rho = std::fabs(rho);
    const double s2 = std::sinh(rho / 2) * std::sinh(rho / 2);
    // cosh r = cosh rho + v^2
    auto r_of_v = [&](double v) { return 2 * std::asinh(std::sqrt(s2 + v * v / 2)); };
    auto v_of_r = [&](double r) { return std::sqrt(2 * std::sinh((r + rho) / 2) * std::sinh((r - rho) / 2)); };
    auto near = [&](double v) { return 2 * odd_profile(m, t, r_of_v(v)); };
    auto far = [&](double r) {
        const double d = 2 * std::sinh((r + rho) / 2) * std::sinh((r - rho) / 2);
        return std::sinh(r) / std::sqrt(d) * odd_profile(m, t, r);
    };
    const double r_cut = detail::cutoff_radius(rho, t, 80.0 / (2 * m - 1));
    const double integral = detail::split_integral(rho, r_cut, near, far, v_of_r, rel_tol);
    const double pre = std::pow(2 * std::numbers::pi, -m - 0.5) / std::sqrt(t);
    return pre * integral;
}

inline double heat_real_even(double t, double rho, int m, double rel_tol = detail::heat_rel_tol)
{
    const double shift = (2.0 * m - 1) * (2.0 * m - 1) / 4;
    return std::exp(-shift * t) * heat_real_even_scaled(t, rho, m, rel_tol);
}

// Heat kernel on complex hyperbolic space of complex dimension n, times exp(n^2 t), built from the
// odd real kernel of dimension 2n+1 via cosh 2r = cosh 2rho + v^2.
inline double heat_complex_scaled(double t, double rho, int n, double rel_tol = detail::heat_rel_tol)
{
    if (!(t > 0)) throw std::invalid_argument("heat kernel: t must be positive");
    if (n < 1) throw std::invalid_argument("heat_complex: n must be >= 1");
    rho = std::fabs(rho);
    const double sh2 = std::sinh(rho) * std::sinh(rho);
    auto r_of_v = [&](double v) { return std::asinh(std::sqrt(sh2 + v * v / 2)); };
    auto v_of_r = [&](double r) { return std::sqrt(2 * std::sinh(r + rho) * std::sinh(r - rho)); };
    auto near = [&](double v) {
        const double r = r_of_v(v);
        return std::numbers::sqrt2 * heat_real_odd_scaled(t, r, n) / std::cosh(r);
    };
    auto far = [&](double r) {
        const double d = 2 * std::sinh(r + rho) * std::sinh(r - rho);
        return 2 * std::numbers::sqrt2 * std::sinh(r) / std::sqrt(d) * heat_real_odd_scaled(t, r, n);
    };
    const double r_cut = detail::cutoff_radius(rho, t, 90.0 / n);
    return detail::split_integral(rho, r_cut, near, far, v_of_r, rel_tol);
}

inline double heat_complex(double t, double rho, int n, double rel_tol = detail::heat_rel_tol)
{
    return std::exp(-double(n) * n * t) * heat_complex_scaled(t, rho, n, rel_tol);
}

// Same kernel from the closed formula with the n-fold derivative inside the integral,
// integrated in r = rho + s^2 (independent substitution and quadrature path).
inline double heat_complex_direct(double t, double rho, int n, double rel_tol = detail::heat_rel_tol)
{
    if (!(t > 0)) throw std::invalid_argument("heat kernel: t must be positive");
    rho = std::fabs(rho);
    const double pre = std::pow(2.0, -n + 0.5) * std::pow(std::numbers::pi, -n - 0.5) * std::exp(-double(n) * n * t) /
                       std::sqrt(t);
    const double r_cut = detail::cutoff_radius(rho, t, 90.0 / n);
    double integral;
    if (rho == 0) {
        // sinh r / sqrt(cosh 2r - 1) = 1/sqrt 2
        integral = quad::adaptive([&](double r) { return odd_profile(n, t, r) / std::numbers::sqrt2; }, 0.0, r_cut,
                                  rel_tol, 1e-300)
                       .value;
    } else {
        auto f = [&](double s) {
            const double r = rho + s * s;
            // (cosh 2r - cosh 2rho) / s^2 = 2 sinh(r+rho) sinh(s^2) / s^2
            const double s2 = s * s;
            const double shs = (s2 < 1e-8) ? 1.0 + s2 * s2 / 6 : std::sinh(s2) / s2;
            const double q = 2 * std::sinh(r + rho) * shs;
            return 2 * std::sinh(r) / std::sqrt(q) * odd_profile(n, t, r);
        };
        const double s_cut = std::sqrt(r_cut - rho);
        const double s1 = std::min(1.0, s_cut);
        integral = quad::adaptive(f, 0.0, s1, rel_tol).value;
        if (s_cut > s1) integral += quad::adaptive(f, s1, s_cut, rel_tol, rel_tol * std::fabs(integral)).value;
    }
    return pre * integral;
}

} // namespace hypk
