#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace hypk::quad {

struct Rule {
    std::vector<double> x;
    std::vector<double> w;
};

class quadrature_failure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Gauss-Legendre nodes on [-1, 1] by Newton iteration on P_n.
inline Rule make_gauss_legendre(int n)
{
    if (n < 1) throw std::invalid_argument("gauss_legendre: n < 1");
    Rule r;
    r.x.resize(n);
    r.w.resize(n);
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        long double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        long double dp = 0;
        for (int it = 0; it < 100; ++it) {
            long double p0 = 1, p1 = z;
            for (int k = 2; k <= n; ++k) {
                long double p2 = ((2 * k - 1) * z * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (z * p1 - p0) / (z * z - 1);
            long double dz = p1 / dp;
            z -= dz;
            if (std::fabs(static_cast<double>(dz)) < 1e-19) break;
        }
        {
            long double p0 = 1, p1 = z;
            for (int k = 2; k <= n; ++k) {
                long double p2 = ((2 * k - 1) * z * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (z * p1 - p0) / (z * z - 1);
        }
        double w = static_cast<double>(2 / ((1 - z * z) * dp * dp));
        r.x[i] = -static_cast<double>(z);
        r.x[n - 1 - i] = static_cast<double>(z);
        r.w[i] = w;
        r.w[n - 1 - i] = w;
    }
    if (n % 2 == 1) r.x[n / 2] = 0.0;
    return r;
}

inline const Rule& gauss_legendre(int n)
{
    static std::mutex mu;
    static std::map<int, Rule> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, make_gauss_legendre(n)).first;
    return it->second;
}

// Rule mapped onto [a, b].
inline Rule gauss_legendre(int n, double a, double b)
{
    const Rule& ref = gauss_legendre(n);
    Rule r = ref;
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    for (int i = 0; i < n; ++i) {
        r.x[i] = c + h * ref.x[i];
        r.w[i] = h * ref.w[i];
    }
    return r;
}

template <class F>
double gl(F&& f, double a, double b, int n)
{
    const Rule& r = gauss_legendre(n);
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double s = 0;
    for (int i = 0; i < n; ++i) s += r.w[i] * f(c + h * r.x[i]);
    return s * h;
}

template <class F>
double gl_composite(F&& f, double a, double b, int panels, int n)
{
    double s = 0;
    const double d = (b - a) / panels;
    for (int p = 0; p < panels; ++p) s += gl(f, a + p * d, a + (p + 1) * d, n);
    return s;
}

struct Result {
    double value = 0;
    double error = 0;
    long evals = 0;
};

// Globally adaptive bisection; each panel compares 10- and 20-point Gauss rules.
template <class F>
Result adaptive(F&& f, double a, double b, double rel_tol, double abs_tol = 0, int max_panels = 4000)
{
    struct Panel {
        double a, b, v, e;
    };
    auto eval = [&](double lo, double hi) {
        double v1 = gl(f, lo, hi, 10);
        double v2 = gl(f, lo, hi, 20);
        return Panel{lo, hi, v2, std::fabs(v2 - v1)};
    };
    Result res;
    if (a == b) return res;
    std::vector<Panel> panels{eval(a, b)};
    res.evals = 30;
    for (;;) {
        double v = 0, e = 0;
        for (const auto& p : panels) v += p.v, e += p.e;
        res.value = v;
        res.error = e;
        if (e <= std::max(abs_tol, rel_tol * std::fabs(v)) || !std::isfinite(v)) break;
        if (static_cast<int>(panels.size()) >= max_panels) break;
        // split every panel whose error is above the average share
        const double share = e / panels.size();
        std::vector<Panel> next;
        next.reserve(panels.size() * 2);
        for (const auto& p : panels) {
            if (p.e >= share && p.e > 0) {
                double m = 0.5 * (p.a + p.b);
                next.push_back(eval(p.a, m));
                next.push_back(eval(m, p.b));
                res.evals += 60;
            } else {
                next.push_back(p);
            }
        }
        panels.swap(next);
    }
    if (!std::isfinite(res.value)) throw quadrature_failure("adaptive: non-finite integrand");
    return res;
}

template <class F>
double integrate(F&& f, double a, double b, double rel_tol, double abs_tol = 0)
{
    return adaptive(f, a, b, rel_tol, abs_tol).value;
}

// Double-exponential rule on [a, b]; tolerant of integrable endpoint singularities.
// f is called as f(x, da, db) with da = x - a and db = b - x computed without cancellation.
template <class F>
Result tanh_sinh3(F&& f, double a, double b, double rel_tol, int max_level = 12)
{
    constexpr double half_pi = std::numbers::pi / 2;
    const double len = b - a;
    Result res;
    if (len == 0) return res;
    auto term = [&](double t) -> double {
        const double s = half_pi * std::sinh(t);
        const double c = half_pi * std::cosh(t);
        const double e = std::exp(-2 * std::fabs(s));
        // 1 - |x| = 2e/(1+e)
        const double om = 2 * e / (1 + e);
        const double w = c * 4 * e / ((1 + e) * (1 + e));
        if (om == 0 || w == 0) return 0.0;
        double da, db;
        if (s >= 0) {
            db = 0.5 * len * om;
            da = len - db;
        } else {
            da = 0.5 * len * om;
            db = len - da;
        }
        if (da <= 0 || db <= 0) return 0.0;
        const double x = (s >= 0) ? b - db : a + da;
        const double v = f(x, da, db);
        if (!std::isfinite(v)) return 0.0;
        return 0.5 * len * w * v;
    };
    const double tmax = 6.5;
    double h = 0.5;
    double sum = term(0);
    for (double t = h; t <= tmax; t += h) sum += term(t) + term(-t);
    double est = sum * h;
    res.evals = static_cast<long>(2 * tmax / h + 1);
    for (int lvl = 1; lvl <= max_level; ++lvl) {
        h *= 0.5;
        double add = 0;
        for (double t = h; t <= tmax; t += 2 * h) add += term(t) + term(-t);
        res.evals += static_cast<long>(tmax / h);
        sum += add;
        const double nest = sum * h;
        res.error = std::fabs(nest - est);
        est = nest;
        if (lvl >= 3 && res.error <= rel_tol * std::fabs(est)) break;
    }
    res.value = est;
    return res;
}

template <class F>
double tanh_sinh(F&& f, double a, double b, double rel_tol)
{
    return tanh_sinh3([&](double x, double, double) { return f(x); }, a, b, rel_tol).value;
}

// Periodic trapezoid on [0, 2pi).
template <class F>
double trapezoid_periodic(F&& f, int m)
{
    double s = 0;
    const double d = 2 * std::numbers::pi / m;
    for (int i = 0; i < m; ++i) s += f(i * d);
    return s * d;
}

} // namespace hypk::quad
