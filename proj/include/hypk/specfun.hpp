#pragma once

#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace hypk {

class domain_error : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class divergence_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

// Lanczos g = 7, nine terms.
inline constexpr std::array<double, 9> lanczos_p = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

// Gamma for x >= 0.5 from the Lanczos sum.
inline double lanczos_gamma(double x)
{
    x -= 1;
    double a = lanczos_p[0];
    const double t = x + 7.5;
    for (int i = 1; i < 9; ++i) a += lanczos_p[i] / (x + i);
    // split the power to delay overflow
    const double p = std::pow(t, 0.5 * (x + 0.5));
    return std::sqrt(2 * std::numbers::pi) * p * (p * std::exp(-t)) * a;
}

inline double lanczos_lgamma(double x)
{
    x -= 1;
    double a = lanczos_p[0];
    const double t = x + 7.5;
    for (int i = 1; i < 9; ++i) a += lanczos_p[i] / (x + i);
    return 0.5 * std::log(2 * std::numbers::pi) + (x + 0.5) * std::log(t) - t + std::log(a);
}

} // namespace detail

// Gamma function for x > 0.
inline double gamma_fn(double x)
{
    if (!(x > 0)) throw domain_error("gamma_fn: argument must be positive");
    if (x >= 0.5) return detail::lanczos_gamma(x);
    return detail::lanczos_gamma(x + 1) / x;
}

inline double log_gamma(double x)
{
    if (!(x > 0)) throw domain_error("log_gamma: argument must be positive");
    if (x >= 0.5) return detail::lanczos_lgamma(x);
    return detail::lanczos_lgamma(x + 1) - std::log(x);
}

// 1/Gamma on the whole real line (zero at the poles).
inline double rgamma(double x)
{
    if (x > 0) return 1.0 / gamma_fn(x);
    if (x == std::floor(x)) return 0.0;
    // reflection: 1/Gamma(x) = sin(pi x) Gamma(1-x) / pi
    return std::sin(std::numbers::pi * x) * gamma_fn(1 - x) / std::numbers::pi;
}

inline double pochhammer(double a, int k)
{
    if (k < 0) throw domain_error("pochhammer: negative k");
    double p = 1;
    for (int i = 0; i < k; ++i) p *= a + i;
    return p;
}

struct SeriesConfig {
    double rel_tol = 1e-15;
    long max_terms = 2000000;
};

struct SeriesResult {
    double value = 0;
    double tail_bound = 0;
    long terms = 0;
};

namespace detail {

inline bool nonpositive_integer(double x) { return x <= 0 && x == std::floor(x); }

} // namespace detail

// 2F1(a,b;c;z) for z in [0,1) by the power series, and z = 1 by Gauss summation.
inline SeriesResult gauss_2f1_series(double a, double b, double c, double z, const SeriesConfig& cfg = {})
{
    if (detail::nonpositive_integer(c)) throw domain_error("gauss_2f1: c is a non-positive integer");
    if (z < 0 || z > 1) throw domain_error("gauss_2f1: z outside [0,1]");
    SeriesResult r;
    if (z == 1) {
        if (!(c - a - b > 0)) throw divergence_error("gauss_2f1: series diverges at z=1 (c-a-b <= 0)");
        r.value = gamma_fn(c - a - b) * rgamma(c - a) * rgamma(c - b) / rgamma(c);
        return r;
    }
    double term = 1, sum = 1;
    const double big = 2 * (std::fabs(a) + std::fabs(b) + std::fabs(c)) + 2;
    for (long k = 0; k < cfg.max_terms; ++k) {
        const double q = (a + k) * (b + k) / ((c + k) * (k + 1.0));
        term *= q * z;
        sum += term;
        r.terms = k + 1;
        if (term == 0) {
            r.tail_bound = 0;
            break;
        }
        if (k + 1 > big) {
            const double kk = k + 1.0;
            const double qn = (a + kk) * (b + kk) / ((c + kk) * (kk + 1.0));
            const double ratio = z * std::max(1.0, std::fabs(qn));
            if (ratio < 1) {
                r.tail_bound = std::fabs(term) * z * std::fabs(qn) / (1 - ratio);
                if (r.tail_bound <= cfg.rel_tol * std::fabs(sum)) break;
            }
        }
    }
    r.value = sum;
    return r;
}

inline double gauss_2f1(double a, double b, double c, double z, const SeriesConfig& cfg = {})
{
    return gauss_2f1_series(a, b, c, z, cfg).value;
}

// 3F2(a1,a2,a3; b1,b2; 1), with Levin u-acceleration of the slowly convergent tail.
inline SeriesResult gen_3f2_at1(double a1, double a2, double a3, double b1, double b2,
                                const SeriesConfig& cfg = {})
{
    if (detail::nonpositive_integer(b1) || detail::nonpositive_integer(b2))
        throw domain_error("gen_3f2_at1: lower parameter is a non-positive integer");
    const double s = b1 + b2 - a1 - a2 - a3;
    SeriesResult r;
    for (double a : {a1, a2, a3}) {
        if (detail::nonpositive_integer(a)) {
            // terminating series
            const long kmax = static_cast<long>(-a);
            long double term = 1, sum = 1;
            for (long k = 0; k < kmax; ++k) {
                term *= (a1 + k) * (a2 + k) * static_cast<long double>(a3 + k) / ((b1 + k) * (b2 + k) * (k + 1.0L));
                sum += term;
            }
            r.value = static_cast<double>(sum);
            r.terms = kmax + 1;
            return r;
        }
    }
    if (!(s > 0)) throw divergence_error("gen_3f2_at1: series diverges (b1+b2-a1-a2-a3 <= 0)");

    constexpr int N = 64;
    std::vector<long double> terms(N), partial(N);
    long double t = 1, acc = 0;
    for (int k = 0; k < N; ++k) {
        terms[k] = t;
        acc += t;
        partial[k] = acc;
        t *= (a1 + k) * (a2 + k) * static_cast<long double>(a3 + k) / ((b1 + k) * (b2 + k) * (k + 1.0L));
    }
    // Levin u-transform on partial sums from index n0, beta = 1
    auto levin = [&](int n0, int order) {
        long double num = 0, den = 0;
        const long double beta = 1;
        long double binom = 1;
        for (int j = 0; j <= order; ++j) {
            const int m = n0 + j;
            const long double omega = (beta + m) * terms[m];
            const long double scale =
                std::pow((beta + n0 + j) / (beta + n0 + order), static_cast<long double>(order - 1));
            const long double c = ((j % 2) ? -1.0L : 1.0L) * binom * scale / omega;
            num += c * partial[m];
            den += c;
            binom = binom * (order - j) / (j + 1);
        }
        return num / den;
    };
    long double best = partial[N - 1], best_err = INFINITY, prev = 0;
    for (int order = 2; order <= 24; ++order) {
        const long double v = levin(4, order);
        if (order > 2) {
            const long double e = std::fabs(v - prev);
            if (e < best_err) {
                best_err = e;
                best = v;
            }
        }
        prev = v;
    }
    r.value = static_cast<double>(best);
    r.tail_bound = static_cast<double>(best_err);
    r.terms = N;
    if (r.tail_bound > std::max(cfg.rel_tol, 1e-10) * std::fabs(r.value))
        throw divergence_error("gen_3f2_at1: acceleration did not reach tolerance");
    return r;
}

// Jacobi polynomial P_m^{(alpha,beta)}(t) by the three-term recurrence.
inline double jacobi_poly(int m, double alpha, double beta, double t)
{
    if (m < 0) throw domain_error("jacobi_poly: negative degree");
    if (m == 0) return 1.0;
    double p0 = 1.0;
    double p1 = (alpha + 1) + (alpha + beta + 2) * (t - 1) / 2;
    for (int k = 2; k <= m; ++k) {
        const double s = 2 * k + alpha + beta;
        const double a1 = 2 * k * (k + alpha + beta) * (s - 2);
        const double a2 = (s - 1) * (alpha * alpha - beta * beta);
        const double a3 = (s - 2) * (s - 1) * s;
        const double a4 = 2 * (k + alpha - 1) * (k + beta - 1) * s;
        const double p2 = ((a2 + a3 * t) * p1 - a4 * p0) / a1;
        p0 = p1;
        p1 = p2;
    }
    return p1;
}

// ---- closed-form constants; `dim` is always the real dimension ----

// surface measure of the unit sphere S^d in R^{d+1}
inline double sphere_measure(int d)
{
    if (d < 0) throw domain_error("sphere_measure: negative dimension");
    return 2 * std::pow(std::numbers::pi, (d + 1) / 2.0) / gamma_fn((d + 1) / 2.0);
}

inline double log_sphere_measure(int d)
{
    return std::log(2.0) + (d + 1) / 2.0 * std::log(std::numbers::pi) - log_gamma((d + 1) / 2.0);
}

namespace constants_log {

inline double sobolev_S(int dim, double k)
{
    if (!(k >= 1 && k < dim / 2.0)) throw domain_error("S: requires 1 <= k < dim/2");
    return std::exp(log_gamma((dim + 2 * k) / 2) - log_gamma((dim - 2 * k) / 2) +
                    (2 * k / dim) * log_sphere_measure(dim));
}

inline double gamma_riesz(int dim, double alpha)
{
    if (!(alpha > 0 && alpha < dim)) throw domain_error("gamma_riesz: requires 0 < alpha < dim");
    return std::exp(dim / 2.0 * std::log(std::numbers::pi) + alpha * std::log(2.0) + log_gamma(alpha / 2) -
                    log_gamma((dim - alpha) / 2));
}

inline double beta0(int m, int dim)
{
    if (!(m >= 1 && m < dim)) throw domain_error("beta0: requires 1 <= m < dim");
    const double g = (m % 2) ? log_gamma((m + 1) / 2.0) - log_gamma((dim - m + 1) / 2.0)
                             : log_gamma(m / 2.0) - log_gamma((dim - m) / 2.0);
    const double inner = dim / 2.0 * std::log(std::numbers::pi) + m * std::log(2.0) + g;
    return std::exp(std::log(static_cast<double>(dim)) - log_sphere_measure(dim - 1) +
                    inner * dim / static_cast<double>(dim - m));
}

inline double beta_frac(int dim, double alpha)
{
    if (dim % 2) throw domain_error("beta_frac: dimension must be even");
    if (!(alpha > 0 && alpha < dim)) throw domain_error("beta_frac: requires 0 < alpha < dim");
    const double p = dim / alpha;
    const double pp = p / (p - 1);
    const double n = dim / 2.0;
    const double inner = n * std::log(std::numbers::pi) + alpha * std::log(2.0) + log_gamma(alpha / 2) -
                         log_gamma((dim - alpha) / 2);
    return std::exp(std::log(static_cast<double>(dim)) - log_sphere_measure(dim - 1) + pp * inner);
}

} // namespace constants_log

namespace constants_direct {

inline double sobolev_S(int dim, double k)
{
    if (!(k >= 1 && k < dim / 2.0)) throw domain_error("S: requires 1 <= k < dim/2");
    return gamma_fn((dim + 2 * k) / 2) / gamma_fn((dim - 2 * k) / 2) * std::pow(sphere_measure(dim), 2 * k / dim);
}

inline double gamma_riesz(int dim, double alpha)
{
    if (!(alpha > 0 && alpha < dim)) throw domain_error("gamma_riesz: requires 0 < alpha < dim");
    return std::pow(std::numbers::pi, dim / 2.0) * std::pow(2.0, alpha) * gamma_fn(alpha / 2) /
           gamma_fn((dim - alpha) / 2);
}

inline double beta0(int m, int dim)
{
    if (!(m >= 1 && m < dim)) throw domain_error("beta0: requires 1 <= m < dim");
    const double g = (m % 2) ? gamma_fn((m + 1) / 2.0) / gamma_fn((dim - m + 1) / 2.0)
                             : gamma_fn(m / 2.0) / gamma_fn((dim - m) / 2.0);
    const double inner = std::pow(std::numbers::pi, dim / 2.0) * std::pow(2.0, m) * g;
    return dim / sphere_measure(dim - 1) * std::pow(inner, dim / static_cast<double>(dim - m));
}

inline double beta_frac(int dim, double alpha)
{
    if (dim % 2) throw domain_error("beta_frac: dimension must be even");
    if (!(alpha > 0 && alpha < dim)) throw domain_error("beta_frac: requires 0 < alpha < dim");
    const double p = dim / alpha;
    const double n = dim / 2.0;
    const double inner =
        std::pow(std::numbers::pi, n) * std::pow(2.0, alpha) * gamma_fn(alpha / 2) / gamma_fn((dim - alpha) / 2);
    return dim / sphere_measure(dim - 1) * std::pow(inner, p / (p - 1));
}

} // namespace constants_direct

inline double sobolev_S(int dim, double k) { return constants_log::sobolev_S(dim, k); }
inline double gamma_riesz(int dim, double alpha) { return constants_log::gamma_riesz(dim, alpha); }
inline double beta0(int m, int dim) { return constants_log::beta0(m, dim); }
inline double beta_frac(int dim, double alpha) { return constants_log::beta_frac(dim, alpha); }

struct ConstantEntry {
    std::string name;
    std::vector<double> params;
    double value;
};

struct ConstantsTable {
    int dim = 0;
    std::vector<ConstantEntry> entries;

    double get(const std::string& name) const
    {
        for (const auto& e : entries)
            if (e.name == name) return e.value;
        throw std::out_of_range("ConstantsTable: no entry " + name);
    }
};

// All constants at real dimension `dim`; throws if any parameter is outside its formula's range.
inline ConstantsTable constants(int dim, double k, double alpha, int m)
{
    if (dim < 2) throw domain_error("constants: dimension must be >= 2");
    ConstantsTable t;
    t.dim = dim;
    t.entries.push_back({"S", {double(dim), k}, sobolev_S(dim, k)});
    t.entries.push_back({"beta0", {double(m), double(dim)}, beta0(m, dim)});
    t.entries.push_back({"gamma_riesz", {double(dim), alpha}, gamma_riesz(dim, alpha)});
    if (dim % 2 == 0) t.entries.push_back({"beta_frac", {double(dim), alpha}, beta_frac(dim, alpha)});
    t.entries.push_back({"omega", {double(dim - 1)}, sphere_measure(dim - 1)});
    return t;
}

} // namespace hypk
