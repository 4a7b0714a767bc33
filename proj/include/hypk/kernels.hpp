#pragma once

#include "hypk/heat.hpp"
#include "hypk/quadrature.hpp"
#include "hypk/specfun.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace hypk {

class parameter_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Cutoffs for the Mellin integral over t; zero or negative values select automatic cutoffs
// (t_min = rho^2/400, t_max = 60/zeta^2 or tail_T when zeta = 0).
struct MellinConfig {
    double t_min = 0;
    double t_max = 0;
    double tail_T = 1e8;
    double rel_tol = 1e-9;

    void validate() const
    {
        if (!(rel_tol > 0 && rel_tol <= 1e-3)) throw parameter_error("MellinConfig: rel_tol must be in (0, 1e-3]");
        if (t_min > 0 && t_max > 0 && !(t_min < t_max)) throw parameter_error("MellinConfig: t_min must be < t_max");
    }
};

namespace detail {

// int_0^inf w(t) ptilde_t(rho) dt in u = log t, with ptilde = exp(n^2 t) p_t.
// When the weight does not decay exponentially, the part beyond T is added from
// ptilde_t ~ C t^{-3/2} and w(t) ~ C' t^{a-1}: tail = w(T) ptilde_T T / (3/2 - a).
inline double mellin_heat(const std::function<double(double)>& w, double rho, int n, double t_lo, double t_hi,
                          double rel_tol, double tail_power)
{
    auto g = [&](double u) {
        const double t = std::exp(u);
        const double wt = w(t);
        if (wt == 0) return 0.0;
        return wt * t * heat_complex_scaled(t, rho, n, std::min(1e-11, rel_tol * 1e-2));
    };
    const double u_lo = std::log(t_lo), u_hi = std::log(t_hi);
    // split at the Gaussian peak region to help the adaptive rule
    double s = 0;
    const double u_mid = std::clamp(std::log(std::max(rho * rho, 1e-12) / 4), u_lo, u_hi);
    if (u_mid > u_lo) s += quad::adaptive(g, u_lo, u_mid, rel_tol).value;
    s += quad::adaptive(g, u_mid, u_hi, rel_tol, rel_tol * std::fabs(s)).value;
    if (tail_power > 0) {
        const double T = t_hi;
        s += w(T) * heat_complex_scaled(T, rho, n) * T / tail_power;
    }
    return s;
}

inline double auto_t_lo(double rho, const MellinConfig& cfg)
{
    if (cfg.t_min > 0) return cfg.t_min;
    return std::max(rho * rho / 400, 1e-14);
}

} // namespace detail

// k_{zeta,alpha}(rho) = (1/Gamma(alpha/2)) int t^{alpha/2-1} e^{(n^2-zeta^2)t} p_t(rho) dt
inline double bgr_kernel(double zeta, double alpha, double rho, int n, const MellinConfig& cfg = {})
{
    cfg.validate();
    if (!(rho > 0)) throw parameter_error("bgr_kernel: rho must be positive");
    if (n < 2) throw parameter_error("bgr_kernel: n must be >= 2");
    if (zeta < 0) throw parameter_error("bgr_kernel: zeta must be nonnegative");
    if (zeta == 0 && !(alpha > 0 && alpha < 3)) throw parameter_error("bgr_kernel: zeta = 0 requires 0 < alpha < 3");
    if (zeta > 0 && !(alpha > 0 && alpha < 2 * n)) throw parameter_error("bgr_kernel: requires 0 < alpha < 2n");
    const double lg = log_gamma(alpha / 2);
    const double z2 = zeta * zeta;
    auto w = [&](double t) { return std::exp((alpha / 2 - 1) * std::log(t) - z2 * t - lg); };
    const double t_lo = detail::auto_t_lo(rho, cfg);
    double t_hi = cfg.t_max > 0 ? cfg.t_max : (zeta > 0 ? std::max(60 / z2, 10 * t_lo) : cfg.tail_T);
    const double tail_power = (zeta > 0) ? 0.0 : 1.5 - alpha / 2;
    return detail::mellin_heat(w, rho, n, t_lo, t_hi, cfg.rel_tol, tail_power);
}

// (k_alpha * k_{zeta,beta})(rho) through the semigroup: the Mellin weights combine into
// W(tau) = tau^{(alpha+beta)/2-1}/(Gamma(alpha/2)Gamma(beta/2)) int_0^1 x^{alpha/2-1}(1-x)^{beta/2-1} e^{-zeta^2 tau (1-x)} dx.
inline double conv_weight(double alpha, double beta, double zeta, double tau)
{
    const double a = alpha / 2, b = beta / 2;
    const double A = zeta * zeta * tau;
    double inner;
    if (A <= 60) {
        inner = quad::tanh_sinh3(
                    [&](double, double da, double db) {
                        return std::exp((a - 1) * std::log(da) + (b - 1) * std::log(db) - A * db);
                    },
                    0.0, 1.0, 1e-12)
                    .value;
    } else {
        // y = A(1-x): A^{-b} int_0^60 (1-y/A)^{a-1} y^{b-1} e^{-y} dy
        inner = std::pow(A, -b) * quad::tanh_sinh3(
                                      [&](double y, double da, double) {
                                          return std::exp((a - 1) * std::log1p(-y / A) + (b - 1) * std::log(da) - y);
                                      },
                                      0.0, 60.0, 1e-12)
                                      .value;
    }
    return std::exp((a + b - 1) * std::log(tau) - log_gamma(a) - log_gamma(b)) * inner;
}

inline double conv_kernel(double alpha, double beta, double zeta, double rho, int n, const MellinConfig& cfg = {})
{
    cfg.validate();
    if (!(rho > 0)) throw parameter_error("conv_kernel: rho must be positive");
    if (!(alpha > 0 && alpha < 3) || !(zeta > 0) || !(beta > 0 && beta < 2 * n - alpha))
        throw parameter_error("conv_kernel: requires 0 < alpha < 3, zeta > 0, 0 < beta < 2n - alpha");
    auto w = [&](double t) { return conv_weight(alpha, beta, zeta, t); };
    const double t_lo = detail::auto_t_lo(rho, cfg);
    const double t_hi = cfg.t_max > 0 ? cfg.t_max : cfg.tail_T;
    return detail::mellin_heat(w, rho, n, t_lo, t_hi, cfg.rel_tol, 1.5 - alpha / 2);
}

// ---- Green's functions ----

namespace detail {

// int_0^pi (cosh r + cos s)^p (sin s)^{2 nu} ds without cancellation near s = pi
inline double green_inner(double r, double p, double nu)
{
    const double sh = std::sinh(r / 2);
    auto f = [&](double s, double da, double db) {
        const double base = (s < std::numbers::pi / 2) ? std::cosh(r) + std::cos(s)
                                                       : 2 * sh * sh + 2 * std::sin(db / 2) * std::sin(db / 2);
        const double sn = (s < std::numbers::pi / 2) ? std::sin(da) : std::sin(db);
        return std::exp(p * std::log(base) + 2 * nu * std::log(sn));
    };
    return quad::tanh_sinh3(f, 0.0, std::numbers::pi, 1e-13).value;
}

} // namespace detail

// (nu^2 - (N-1)^2/4 - Delta_H)^{-1} on real hyperbolic space of dimension N
inline double green_real(double nu, double rho, int N)
{
    if (!(nu > 0) || !(rho > 0)) throw parameter_error("green_real: nu, rho must be positive");
    if (N < 2) throw parameter_error("green_real: dimension must be >= 2");
    const double lc = -0.5 * N * std::log(2 * std::numbers::pi) + log_gamma((N - 1) / 2.0 + nu) -
                      (nu + 0.5) * std::log(2.0) - log_gamma(nu + 0.5);
    return std::exp(lc + (2 - N) * std::log(std::sinh(rho))) * detail::green_inner(rho, (N - 3) / 2.0 - nu, nu);
}

// Same operator on odd dimension N = 2m+1 from the heat kernel: int e^{-nu^2 t} e^{m^2 t} h_t dt
inline double green_real_mellin(double nu, double rho, int N, double rel_tol = 1e-10)
{
    if (N % 2 == 0) throw parameter_error("green_real_mellin: odd dimension required");
    const int m = (N - 1) / 2;
    auto g = [&](double u) {
        const double t = std::exp(u);
        return t * std::exp(-nu * nu * t) * heat_real_odd_scaled(t, rho, m);
    };
    const double u_lo = std::log(std::max(rho * rho / 400, 1e-14)), u_hi = std::log(60 / (nu * nu));
    return quad::adaptive(g, u_lo, u_hi, rel_tol).value;
}

// (nu^2 - n^2 - Delta_B)^{-1} on complex hyperbolic space from the real Green's function in dimension 2n+1
inline double green_complex(double nu, double rho, int n, double rel_tol = 1e-11)
{
    if (!(nu > 0) || !(rho > 0)) throw parameter_error("green_complex: nu, rho must be positive");
    if (n < 2) throw parameter_error("green_complex: n must be >= 2");
    const double lc = -(2 * n + 1) / 2.0 * std::log(2 * std::numbers::pi) + log_gamma(n + nu) -
                      (nu - 1) * std::log(2.0) - log_gamma(nu + 0.5);
    const double p = n - 1 - nu;
    const double sh2 = std::sinh(rho) * std::sinh(rho);
    auto r_of_v = [&](double v) { return std::asinh(std::sqrt(sh2 + v * v / 2)); };
    auto v_of_r = [&](double r) { return std::sqrt(2 * std::sinh(r + rho) * std::sinh(r - rho)); };
    auto near = [&](double v) {
        const double r = r_of_v(v);
        return std::pow(std::sinh(r), 1 - 2 * n) / (2 * std::cosh(r)) * detail::green_inner(r, p, nu);
    };
    auto far = [&](double r) {
        const double d = 2 * std::sinh(r + rho) * std::sinh(r - rho);
        return std::pow(std::sinh(r), 2 - 2 * n) / std::sqrt(d) * detail::green_inner(r, p, nu);
    };
    const double r_cut = rho + 80 / (n + nu);
    return std::exp(lc) * detail::split_integral(rho, r_cut, near, far, v_of_r, rel_tol);
}

// ---- the cosh 2r substitution identity ----

struct Cosh2rIdentityResult {
    double lhs, rhs, rel_err;
};

// lhs = int_rho^inf cosh r sinh^{-beta} r (cosh 2r - cosh 2rho)^{-1/2} dr
// rhs = Gamma(1/2)Gamma(beta/2) / (2 sqrt 2 Gamma((1+beta)/2) sinh^beta rho)
inline Cosh2rIdentityResult cosh2r_identity_check(double beta, double rho)
{
    if (!(beta > 0) || !(rho > 0)) throw parameter_error("cosh2r_identity_check: beta, rho must be positive");
    const double sh2 = std::sinh(rho) * std::sinh(rho);
    // v^2 = cosh 2r - cosh 2rho turns the integrand into sinh^{-beta-1}(r)/2 dv with sinh^2 r = sinh^2 rho + v^2/2;
    // v = w/(1-w) maps (0, inf) onto (0, 1)
    auto f = [&](double w, double, double db) {
        const double v = w / db;
        const double s2 = sh2 + v * v / 2;
        return 0.5 * std::pow(s2, -(beta + 1) / 2) / (db * db);
    };
    Cosh2rIdentityResult r;
    r.lhs = quad::tanh_sinh3(f, 0.0, 1.0, 1e-14, 14).value;
    r.rhs = std::exp(0.5 * std::log(std::numbers::pi) + log_gamma(beta / 2) - log_gamma((1 + beta) / 2) -
                     1.5 * std::log(2.0) - beta * std::log(std::sinh(rho)));
    r.rel_err = std::fabs(r.lhs - r.rhs) / std::fabs(r.rhs);
    return r;
}

// ---- radial convolutions ----

// Density W(rho, r, d) with (f*g)(rho) = int f(r) int_{|r-rho|}^{r+rho} g(d) W dd dr on complex hyperbolic space.
inline double conv_density_complex(double rho, double r, double d, int n)
{
    const double a = std::cosh(rho), b = std::cosh(r), c = std::cosh(d);
    // 2abc(1-Q) = (cosh(rho+r) - cosh d)(cosh d - cosh(rho-r)), 2abc(1+Q) = (cosh d + cosh(rho+r))(cosh d + cosh(rho-r))
    const double um = 4 * std::sinh((rho + r + d) / 2) * std::sinh((rho + r - d) / 2) * std::sinh((d + rho - r) / 2) *
                      std::sinh((d - rho + r) / 2);
    const double up = (c + std::cosh(rho + r)) * (c + std::cosh(rho - r));
    if (!(um > 0)) return 0.0;
    const double chi0 = 2 * std::atan2(std::sqrt(um), std::sqrt(up));
    double J;
    if (n == 2) {
        J = chi0;
    } else {
        const double Q = (up - um) / (up + um);
        J = quad::gl([&](double x) { return std::pow(std::cos(x) - Q, n - 2); }, 0.0, chi0, 24);
    }
    const double lf = std::lgamma(n - 1.0);
    return 4 * std::pow(std::numbers::pi, n - 1) / std::exp(lf) * std::sinh(r) * b * std::sinh(d) * c *
           std::pow(2 * a * b * c, n - 2) * J / std::pow(std::sinh(rho), 2 * n - 2);
}

// Real hyperbolic space of dimension N: W = omega_{N-2} sinh r sinh d (sinh r sinh d sin theta)^{N-3} / sinh^{N-2} rho ... in theta form.
inline double convolve_radial_real(const std::function<double(double)>& f, const std::function<double(double)>& g,
                                   double rho, int N, double r_max, double rel_tol = 1e-10)
{
    const double om = sphere_measure(N - 2);
    auto inner = [&](double r) {
        auto h = [&](double th) {
            const double cd = std::cosh(rho) * std::cosh(r) - std::sinh(rho) * std::sinh(r) * std::cos(th);
            return g(std::acosh(std::max(cd, 1.0))) * std::pow(std::sin(th), N - 2);
        };
        return quad::adaptive(h, 0.0, std::numbers::pi, rel_tol * 1e-1).value;
    };
    auto outer = [&](double r) { return om * f(r) * std::pow(std::sinh(r), N - 1) * inner(r); };
    double s = 0;
    const double step = 1.0;
    for (double a = 0; a < r_max; a += step) s += quad::adaptive(outer, a, std::min(a + step, r_max), rel_tol).value;
    return s;
}

inline double convolve_radial_complex(const std::function<double(double)>& f, const std::function<double(double)>& g,
                                      double rho, int n, double r_max, double rel_tol = 1e-9)
{
    if (rho < 1e-9) {
        // (f*g)(0) = int f g dV
        auto h = [&](double r) { return f(r) * g(r) * std::pow(std::sinh(r), 2 * n - 1) * std::cosh(r); };
        return sphere_measure(2 * n - 1) * quad::adaptive(h, 0.0, r_max, rel_tol).value;
    }
    // d = lo + (hi - lo)(1 - cos phi)/2 absorbs the square-root behaviour of the density at both ends
    auto inner = [&](double r) {
        const double lo = std::fabs(r - rho), hi = r + rho, half = (hi - lo) / 2;
        auto h = [&](double phi) {
            const double d = lo + half * (1 - std::cos(phi));
            return g(d) * conv_density_complex(rho, r, d, n) * half * std::sin(phi);
        };
        return quad::adaptive(h, 0.0, std::numbers::pi, rel_tol * 0.1).value;
    };
    auto outer = [&](double r) { return f(r) * inner(r); };
    double s = quad::adaptive(outer, 0.0, rho, rel_tol).value;
    for (double a = rho; a < r_max; a += 1.0)
        s += quad::adaptive(outer, a, std::min(a + 1.0, r_max), rel_tol, rel_tol * std::fabs(s)).value;
    return s;
}

// ---- tabulated radial kernels ----

struct PowerModel {
    double c = 0, p = 0; // c rho^p
};

struct TailModel {
    double c = 0, p = 0, q = 1; // c rho^p e^{-q rho}
};

inline std::string format_double(double v)
{
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& s)
{
    double v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc()) throw std::runtime_error("parse_double: bad number '" + s + "'");
    return v;
}

class RadialKernel {
public:
    std::string kind;
    std::map<std::string, double> params;
    std::vector<double> rho, value;
    PowerModel small;
    TailModel tail;

    RadialKernel() = default;

    // Fits the small-rho model from the first two nodes and the tail rate from the last two
    // nodes with the power fixed at `tail_power`.
    RadialKernel(std::string kind_, std::map<std::string, double> params_, std::vector<double> rho_,
                 std::vector<double> value_, double tail_power)
        : kind(std::move(kind_)), params(std::move(params_)), rho(std::move(rho_)), value(std::move(value_))
    {
        validate_table();
        const std::size_t m = rho.size();
        small.p = std::log(value[1] / value[0]) / std::log(rho[1] / rho[0]);
        small.c = value[0] / std::pow(rho[0], small.p);
        tail.p = tail_power;
        const double l1 = std::log(value[m - 2]) - tail_power * std::log(rho[m - 2]);
        const double l2 = std::log(value[m - 1]) - tail_power * std::log(rho[m - 1]);
        tail.q = -(l2 - l1) / (rho[m - 1] - rho[m - 2]);
        tail.c = std::exp(l2 + tail.q * rho[m - 1]);
        finalize();
    }

    void validate_table() const
    {
        if (rho.size() != value.size() || rho.size() < 3) throw std::invalid_argument("RadialKernel: bad table size");
        for (std::size_t i = 0; i < rho.size(); ++i) {
            if (!(value[i] > 0)) throw std::invalid_argument("RadialKernel: values must be positive");
            if (!(rho[i] > 0) || (i > 0 && !(rho[i] > rho[i - 1])))
                throw std::invalid_argument("RadialKernel: nodes must be positive and increasing");
        }
    }

    // PCHIP slopes in (log rho, log value)
    void finalize()
    {
        validate_table();
        const std::size_t m = rho.size();
        x_.resize(m);
        y_.resize(m);
        for (std::size_t i = 0; i < m; ++i) x_[i] = std::log(rho[i]), y_[i] = std::log(value[i]);
        std::vector<double> h(m - 1), del(m - 1);
        for (std::size_t i = 0; i + 1 < m; ++i) {
            h[i] = x_[i + 1] - x_[i];
            del[i] = (y_[i + 1] - y_[i]) / h[i];
        }
        d_.assign(m, 0.0);
        for (std::size_t i = 1; i + 1 < m; ++i) {
            if (del[i - 1] * del[i] <= 0) continue;
            const double w1 = 2 * h[i] + h[i - 1], w2 = h[i] + 2 * h[i - 1];
            d_[i] = (w1 + w2) / (w1 / del[i - 1] + w2 / del[i]);
        }
        d_[0] = end_slope(h[0], h[1], del[0], del[1]);
        d_[m - 1] = end_slope(h[m - 2], h[m - 3], del[m - 2], del[m - 3]);
    }

    double operator()(double r) const
    {
        if (!(r > 0)) throw std::domain_error("RadialKernel: rho must be positive");
        if (r < rho.front()) return small.c * std::pow(r, small.p);
        if (r > rho.back()) return tail.c * std::pow(r, tail.p) * std::exp(-tail.q * r);
        const double x = std::log(r);
        std::size_t i = std::upper_bound(x_.begin(), x_.end(), x) - x_.begin();
        if (i == 0) i = 1;
        if (i >= x_.size()) i = x_.size() - 1;
        --i;
        const double h = x_[i + 1] - x_[i], s = (x - x_[i]) / h;
        const double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s);
        const double h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
        return std::exp(h00 * y_[i] + h10 * h * d_[i] + h01 * y_[i + 1] + h11 * h * d_[i + 1]);
    }

    nlohmann::json sidecar() const
    {
        nlohmann::json j;
        j["kind"] = kind;
        j["params"] = params;
        j["tail_model"] = {{"c", tail.c}, {"p", tail.p}, {"q", tail.q}};
        j["small_rho_model"] = {{"coefficient", small.c}, {"power", small.p}};
        return j;
    }

    void save(const std::string& csv_path, const std::string& json_path) const
    {
        std::ofstream csv(csv_path);
        if (!csv) throw std::runtime_error("cannot write " + csv_path);
        csv << "rho,value\n";
        for (std::size_t i = 0; i < rho.size(); ++i) csv << format_double(rho[i]) << ',' << format_double(value[i]) << '\n';
        std::ofstream js(json_path);
        if (!js) throw std::runtime_error("cannot write " + json_path);
        js << sidecar().dump(2) << '\n';
    }

    static RadialKernel load(const std::string& csv_path, const std::string& json_path)
    {
        RadialKernel k;
        std::ifstream csv(csv_path);
        if (!csv) throw std::runtime_error("cannot read " + csv_path);
        std::string line;
        std::getline(csv, line);
        while (std::getline(csv, line)) {
            if (line.empty()) continue;
            const auto comma = line.find(',');
            if (comma == std::string::npos) throw std::runtime_error("bad kernel csv line: " + line);
            k.rho.push_back(parse_double(line.substr(0, comma)));
            k.value.push_back(parse_double(line.substr(comma + 1)));
        }
        std::ifstream js(json_path);
        if (!js) throw std::runtime_error("cannot read " + json_path);
        const auto j = nlohmann::json::parse(js);
        k.kind = j.at("kind").get<std::string>();
        k.params = j.at("params").get<std::map<std::string, double>>();
        k.tail = {j.at("tail_model").at("c"), j.at("tail_model").at("p"), j.at("tail_model").at("q")};
        k.small = {j.at("small_rho_model").at("coefficient"), j.at("small_rho_model").at("power")};
        k.finalize();
        return k;
    }

private:
    std::vector<double> x_, y_, d_;

    static double end_slope(double h0, double h1, double d0, double d1)
    {
        double d = ((2 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if (d * d0 <= 0) return 0.0;
        if (d0 * d1 <= 0 && std::fabs(d) > std::fabs(3 * d0)) return 3 * d0;
        return d;
    }
};

// Log-spaced nodes on [rho_min, rho_break] followed by uniform nodes up to rho_max.
inline std::vector<double> kernel_nodes(double rho_min, double rho_break, double rho_max, int n_log, int n_lin)
{
    std::vector<double> r;
    for (int i = 0; i < n_log; ++i) r.push_back(rho_min * std::pow(rho_break / rho_min, double(i) / n_log));
    for (int i = 0; i <= n_lin; ++i) r.push_back(rho_break + (rho_max - rho_break) * i / n_lin);
    return r;
}

// ---- asymptotic fits ----

struct LineFit {
    double slope = 0, intercept = 0, max_dev = 0;
};

inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y)
{
    const double m = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) sx += x[i], sy += y[i], sxx += x[i] * x[i], sxy += x[i] * y[i];
    LineFit f;
    f.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    f.intercept = (sy - f.slope * sx) / m;
    for (std::size_t i = 0; i < x.size(); ++i)
        f.max_dev = std::max(f.max_dev, std::fabs(y[i] - f.intercept - f.slope * x[i]));
    return f;
}

// slope of log k against log rho on log-spaced points in [a, b]
inline double fit_power_exponent(const std::function<double(double)>& k, double a, double b, int count = 6)
{
    std::vector<double> x, y;
    for (int i = 0; i < count; ++i) {
        const double r = a * std::pow(b / a, double(i) / (count - 1));
        x.push_back(std::log(r));
        y.push_back(std::log(k(r)));
    }
    return fit_line(x, y).slope;
}

// q in k ~ C rho^p e^{-q rho} with p fixed, from points in [a, b]
inline double fit_decay_rate(const std::function<double(double)>& k, double p, double a, double b, int count = 5)
{
    std::vector<double> x, y;
    for (int i = 0; i < count; ++i) {
        const double r = a + (b - a) * i / (count - 1);
        x.push_back(r);
        y.push_back(std::log(k(r)) - p * std::log(r));
    }
    return -fit_line(x, y).slope;
}

} // namespace hypk
