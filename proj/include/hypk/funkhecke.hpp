#pragma once

#include "hypk/geometry.hpp"
#include "hypk/quadrature.hpp"
#include "hypk/specfun.hpp"

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "json.hpp"

namespace hypk {

// K evaluated at the Hermitian pairing w = (r xi, eta), |w| < 1
using PairingKernel = std::function<double(cplx)>;

// int_{S^{2n-1}} K((r xi, eta)) dsigma(eta) with a sphere rule
inline double sphere_integral(const PairingKernel& K, double r, const cvec& xi, const SphereRule& rule)
{
    if (!(r >= 0 && r < 1)) throw std::domain_error("sphere_integral: r must be in [0, 1)");
    if (static_cast<int>(xi.size()) != rule.n) throw std::invalid_argument("sphere_integral: dimension mismatch");
    if (std::fabs(norm2(xi) - 1) > 1e-12) throw std::invalid_argument("sphere_integral: pole must be a unit vector");
    cvec p = xi;
    for (auto& c : p) c *= r;
    return integrate_sphere(rule, [&](const cvec& eta) { return K(herm(p, eta)); });
}

// Same integral through the pushforward of dsigma under eta -> (xi, eta), which is
// 2 pi^{n-1}/(n-2)! (1 - |w|^2)^{n-2} dA(w) on the unit disc (n >= 2); the angle uses the trapezoid rule.
inline double sphere_integral_zonal(const PairingKernel& K, double r, int n, int theta_points = 512,
                                    double rel_tol = 1e-13)
{
    if (!(r >= 0 && r < 1)) throw std::domain_error("sphere_integral: r must be in [0, 1)");
    if (n < 2) throw std::invalid_argument("sphere_integral_zonal: n must be >= 2");
    const double cn = 2 * std::pow(std::numbers::pi, n - 1) / std::tgamma(n - 1.0);
    auto ring = [&](double s) {
        return quad::trapezoid_periodic([&](double th) { return K(std::polar(r * s, th)); }, theta_points);
    };
    auto f = [&](double s, double, double db) {
        const double one_minus = db * (1 + s); // 1 - s^2 without cancellation
        return s * std::pow(one_minus, n - 2) * ring(s);
    };
    return cn * quad::tanh_sinh3(f, 0.0, 1.0, rel_tol).value;
}

// Eigenvalue of eta -> int K((xi, eta)) Y(eta) dsigma on the bidegree (j, k) space, m = min(j, k).
// The normalization carries pi^{n-1}; with it lambda_{0,0} equals the sphere integral of K.
inline double funk_hecke_eigenvalue(int j, int k, const PairingKernel& K, int n, int theta_points = 256,
                                    double rel_tol = 1e-12)
{
    if (j < 0 || k < 0) throw std::invalid_argument("funk_hecke_eigenvalue: negative bidegree");
    if (n < 2) throw std::invalid_argument("funk_hecke_eigenvalue: n must be >= 2");
    const int m = std::min(j, k), d = std::abs(j - k);
    const double pre = std::exp((n - 1) * std::log(std::numbers::pi) + std::lgamma(m + 1.0) -
                                (n - 1 + d / 2.0) * std::log(2.0) - std::lgamma(m + n - 1.0));
    auto theta_part = [&](double t) {
        const double s = std::sqrt((1 + t) / 2);
        // int_{-pi}^{pi} K(e^{-i theta} s) e^{i (j-k) theta} d theta; real part for real symmetric K
        return quad::trapezoid_periodic(
            [&](double th) { return K(std::polar(s, -th)) * std::cos((j - k) * th); }, theta_points);
    };
    auto f = [&](double t, double da, double db) {
        return theta_part(t) * std::pow(db, n - 2) * std::pow(da, d / 2.0) * jacobi_poly(m, n - 2, d, t);
    };
    return pre * quad::tanh_sinh3(f, -1.0, 1.0, rel_tol).value;
}

struct SphereHypergeometricReport {
    double alpha = 0;
    int n = 0;
    std::vector<double> r_values, Q_values;
    double constant_estimate = 0, omega_reference = 0, two_pi_over_gamma_n = 0;
    double variation = 0, constant_error = 0;
    bool pass = false;

    nlohmann::json to_json() const
    {
        return {{"alpha", alpha},
                {"n", n},
                {"r_values", r_values},
                {"Q_values", Q_values},
                {"constant_estimate", constant_estimate},
                {"omega_reference", omega_reference},
                {"two_pi_over_gamma_n", two_pi_over_gamma_n},
                {"variation", variation},
                {"constant_error", constant_error},
                {"pass", pass}};
    }
};

// Q(r) = int |1 - (r xi, eta)|^{-alpha} dsigma / 2F1(alpha/2, alpha/2; n; r^2) should be constant in r.
inline SphereHypergeometricReport verify_sphere_hypergeometric(double alpha, const std::vector<double>& r_grid, int n, double tol = 1e-6)
{
    if (!(alpha > 0 && alpha < 2 * n)) throw std::domain_error("verify_sphere_hypergeometric: alpha must be in (0, 2n)");
    if (r_grid.empty()) throw std::invalid_argument("verify_sphere_hypergeometric: empty r grid");
    SphereHypergeometricReport rep;
    rep.alpha = alpha;
    rep.n = n;
    rep.r_values = r_grid;
    const PairingKernel K = [alpha](cplx w) { return std::pow(std::norm(1.0 - w), -alpha / 2); };
    for (double r : r_grid) {
        const int pts = r < 0.5 ? 256 : 1024;
        const double lhs = sphere_integral_zonal(K, r, n, pts);
        rep.Q_values.push_back(lhs / gauss_2f1(alpha / 2, alpha / 2, n, r * r));
    }
    double lo = rep.Q_values.front(), hi = lo, sum = 0;
    for (double q : rep.Q_values) lo = std::min(lo, q), hi = std::max(hi, q), sum += q;
    rep.constant_estimate = sum / rep.Q_values.size();
    rep.variation = (hi - lo) / std::fabs(rep.constant_estimate);
    rep.omega_reference = sphere_measure(2 * n - 1);
    rep.two_pi_over_gamma_n = 2 * std::numbers::pi / std::tgamma(double(n));
    rep.constant_error = std::fabs(rep.constant_estimate - rep.omega_reference) / rep.omega_reference;
    rep.pass = rep.variation <= tol && rep.constant_error <= tol;
    return rep;
}

} // namespace hypk
