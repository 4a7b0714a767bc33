#pragma once

#include "hypk/quadrature.hpp"
#include "hypk/specfun.hpp"

#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <vector>

namespace hypk {

using cplx = std::complex<double>;
using cvec = std::vector<cplx>;

// (z, w) = sum z_j conj(w_j)
inline cplx herm(const cvec& z, const cvec& w)
{
    cplx s = 0;
    for (std::size_t j = 0; j < z.size(); ++j) s += z[j] * std::conj(w[j]);
    return s;
}

inline double norm2(const cvec& z)
{
    double s = 0;
    for (const auto& c : z) s += std::norm(c);
    return s;
}

class BallPoint {
public:
    static constexpr double boundary_margin = 1e-12;

    explicit BallPoint(cvec z) : z_(std::move(z))
    {
        if (z_.empty()) throw std::invalid_argument("BallPoint: empty coordinates");
        if (!(std::sqrt(norm2(z_)) < 1 - boundary_margin))
            throw std::invalid_argument("BallPoint: |z| must be < 1 - 1e-12");
    }
    static BallPoint origin(int n) { return BallPoint(cvec(n, 0.0)); }

    const cvec& z() const { return z_; }
    int n() const { return static_cast<int>(z_.size()); }
    double abs() const { return std::sqrt(norm2(z_)); }

private:
    cvec z_;
};

struct SiegelPoint {
    cvec zp;      // z_1 .. z_{n-1}
    double t = 0; // Re z_n
    double varrho = 1;

    SiegelPoint() = default;
    SiegelPoint(cvec zp_, double t_, double varrho_) : zp(std::move(zp_)), t(t_), varrho(varrho_)
    {
        if (!(varrho > 0)) throw std::invalid_argument("SiegelPoint: varrho must be positive");
    }
    int n() const { return static_cast<int>(zp.size()) + 1; }
};

inline double geodesic_rho(const BallPoint& p)
{
    return std::atanh(p.abs());
}

namespace detail {

inline cvec mobius_raw(const cvec& a, const cvec& z)
{
    const std::size_t n = z.size();
    const double aa = norm2(a);
    cvec out(n);
    if (aa == 0) {
        for (std::size_t j = 0; j < n; ++j) out[j] = -z[j];
        return out;
    }
    const cplx za = herm(z, a);
    const double s = std::sqrt(1 - aa);
    const cplx den = 1.0 - za;
    for (std::size_t j = 0; j < n; ++j) {
        const cplx p = za / aa * a[j];
        const cplx q = z[j] - p;
        out[j] = (a[j] - p - s * q) / den;
    }
    return out;
}

} // namespace detail

inline BallPoint mobius(const BallPoint& a, const BallPoint& z)
{
    if (a.n() != z.n()) throw std::invalid_argument("mobius: dimension mismatch");
    return BallPoint(detail::mobius_raw(a.z(), z.z()));
}

inline double distance(const BallPoint& z, const BallPoint& a)
{
    if (a.n() != z.n()) throw std::invalid_argument("distance: dimension mismatch");
    const double r = std::sqrt(norm2(detail::mobius_raw(a.z(), z.z())));
    return std::atanh(std::min(r, 1.0));
}

inline SiegelPoint cayley(const BallPoint& p)
{
    const cvec& z = p.z();
    const int n = p.n();
    const cplx zn = z[n - 1];
    if (std::abs(1.0 + zn) == 0) throw std::domain_error("cayley: singular point z_n = -1");
    const cplx d = 1.0 + zn;
    cvec zp(n - 1);
    double s = 0;
    for (int j = 0; j < n - 1; ++j) {
        zp[j] = z[j] / d;
        s += std::norm(zp[j]);
    }
    const cplx wn = cplx(0, 1) * (1.0 - zn) / d;
    return SiegelPoint(std::move(zp), wn.real(), wn.imag() - s);
}

inline BallPoint cayley_inverse(const SiegelPoint& q)
{
    const int n = q.n();
    double s = 0;
    for (const auto& c : q.zp) s += std::norm(c);
    const cplx wn(q.t, q.varrho + s);
    const cplx i(0, 1);
    const cplx zn = (i - wn) / (i + wn);
    cvec z(n);
    for (int j = 0; j < n - 1; ++j) z[j] = q.zp[j] * (1.0 + zn);
    z[n - 1] = zn;
    return BallPoint(std::move(z));
}

// Distance in the Siegel model from its own defining form:
// cosh^2 d = |r(z,w)|^2 / (r(z,z) r(w,w)), r(z,w) = (z_n - conj w_n)/(2i) - sum z_j conj w_j.
inline double siegel_distance(const SiegelPoint& p, const SiegelPoint& q)
{
    auto wn = [](const SiegelPoint& s) {
        double a = 0;
        for (const auto& c : s.zp) a += std::norm(c);
        return cplx(s.t, s.varrho + a);
    };
    const cplx pn = wn(p), qn = wn(q);
    cplx r = (pn - std::conj(qn)) / cplx(0, 2);
    for (std::size_t j = 0; j < p.zp.size(); ++j) r -= p.zp[j] * std::conj(q.zp[j]);
    const double c2 = std::norm(r) / (p.varrho * q.varrho);
    return std::acosh(std::sqrt(std::max(c2, 1.0)));
}

// Volume of the geodesic ball of radius rho in complex dimension n.
inline double ball_volume(int n, double rho)
{
    return sphere_measure(2 * n - 1) * std::pow(std::sinh(rho), 2 * n) / (2 * n);
}

inline double volume_density(int n, double rho)
{
    return std::pow(std::sinh(rho), 2 * n - 1) * std::cosh(rho);
}

// ---- sphere quadrature on S^{2n-1} in C^n ----

struct SphereRule {
    int n = 0;
    std::vector<cvec> nodes;
    std::vector<double> weights;
    std::size_t size() const { return nodes.size(); }
};

namespace detail {

// Collapsed-coordinate Gauss rule on the simplex {u_i >= 0, sum u_i = 1} in n variables,
// exact for polynomials of degree <= deg; returns points (u_1..u_n) and weights (total 1/(n-1)!).
inline void simplex_rule(int n, int deg, std::vector<std::vector<double>>& pts, std::vector<double>& w)
{
    pts.assign(1, std::vector<double>());
    w.assign(1, 1.0);
    std::vector<double> remaining(1, 1.0);
    for (int level = 0; level < n - 1; ++level) {
        // s in [0,1] with Jacobian (1-s)^{n-2-level}
        const int jac = n - 2 - level;
        const int m = (deg + jac) / 2 + 1;
        const quad::Rule g = quad::gauss_legendre(m, 0.0, 1.0);
        std::vector<std::vector<double>> np;
        std::vector<double> nw, nr;
        for (std::size_t p = 0; p < pts.size(); ++p) {
            for (int i = 0; i < m; ++i) {
                const double s = g.x[i];
                auto q = pts[p];
                q.push_back(remaining[p] * s);
                np.push_back(std::move(q));
                nw.push_back(w[p] * g.w[i] * std::pow(1 - s, jac));
                nr.push_back(remaining[p] * (1 - s));
            }
        }
        pts.swap(np);
        w.swap(nw);
        remaining.swap(nr);
    }
    for (std::size_t p = 0; p < pts.size(); ++p) pts[p].push_back(remaining[p]);
}

} // namespace detail

// Product rule exact for polynomials in (eta, conj eta) of total degree <= degree (n = 2, 3);
// equal-weight pseudo-random points for n >= 4.
inline SphereRule sphere_rule(int n, int degree, std::uint64_t seed = 42, int random_points = 20000)
{
    if (n < 1) throw std::invalid_argument("sphere_rule: n < 1");
    if (degree < 0) throw std::invalid_argument("sphere_rule: negative degree");
    SphereRule r;
    r.n = n;
    const double omega = sphere_measure(2 * n - 1);
    if (n >= 4) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> nd;
        for (int i = 0; i < random_points; ++i) {
            cvec z(n);
            for (auto& c : z) c = cplx(nd(rng), nd(rng));
            const double s = std::sqrt(norm2(z));
            for (auto& c : z) c /= s;
            r.nodes.push_back(std::move(z));
            r.weights.push_back(omega / random_points);
        }
        return r;
    }
    // |eta_j|^2 = u_j uniform on the simplex, phases uniform; dsigma = 2^{1-n} du dphi
    std::vector<std::vector<double>> pts;
    std::vector<double> w;
    detail::simplex_rule(n, degree / 2, pts, w);
    const int M = degree + 1;
    const double dphi = 2 * std::numbers::pi / M;
    const double scale = std::pow(2.0, 1 - n) * std::pow(dphi, n);
    long total = static_cast<long>(pts.size());
    for (int j = 0; j < n; ++j) total *= M;
    if (total > 50'000'000) throw std::length_error("sphere_rule: rule too large");
    std::vector<int> idx(n, 0);
    for (std::size_t p = 0; p < pts.size(); ++p) {
        std::fill(idx.begin(), idx.end(), 0);
        for (;;) {
            cvec z(n);
            for (int j = 0; j < n; ++j) z[j] = std::sqrt(pts[p][j]) * std::polar(1.0, idx[j] * dphi);
            r.nodes.push_back(std::move(z));
            r.weights.push_back(w[p] * scale);
            int j = 0;
            while (j < n && ++idx[j] == M) idx[j++] = 0;
            if (j == n) break;
        }
    }
    return r;
}

template <class F>
double integrate_sphere(const SphereRule& rule, F&& f)
{
    double s = 0;
    for (std::size_t i = 0; i < rule.size(); ++i) s += rule.weights[i] * f(rule.nodes[i]);
    return s;
}

// ---- radial x sphere grid for the Bergman volume ----

struct QuadratureGrid {
    int n = 0;
    double rho_max = 0;
    int panel_order = 0;
    std::vector<double> rho;
    std::vector<double> radial_weight; // includes sinh^{2n-1} cosh
    SphereRule sphere;

    std::size_t size() const { return rho.size() * sphere.size(); }
    std::size_t index(std::size_t i, std::size_t s) const { return i * sphere.size() + s; }
    cvec point(std::size_t i, std::size_t s) const
    {
        cvec z = sphere.nodes[s];
        const double r = std::tanh(rho[i]);
        for (auto& c : z) c *= r;
        return z;
    }
    double weight(std::size_t i, std::size_t s) const { return radial_weight[i] * sphere.weights[s]; }
};

// Composite Gauss-Legendre in rho with panels of `panel_order` nodes.
inline std::vector<double> radial_nodes(int radial_count, double rho_max, int panel_order,
                                        std::vector<double>& weights)
{
    const int q = std::min(panel_order, radial_count);
    const int panels = (radial_count + q - 1) / q;
    std::vector<double> x;
    weights.clear();
    const double d = rho_max / panels;
    for (int p = 0; p < panels; ++p) {
        const quad::Rule g = quad::gauss_legendre(q, p * d, (p + 1) * d);
        x.insert(x.end(), g.x.begin(), g.x.end());
        weights.insert(weights.end(), g.w.begin(), g.w.end());
    }
    return x;
}

inline QuadratureGrid build_grid(int n, int radial_count, int sphere_degree, double rho_max = 12.0,
                                 int panel_order = 16)
{
    if (radial_count < 4 || sphere_degree < 4) throw std::invalid_argument("build_grid: counts must be >= 4");
    if (!(rho_max > 0)) throw std::invalid_argument("build_grid: rho_max must be positive");
    if (static_cast<long>(radial_count) > 100000) throw std::length_error("build_grid: radial count too large");
    QuadratureGrid g;
    g.n = n;
    g.rho_max = rho_max;
    g.panel_order = std::min(panel_order, radial_count);
    std::vector<double> w;
    g.rho = radial_nodes(radial_count, rho_max, panel_order, w);
    g.radial_weight.resize(g.rho.size());
    for (std::size_t i = 0; i < g.rho.size(); ++i) g.radial_weight[i] = w[i] * volume_density(n, g.rho[i]);
    g.sphere = sphere_rule(n, sphere_degree);
    if (g.size() > 50'000'000) throw std::length_error("build_grid: grid too large");
    return g;
}

// Samples of a function on the nodes of a QuadratureGrid.
inline std::vector<double> sample(const QuadratureGrid& g, const std::function<double(const cvec&)>& f)
{
    std::vector<double> v(g.size());
    for (std::size_t i = 0; i < g.rho.size(); ++i)
        for (std::size_t s = 0; s < g.sphere.size(); ++s) v[g.index(i, s)] = f(g.point(i, s));
    return v;
}

inline double integrate_grid(const QuadratureGrid& g, const std::vector<double>& v)
{
    if (v.size() != g.size()) throw std::invalid_argument("integrate_grid: grid mismatch");
    double s = 0;
    for (std::size_t i = 0; i < g.rho.size(); ++i)
        for (std::size_t j = 0; j < g.sphere.size(); ++j) s += g.weight(i, j) * v[g.index(i, j)];
    return s;
}

// (f * k)(z) = sum_w k(d(z,w)) f(w) dV(w) over the grid nodes, for each z in `at`.
inline std::vector<double> convolve_radial(const std::function<double(double)>& k, const QuadratureGrid& g,
                                           const std::vector<double>& f, const std::vector<BallPoint>& at)
{
    if (f.size() != g.size()) throw std::invalid_argument("convolve_radial: grid mismatch");
    std::vector<double> out(at.size(), 0.0);
    for (std::size_t p = 0; p < at.size(); ++p) {
        if (at[p].n() != g.n) throw std::invalid_argument("convolve_radial: dimension mismatch");
        double s = 0;
        for (std::size_t i = 0; i < g.rho.size(); ++i) {
            for (std::size_t j = 0; j < g.sphere.size(); ++j) {
                const double fv = f[g.index(i, j)];
                if (fv == 0) continue;
                const double r = std::sqrt(norm2(detail::mobius_raw(at[p].z(), g.point(i, j))));
                s += k(std::atanh(std::min(r, 1.0))) * fv * g.weight(i, j);
            }
        }
        out[p] = s;
    }
    return out;
}

} // namespace hypk
