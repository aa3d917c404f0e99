// Closed-form conformal-invariance predictions for the hitting-angle CDFs,
// the scaling relation for the boundary exponent b, the sphere-to-plane
// inversion map, and the finite-N exponent fit
//   F_N(theta) - H(theta, beta0) ~ N^-p g(theta) + eps dH/dbeta.
#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "sawlab/ensembles.hpp"
#include "sawlab/vec3.hpp"

namespace sawlab {

// P(Theta <= theta) = 1 - cos(theta)^(2(b-1)) for the half-space hitting angle.
inline double cdf_half(double theta, double b) {
    if (!(theta >= 0.0 && theta < std::numbers::pi / 2))
        throw std::domain_error("cdf_half: theta must lie in [0, pi/2)");
    if (!(b > 1.0)) throw std::domain_error("cdf_half: b must exceed 1");
    return 1.0 - std::pow(std::cos(theta), 2.0 * (b - 1.0));
}

// Sphere hitting-angle CDF for start offset a; the a -> 0 limit is the
// uniform measure (1 - cos(theta)) / 2.
inline double cdf_sphere(double theta, double a, double b) {
    if (!(std::abs(a) < 1.0)) throw std::domain_error("cdf_sphere: need |a| < 1");
    if (b == 1.0) throw std::domain_error("cdf_sphere: b must differ from 1");
    if (std::abs(a) < 1e-12) return 0.5 * (1.0 - std::cos(theta));
    const double e = 1.0 - b;
    const double lo = std::pow((1.0 - a) * (1.0 - a), e);
    const double hi = std::pow((1.0 + a) * (1.0 + a), e);
    const double mid = std::pow(1.0 + a * a - 2.0 * a * std::cos(theta), e);
    return (lo - mid) / (lo - hi);
}

// First-hit CDF on the bisecting plane: sin^2(theta).
inline double cdf_bisect(double theta) {
    const double s = std::sin(theta);
    return s * s;
}

// Scaling relation b = (2 rho - gamma) / (2 nu) + d / 2.
inline double b_from_scaling(const ExponentSet& e, int dimension) {
    return (2.0 * e.rho() - e.gamma) / (2.0 * e.nu) + double(dimension) / 2.0;
}

// dH/dbeta for the half-space CDF; nonnegative on [0, pi/2).
inline double dH_db(double theta, double beta) {
    const double c = std::cos(theta);
    return -2.0 * std::log(c) * std::pow(c, 2.0 * (beta - 1.0));
}

// Conditioned prediction H(theta)/H(theta0) and its beta-derivative.
inline double cdf_half_conditioned(double theta, double b, double theta0) {
    return cdf_half(theta, b) / cdf_half(theta0, b);
}

inline double dH_db_conditioned(double theta, double beta, double theta0) {
    const double h0 = cdf_half(theta0, beta);
    return (dH_db(theta, beta) * h0 - cdf_half(theta, beta) * dH_db(theta0, beta)) / (h0 * h0);
}

// f(x,y,z) = 2 (x, y, 1-z) / (x^2 + y^2 + (1-z)^2); maps the unit sphere to
// the plane z = 1 and the origin to (0,0,2).
inline Vec3 inversion_map(Vec3 v) {
    const double d = v.x * v.x + v.y * v.y + (1.0 - v.z) * (1.0 - v.z);
    if (d == 0.0) throw std::domain_error("inversion_map: (0,0,1) is the pole");
    const double s = 2.0 / d;
    return {s * v.x, s * v.y, s * (1.0 - v.z)};
}

struct FitResult {
    double b = 0.0;
    double epsilon = 0.0;
    double p_fit = 0.0;
    double residual = 0.0;      // sqrt of the summed squared residuals
    std::vector<double> g;      // per grid point
};

namespace detail {

// For fixed p the model D_ij = s_i g_j + eps h_j (s_i = N_i^-p) is linear in
// (eps, g); both have closed-form least-squares solutions.
struct FixedPowerFit {
    double eps = 0.0;
    std::vector<double> g;
    double ssr = 0.0;
};

inline FixedPowerFit solve_fixed_power(std::span<const double> h,
                                       const std::vector<std::vector<double>>& d,
                                       std::span<const double> n_values, double p) {
    const std::size_t nset = d.size();
    const std::size_t ng = h.size();
    std::vector<double> s(nset);
    double s1 = 0.0, s2 = 0.0;
    for (std::size_t i = 0; i < nset; ++i) {
        s[i] = std::pow(n_values[i], -p);
        s1 += s[i];
        s2 += s[i] * s[i];
    }
    double h2 = 0.0, num = 0.0;
    for (std::size_t j = 0; j < ng; ++j) {
        double aj = 0.0, bj = 0.0;
        for (std::size_t i = 0; i < nset; ++i) {
            aj += s[i] * d[i][j];
            bj += d[i][j];
        }
        h2 += h[j] * h[j];
        num += h[j] * (bj - (s1 / s2) * aj);
    }
    const double denom = (double(nset) - s1 * s1 / s2) * h2;
    FixedPowerFit fit;
    fit.eps = denom != 0.0 ? num / denom : 0.0;
    fit.g.resize(ng);
    for (std::size_t j = 0; j < ng; ++j) {
        double aj = 0.0;
        for (std::size_t i = 0; i < nset; ++i) aj += s[i] * d[i][j];
        fit.g[j] = (aj - fit.eps * h[j] * s1) / s2;
    }
    for (std::size_t i = 0; i < nset; ++i)
        for (std::size_t j = 0; j < ng; ++j) {
            const double r = d[i][j] - s[i] * fit.g[j] - fit.eps * h[j];
            fit.ssr += r * r;
        }
    return fit;
}

}  // namespace detail

// Fits F_N(theta) - H(theta, beta0) ~ N^-p g(theta) + eps dH/dbeta over >= 3
// datasets on a shared grid: golden-section search on p in (0, 2) around the
// linear subproblem. When theta0 is given, H and dH/dbeta are the
// theta0-conditioned versions, matching the conditioned estimator.
inline FitResult fit_b(std::span<const double> grid_theta,
                       const std::vector<std::vector<double>>& cdf_values,
                       std::span<const double> n_values, double beta0,
                       std::optional<double> theta0 = std::nullopt) {
    if (cdf_values.size() < 3) throw std::invalid_argument("fit_b: need at least 3 datasets");
    if (n_values.size() != cdf_values.size())
        throw std::invalid_argument("fit_b: one N per dataset required");
    if (grid_theta.size() < 2) throw std::invalid_argument("fit_b: degenerate grid");
    for (const auto& f : cdf_values)
        if (f.size() != grid_theta.size())
            throw std::invalid_argument("fit_b: dataset/grid size mismatch");
    for (std::size_t i = 0; i < n_values.size(); ++i)
        for (std::size_t j = i + 1; j < n_values.size(); ++j)
            if (n_values[i] == n_values[j])
                throw std::invalid_argument("fit_b: datasets must have distinct N");

    const std::size_t ng = grid_theta.size();
    std::vector<double> h(ng);
    std::vector<std::vector<double>> d(cdf_values.size(), std::vector<double>(ng));
    for (std::size_t j = 0; j < ng; ++j) {
        const double th = grid_theta[j];
        const double pred = theta0 ? cdf_half_conditioned(th, beta0, *theta0) : cdf_half(th, beta0);
        h[j] = theta0 ? dH_db_conditioned(th, beta0, *theta0) : dH_db(th, beta0);
        for (std::size_t i = 0; i < cdf_values.size(); ++i) d[i][j] = cdf_values[i][j] - pred;
    }

    auto ssr_at = [&](double p) { return detail::solve_fixed_power(h, d, n_values, p).ssr; };
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = 0.05, hi = 2.0;
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = ssr_at(x1), f2 = ssr_at(x2);
    for (int it = 0; it < 200; ++it) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = ssr_at(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = ssr_at(x2);
        }
    }
    const double p_best = 0.5 * (lo + hi);
    const auto fit = detail::solve_fixed_power(h, d, n_values, p_best);

    FitResult out;
    out.p_fit = p_best;
    out.epsilon = fit.eps;
    out.b = beta0 + fit.eps;
    out.g = fit.g;
    out.residual = std::sqrt(fit.ssr);
    return out;
}

}  // namespace sawlab
