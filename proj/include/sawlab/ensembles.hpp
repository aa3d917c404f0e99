// Equivalence-of-ensembles observables: maps fixed-length pivot samples into
// the half-space, spherical and point-to-point ensembles with the weights
// z^p, R^p W (optionally corrected by the lattice-effect table) and
// ||endpoint||^(-gamma/nu), plus the weighted-CDF estimator with batch-means
// error bars.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "sawlab/lattice_effect.hpp"
#include "sawlab/pivot.hpp"
#include "sawlab/vec3.hpp"

namespace sawlab {

struct ExponentSet {
    double nu = 0.587597;
    double gamma = 1.15698;
    double gamma1 = 0.6786;
    double b = 1.3303;

    double rho() const { return gamma - gamma1; }
    double p() const { return (rho() - gamma) / nu; }
    double gamma_over_nu() const { return gamma / nu; }

    void validate() const {
        if (!(nu > 0.0)) throw std::invalid_argument("ExponentSet: nu must be positive");
        if (!(gamma > rho() && rho() > 0.0))
            throw std::invalid_argument("ExponentSet: need gamma > rho > 0");
        if (!(p() < 0.0)) throw std::invalid_argument("ExponentSet: p must be negative");
    }
};

struct WeightedSample {
    double theta = 0.0;  // radians, in [0, pi]
    double weight = 0.0;
};

// Half-space ensemble observable. The Euclidean map phi_omega sends the
// walk's image of the origin to (-x0/z0, -y0/z0, 1), so the hitting angle
// reduces to the polar angle of the endpoint. Emits nothing when the angle
// exceeds theta_max.
inline std::optional<WeightedSample> half_space_observable(const WalkView& w, const ExponentSet& e,
                                                           double theta_max) {
    const Point ep = w.endpoint();
    if (ep.z < 1)
        throw std::logic_error("half_space_observable: endpoint below z=1 (walk not from E_N^+)");
    const double rxy = std::hypot(double(ep.x), double(ep.y));
    const double theta = std::atan2(rxy, double(ep.z));
    if (theta > theta_max) return std::nullopt;
    return WeightedSample{theta, std::pow(double(ep.z), e.p())};
}

// Dilation factor R such that endpoint/R lies on the unit sphere centered at
// (0,0,-a).
inline double dilation_factor(Vec3 endpoint, double a) {
    const double r = endpoint.norm();
    if (r == 0.0) throw std::invalid_argument("dilation_factor: zero endpoint");
    const double cos_t = endpoint.z / r;
    const double sin2_t = std::max(0.0, 1.0 - cos_t * cos_t);
    return r * (a * cos_t + std::sqrt(1.0 - a * a * sin2_t)) / (1.0 - a * a);
}

inline double dilation_factor(const WalkView& w, double a) {
    return dilation_factor(to_vec3(w.endpoint()), a);
}

// Reciprocal normal speed of the shell family x = R(u - a z_hat); depends on
// the endpoint only through its sphere-center polar angle.
inline double shell_weight(double theta_s, double a) { return 1.0 / (1.0 - a * std::cos(theta_s)); }

struct SphereConfig {
    double a = 0.75;
    const LatticeEffectTable* table = nullptr;  // optional l-hat correction

    void validate() const {
        if (!(std::abs(a) < 1.0)) throw std::invalid_argument("SphereConfig: need |a| < 1");
    }
};

// Spherical ensemble observable: dilate by 1/R, condition on the dilated walk
// staying inside the sphere, and weight by R^p W(theta_s) (divided by
// l-hat(theta_s) when a lattice-effect table is supplied).
inline std::optional<WeightedSample> sphere_observable(const WalkView& w, const SphereConfig& cfg,
                                                       const ExponentSet& e) {
    const double a = cfg.a;
    const double R = dilation_factor(w, a);
    const double shift = a * R;            // sphere center is (0,0,-a) after dilation
    const double r2max = R * R * (1.0 + 1e-12);  // sites on the sphere count as inside
    const int n = w.n_steps();
    for (int i = 1; i <= n; ++i) {
        const Point s = w.site(i);
        const double dz = double(s.z) + shift;
        const double d2 = double(s.x) * s.x + double(s.y) * s.y + dz * dz;
        if (d2 > r2max) return std::nullopt;
    }
    const Point ep = w.endpoint();
    const double uz = std::clamp((double(ep.z) + shift) / R, -1.0, 1.0);
    const double theta_s = std::acos(uz);
    double weight = std::pow(R, e.p()) * shell_weight(theta_s, a);
    if (cfg.table) weight /= cfg.table->lookup(theta_s);
    return WeightedSample{theta_s, weight};
}

// Point-to-point ensemble observable: rotate the endpoint direction onto +z,
// dilate so the walk runs from (0,0,0) to (0,0,2), and report the angle of
// the first crossing of the bisecting plane z = 1.
inline WeightedSample point_to_point_observable(const WalkView& w, const ExponentSet& e) {
    const Point ep = w.endpoint();
    const double r = std::sqrt(double(ep.norm2()));
    assert(ep.norm2() > 0 && "SAW endpoint cannot return to the origin");

    // Minimal-angle rotation taking endpoint/r to +z (Rodrigues form); on-axis
    // endpoints use the identity or a fixed 180-degree rotation about x.
    Vec3 axis{0.0, 0.0, 0.0};
    double cos_phi = 1.0, sin_phi = 0.0;
    if (ep.x == 0 && ep.y == 0) {
        if (ep.z < 0) {
            axis = {1.0, 0.0, 0.0};
            cos_phi = -1.0;
            sin_phi = 0.0;
        }
    } else {
        const Vec3 u = (1.0 / r) * to_vec3(ep);
        Vec3 ax = cross(u, Vec3{0.0, 0.0, 1.0});
        const double n = ax.norm();
        axis = (1.0 / n) * ax;
        cos_phi = u.z;
        sin_phi = n;
    }
    const double scale = 2.0 / r;
    auto transform = [&](Point p) -> Vec3 {
        const Vec3 v = to_vec3(p);
        const Vec3 rot = cos_phi * v + sin_phi * cross(axis, v) + ((1.0 - cos_phi) * dot(axis, v)) * axis;
        return scale * rot;
    };

    const int n = w.n_steps();
    Vec3 prev = transform(w.site(0));
    for (int i = 1; i <= n; ++i) {
        const Vec3 cur = transform(w.site(i));
        if (prev.z < 1.0 && cur.z >= 1.0) {
            const double t = (1.0 - prev.z) / (cur.z - prev.z);
            const Vec3 hit = prev + t * (cur - prev);
            const double theta = std::atan(std::hypot(hit.x, hit.y));
            return WeightedSample{theta, std::pow(r, -e.gamma_over_nu())};
        }
        prev = cur;
    }
    throw std::logic_error("point_to_point_observable: no crossing of z=1 found");
}

// Ordered stream of weighted samples; merging is concatenation, so merged
// accumulators are exactly the concatenated streams.
struct SampleSet {
    std::vector<WeightedSample> samples;

    void add(WeightedSample s) { samples.push_back(s); }
    void append(const SampleSet& o) {
        samples.insert(samples.end(), o.samples.begin(), o.samples.end());
    }
    std::size_t size() const { return samples.size(); }
};

struct EmpiricalCdf {
    std::vector<double> grid;       // radians, strictly increasing
    std::vector<double> value;      // F at each grid point
    std::vector<double> err2sigma;  // 2x batch-means standard error
    std::uint64_t n_samples = 0;
    double total_weight = 0.0;
};

// Weighted empirical CDF on a fixed angle grid with batch-means error bars:
// the stream is split in order into `batches` contiguous batches, and the
// error bar is twice the standard error of the per-batch ratio estimates.
inline EmpiricalCdf weighted_cdf(std::span<const WeightedSample> samples,
                                 std::span<const double> grid, int batches) {
    if (samples.empty()) throw std::invalid_argument("weighted_cdf: empty sample stream");
    if (grid.empty()) throw std::invalid_argument("weighted_cdf: empty grid");
    for (std::size_t j = 0; j + 1 < grid.size(); ++j)
        if (!(grid[j] < grid[j + 1]))
            throw std::invalid_argument("weighted_cdf: grid must be strictly increasing");
    if (!(grid.front() >= 0.0 && grid.back() <= std::numbers::pi + 1e-12))
        throw std::invalid_argument("weighted_cdf: grid must lie in [0, pi]");

    const std::size_t m = samples.size();
    const std::size_t nb = std::size_t(std::clamp<std::int64_t>(batches, 1, std::int64_t(m)));
    const std::size_t g = grid.size();

    // Per batch: histogram of grid bins, then cumulative sums.
    std::vector<double> batch_cum(nb * g, 0.0);
    std::vector<double> batch_w(nb, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t bi = std::min(nb - 1, i * nb / m);
        const auto it = std::lower_bound(grid.begin(), grid.end(), samples[i].theta);
        const std::size_t j = std::size_t(it - grid.begin());  // first grid point >= theta
        if (j < g) batch_cum[bi * g + j] += samples[i].weight;
        batch_w[bi] += samples[i].weight;
    }
    for (std::size_t bi = 0; bi < nb; ++bi)
        for (std::size_t j = 1; j < g; ++j) batch_cum[bi * g + j] += batch_cum[bi * g + j - 1];

    EmpiricalCdf out;
    out.grid.assign(grid.begin(), grid.end());
    out.value.assign(g, 0.0);
    out.err2sigma.assign(g, 0.0);
    out.n_samples = m;

    double wtot = 0.0;
    for (double bw : batch_w) wtot += bw;
    if (!(wtot > 0.0)) throw std::invalid_argument("weighted_cdf: total weight must be positive");
    out.total_weight = wtot;

    for (std::size_t j = 0; j < g; ++j) {
        double s = 0.0;
        for (std::size_t bi = 0; bi < nb; ++bi) s += batch_cum[bi * g + j];
        out.value[j] = s / wtot;
    }
    if (nb >= 2) {
        for (std::size_t j = 0; j < g; ++j) {
            double var = 0.0;
            for (std::size_t bi = 0; bi < nb; ++bi) {
                const double fb = batch_cum[bi * g + j] / batch_w[bi];
                const double d = fb - out.value[j];
                var += d * d;
            }
            out.err2sigma[j] = 2.0 * std::sqrt(var / (double(nb) * double(nb - 1)));
        }
    }
    return out;
}

inline EmpiricalCdf weighted_cdf(const SampleSet& s, std::span<const double> grid, int batches) {
    return weighted_cdf(std::span<const WeightedSample>(s.samples), grid, batches);
}

}  // namespace sawlab
