// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. The Monte Carlo runs are desk-scale analogues of the paper-scale
// simulations; every tolerance is pinned here.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "sawlab/csv.hpp"
#include "sawlab/ensembles.hpp"
#include "sawlab/predictions.hpp"
#include "sawlab/runner.hpp"
#include "sawlab/stats.hpp"
#include "support/oracles.hpp"

using namespace sawlab;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;
constexpr int kChains = 2;

int g_failures = 0;

void report(const std::string& name, bool pass, const std::string& detail, double seconds) {
    std::printf("[%s] %-28s %s  (%.1fs)\n", pass ? "PASS" : "FAIL", name.c_str(), detail.c_str(),
                seconds);
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

void run_criterion(const std::string& name, const std::function<bool(std::string&)>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    std::string detail;
    bool pass = false;
    try {
        pass = body(detail);
    } catch (const std::exception& ex) {
        detail = std::string("exception: ") + ex.what();
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report(name, pass, detail, dt);
}

std::vector<double> degree_grid(int lo, int hi) {
    std::vector<double> g;
    for (int d = lo; d <= hi; ++d) g.push_back(d * kDeg);
    return g;
}

struct HalfRun {
    double sup = 0.0;
    double err_at_sup = 0.0;  // 2-sigma bar at the sup-attaining grid point
    std::size_t emitted = 0;
    EmpiricalCdf cdf;
};

// Half-space comparison run at fixed parameters (theta_0 = 85 deg, b = 1.3303).
HalfRun half_space_run(int n_steps, std::int64_t walks, std::uint64_t seed) {
    const ExponentSet e;
    const double theta0 = 85.0 * kDeg;
    ChainConfig cfg;
    cfg.n_steps = n_steps;
    cfg.constraint = Constraint::HalfSpace;
    cfg.stride = 100;
    cfg.seed = seed;
    const auto run = run_weighted_ensemble(cfg, kChains, walks, [&](const WalkView& w) {
        return half_space_observable(w, e, theta0);
    });
    const auto grid = degree_grid(1, 85);
    HalfRun out;
    out.cdf = weighted_cdf(run.samples, grid, 20);
    out.emitted = run.samples.size();
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const double diff = std::abs(out.cdf.value[j] - cdf_half_conditioned(grid[j], e.b, theta0));
        if (diff > out.sup) {
            out.sup = diff;
            out.err_at_sup = out.cdf.err2sigma[j];
        }
    }
    return out;
}

// ---------------------------------------------------------------------------

bool c1_chain_uniformity(std::string& detail) {
    std::map<std::string, std::size_t> cell;
    enumerate_saws(4, Constraint::FullSpace,
                   [&](const Walk& w) { cell.emplace(oracles::encode_walk(w), cell.size()); });
    std::vector<std::uint64_t> counts(cell.size(), 0);
    ChainConfig cfg;
    cfg.n_steps = 4;
    cfg.stride = 16;
    cfg.seed = 20240601;
    const std::int64_t m = 10'000'000;
    run_chain(cfg, m, [&](const WalkView& v) {
        ++counts[cell.at(oracles::encode_walk(v.materialize()))];
    });
    const double chi2 = chi_square_statistic(counts, double(m) / double(counts.size()));
    const double p = chi_square_pvalue(chi2, double(counts.size() - 1));
    char buf[128];
    std::snprintf(buf, sizeof buf, "chi2=%.1f dof=725 p=%.4f (need p > 0.001)", chi2, p);
    detail = buf;
    return counts.size() == 726 && p > 0.001;
}

bool c2_nu_sanity(std::string& detail) {
    const std::vector<int> n_values{100, 200, 400, 800, 1600, 3200};
    std::vector<double> mean_r2(n_values.size(), 0.0);
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < n_values.size(); ++i) {
        pool.emplace_back([&, i] {
            ChainConfig cfg;
            cfg.n_steps = n_values[i];
            cfg.stride = 10;
            cfg.seed = 777000 + i;
            double sum = 0.0;
            const std::int64_t m = 100'000;
            run_chain(cfg, m, [&](const WalkView& v) { sum += double(v.endpoint().norm2()); });
            mean_r2[i] = sum / double(m);
        });
    }
    for (auto& t : pool) t.join();

    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < n_values.size(); ++i) {
        lx.push_back(std::log(double(n_values[i])));
        ly.push_back(std::log(mean_r2[i]));
    }
    const double nu = least_squares_line(lx, ly).slope / 2.0;
    char buf[128];
    std::snprintf(buf, sizeof buf, "nu=%.4f (need [0.567, 0.607])", nu);
    detail = buf;
    return nu >= 0.567 && nu <= 0.607;
}

bool c3_scaling_relation(std::string& detail) {
    const double b = b_from_scaling(ExponentSet{}, 3);
    char buf[128];
    std::snprintf(buf, sizeof buf, "b=%.6f (need 1.3296 +/- 0.001 and 1.3303 +/- 0.001)", b);
    detail = buf;
    return std::abs(b - 1.3296) <= 0.001 && std::abs(b - 1.3303) <= 0.001;
}

HalfRun g_half_10k;  // shared between C4 and C7

bool c4_half_space_prediction(std::string& detail) {
    g_half_10k = half_space_run(10000, 1'050'000, 42);
    char buf[160];
    std::snprintf(buf, sizeof buf, "sup|diff|=%.4f samples=%zu (need <= 0.01, >= 1e6 samples)",
                  g_half_10k.sup, g_half_10k.emitted);
    detail = buf;
    return g_half_10k.sup <= 0.01 && g_half_10k.emitted >= 1'000'000;
}

bool c5_bisecting_plane(std::string& detail) {
    const ExponentSet e;
    ChainConfig cfg;
    cfg.n_steps = 10000;
    // the weight ||omega(N)||^(-gamma/nu) is heavy-tailed (rare short
    // endpoints carry large weight), so this run buys extra samples with a
    // shorter stride at the same attempt budget
    cfg.stride = 50;
    cfg.seed = 43;
    const auto run = run_weighted_ensemble(cfg, kChains, 4'000'000, [&](const WalkView& w) {
        return std::optional<WeightedSample>(point_to_point_observable(w, e));
    });
    const auto grid = degree_grid(0, 90);
    const auto cdf = weighted_cdf(run.samples, grid, 20);
    double sup = 0.0;
    for (std::size_t j = 0; j < grid.size(); ++j)
        sup = std::max(sup, std::abs(cdf.value[j] - cdf_bisect(grid[j])));
    char buf[128];
    std::snprintf(buf, sizeof buf, "sup|F - sin^2|=%.4f samples=%zu (need <= 0.01)", sup,
                  run.samples.size());
    detail = buf;
    return sup <= 0.01 && run.samples.size() >= 1'000'000;
}

bool c6_sphere_with_lattice_effect(std::string& detail) {
    const ExponentSet e;
    const double a = 0.75;

    ChainConfig lat_cfg;
    lat_cfg.n_steps = 1000;
    lat_cfg.stride = 10;
    lat_cfg.seed = 4404;
    const auto table = run_lattice_effect(lat_cfg, kChains, 10'000'000, 180);

    ChainConfig cfg;
    cfg.n_steps = 5000;
    cfg.stride = 10;
    cfg.seed = 4405;
    SphereConfig raw_cfg;
    raw_cfg.a = a;
    // containment acceptance at N=5000 is ~2.2%, and the uncorrected-vs-
    // corrected comparison needs the statistical noise well below the
    // ~4e-3 lattice-effect shift, hence the deep run
    const auto run = run_weighted_ensemble(cfg, kChains, 26'000'000, [&](const WalkView& w) {
        return sphere_observable(w, raw_cfg, e);
    });

    SampleSet corrected;
    corrected.samples.reserve(run.samples.size());
    for (const auto& s : run.samples.samples)
        corrected.add({s.theta, s.weight / table.lookup(s.theta)});

    const auto grid = degree_grid(1, 180);
    const auto cdf_corr = weighted_cdf(corrected, grid, 20);
    const auto cdf_raw = weighted_cdf(run.samples, grid, 20);
    double sup_corr = 0.0, sup_raw = 0.0;
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const double pred = cdf_sphere(grid[j], a, e.b);
        sup_corr = std::max(sup_corr, std::abs(cdf_corr.value[j] - pred));
        sup_raw = std::max(sup_raw, std::abs(cdf_raw.value[j] - pred));
    }
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "corrected=%.4f uncorrected=%.4f accepted=%zu (need <= 0.02, ratio >= 2, >= 1e5)",
                  sup_corr, sup_raw, run.samples.size());
    detail = buf;
    return sup_corr <= 0.02 && sup_raw >= 2.0 * sup_corr && run.samples.size() >= 100'000;
}

bool c7_finite_n_decay(std::string& detail) {
    const HalfRun r2500 = half_space_run(2500, 1'050'000, 44);
    const HalfRun r5000 = half_space_run(5000, 1'050'000, 45);
    const HalfRun& r10k = g_half_10k;
    auto within = [](const HalfRun& big_n, const HalfRun& small_n) {
        const double tol = std::sqrt(big_n.err_at_sup * big_n.err_at_sup +
                                     small_n.err_at_sup * small_n.err_at_sup);
        return big_n.sup <= small_n.sup + tol;
    };

    // bonus: the same three runs feed the real-data b fit
    const auto grid = degree_grid(1, 85);
    const std::vector<std::vector<double>> data{r2500.cdf.value, r5000.cdf.value,
                                                r10k.cdf.value};
    const std::vector<double> n_values{2500.0, 5000.0, 10000.0};
    const FitResult fit = fit_b(grid, data, n_values, 1.3303, 85.0 * kDeg);

    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "sup: N=2.5k %.4f, N=5k %.4f, N=10k %.4f (nonincreasing); fit b=%.4f (+/-0.01)",
                  r2500.sup, r5000.sup, r10k.sup, fit.b);
    detail = buf;
    return within(r5000, r2500) && within(r10k, r5000) && std::abs(fit.b - 1.3303) <= 0.01;
}

bool c8_prediction_self_consistency(std::string& detail) {
    // pushforward of uniform sphere points through the inversion map
    Rng rng(2718);
    const std::int64_t n = 10'000'000;
    std::vector<double> theta;
    theta.reserve(std::size_t(n));
    for (std::int64_t i = 0; i < n; ++i) {
        const double z = 1.0 - 2.0 * rng.uniform();
        const double phi = 2.0 * std::numbers::pi * rng.uniform();
        const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
        const Vec3 img = inversion_map({s * std::cos(phi), s * std::sin(phi), z});
        theta.push_back(std::atan(std::hypot(img.x, img.y)));
    }
    std::sort(theta.begin(), theta.end());
    double ks = 0.0;
    for (std::size_t i = 0; i < theta.size(); ++i) {
        const double f = cdf_bisect(theta[i]);
        ks = std::max(ks, std::max(f - double(i) / double(n), double(i + 1) / double(n) - f));
    }

    // closed-form CDFs vs quadrature of their densities on 1000-point grids
    double worst_half = 0.0, worst_sphere = 0.0;
    for (int k = 1; k <= 1000; ++k) {
        const double th = (89.0 * k / 1000.0) * kDeg;
        worst_half = std::max(worst_half, std::abs(cdf_half(th, 1.3303) -
                                                   oracles::cdf_half_by_quadrature(th, 1.3303)));
    }
    for (int k = 1; k <= 1000; ++k) {
        const double th = std::numbers::pi * k / 1000.0;
        worst_sphere = std::max(worst_sphere, std::abs(cdf_sphere(th, 0.75, 1.3303) -
                                                       oracles::cdf_sphere_by_quadrature(
                                                           th, 0.75, 1.3303)));
    }
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "pushforward sup=%.2e (<= 3e-4); quadrature: half %.1e, sphere %.1e (<= 1e-8)",
                  ks, worst_half, worst_sphere);
    detail = buf;
    return ks <= 3e-4 && worst_half <= 1e-8 && worst_sphere <= 1e-8;
}

bool c9_fit_b_round_trip(std::string& detail) {
    const double b_star = 1.3303, p_star = 0.54, beta0 = 1.33;
    const auto grid = degree_grid(1, 85);
    const std::vector<double> n_values{1e5, 2.5e5, 5e5};
    auto g_star = [](double t) { return 0.03 * std::sin(3.0 * t) - 0.01; };
    std::vector<std::vector<double>> data;
    for (double n : n_values) {
        std::vector<double> f;
        for (double t : grid) f.push_back(cdf_half(t, b_star) + std::pow(n, -p_star) * g_star(t));
        data.push_back(f);
    }
    const FitResult fit = fit_b(grid, data, n_values, beta0);
    char buf[160];
    std::snprintf(buf, sizeof buf, "b=%.6f (|db| <= 1e-4), p=%.4f (|dp| <= 0.02)", fit.b,
                  fit.p_fit);
    detail = buf;
    return std::abs(fit.b - b_star) <= 1e-4 && std::abs(fit.p_fit - p_star) <= 0.02;
}

bool c10_property_suites(std::string& detail) {
    int checked = 0;

    // pivot preserves length, self-avoidance, anchoring
    for (Constraint c : {Constraint::FullSpace, Constraint::HalfSpace}) {
        ChainConfig cfg;
        cfg.n_steps = 8;
        cfg.constraint = c;
        cfg.seed = 99;
        cfg.stride = 1;
        PivotChain chain(cfg);
        for (int i = 0; i < 20000; ++i) {
            chain.step();
            const Walk w = chain.view().materialize();
            if (!is_valid_walk(w, c) || n_steps(w) != 8) {
                detail = "pivot invariant violated";
                return false;
            }
        }
        ++checked;
    }

    // symmetry group closure
    {
        const auto& group = symmetry_group();
        auto member = [&](const Symmetry& g) {
            for (const auto& x : group)
                if (x == g) return true;
            return false;
        };
        if (group.size() != 48) {
            detail = "group size != 48";
            return false;
        }
        for (const auto& a : group)
            for (const auto& b : group)
                if (!member(compose(a, b))) {
                    detail = "group not closed under composition";
                    return false;
                }
        for (const auto& a : group)
            if (!member(inverse(a)) || !compose(a, inverse(a)).is_identity()) {
                detail = "group not closed under inverse";
                return false;
            }
        ++checked;
    }

    // weighted-CDF monotonicity and merge associativity
    {
        Rng rng(5150);
        SampleSet s1, s2, all;
        for (int i = 0; i < 40000; ++i) {
            WeightedSample s{rng.uniform() * std::numbers::pi, 0.1 + rng.uniform()};
            (i % 3 == 0 ? s1 : s2).add(s);
            all.add(s);
        }
        SampleSet merged = s1;
        merged.append(s2);
        const auto grid = degree_grid(1, 180);
        const auto cm = weighted_cdf(merged, grid, 16);
        for (std::size_t j = 1; j < cm.value.size(); ++j)
            if (cm.value[j] < cm.value[j - 1] || cm.value[j] < 0.0 || cm.value[j] > 1.0) {
                detail = "weighted CDF not monotone in [0,1]";
                return false;
            }
        // same multiset, different split: totals must agree exactly
        SampleSet flipped = s2;
        flipped.append(s1);
        const auto cf = weighted_cdf(flipped, grid, 1);
        const auto cg = weighted_cdf(merged, grid, 1);
        for (std::size_t j = 0; j < cm.value.size(); ++j)
            if (std::abs(cf.value[j] - cg.value[j]) > 1e-12) {
                detail = "merge order changed the estimate";
                return false;
            }
        ++checked;
    }

    // theta_interval against the grid-scan oracle
    {
        ChainConfig cfg;
        cfg.n_steps = 50;
        cfg.seed = 1717;
        cfg.stride = 25;
        Rng phi_rng(18);
        bool ok = true;
        run_chain(cfg, 20, [&](const WalkView& v) {
            const Walk w = v.materialize();
            const double phi = 2.0 * std::numbers::pi * phi_rng.uniform();
            const auto iv = theta_interval(WalkRef{w}, phi);
            for (int k = 0; k < 10000 && ok; ++k) {
                const double th = std::numbers::pi * (k + 0.5) / 10000;
                if (std::abs(th - iv.lo) < 1e-9 || std::abs(th - iv.hi) < 1e-9) continue;
                const bool inside = !iv.empty() && th > iv.lo && th < iv.hi;
                double nx = std::sin(th) * std::cos(phi), ny = std::sin(th) * std::sin(phi),
                       nz = std::cos(th);
                bool stays = true;
                for (std::size_t i = 1; i < w.size() && stays; ++i)
                    stays = w[i].x * nx + w[i].y * ny + w[i].z * nz < 0.0;
                if (inside != stays) ok = false;
            }
        });
        if (!ok) {
            detail = "theta_interval disagrees with the grid scan";
            return false;
        }
        ++checked;
    }

    // shell weight vs the normal-speed oracle
    for (int i = 0; i <= 60; ++i) {
        const double theta_s = std::numbers::pi * i / 60.0;
        if (std::abs(shell_weight(theta_s, 0.75) -
                     oracles::shell_weight_by_normal_distance(theta_s, 0.75)) > 1e-6) {
            detail = "shell_weight oracle mismatch";
            return false;
        }
    }
    ++checked;

    // deterministic replay from the seed
    {
        const ExponentSet e;
        auto once = [&] {
            ChainConfig cfg;
            cfg.n_steps = 64;
            cfg.constraint = Constraint::HalfSpace;
            cfg.stride = 10;
            cfg.seed = 31337;
            return run_weighted_ensemble(cfg, kChains, 20000, [&](const WalkView& w) {
                return half_space_observable(w, e, 85 * kDeg);
            });
        };
        const auto a = once(), b = once();
        if (a.samples.size() != b.samples.size()) {
            detail = "replay changed the sample count";
            return false;
        }
        for (std::size_t i = 0; i < a.samples.size(); ++i)
            if (a.samples.samples[i].theta != b.samples.samples[i].theta ||
                a.samples.samples[i].weight != b.samples.samples[i].weight) {
                detail = "replay changed the sample stream";
                return false;
            }
        ++checked;
    }

    detail = "all " + std::to_string(checked) + " property groups hold";
    return true;
}

}  // namespace

int main() {
    std::printf("sawlab acceptance suite (chains=%d)\n", kChains);
    run_criterion("C1 chain-uniformity-N4", c1_chain_uniformity);
    run_criterion("C2 nu-sanity", c2_nu_sanity);
    run_criterion("C3 scaling-relation", c3_scaling_relation);
    run_criterion("C4 half-space-prediction", c4_half_space_prediction);
    run_criterion("C5 bisecting-plane", c5_bisecting_plane);
    run_criterion("C6 sphere-lattice-effect", c6_sphere_with_lattice_effect);
    run_criterion("C7 finite-N-decay", c7_finite_n_decay);
    run_criterion("C8 prediction-self-consistency", c8_prediction_self_consistency);
    run_criterion("C9 fit-b-round-trip", c9_fit_b_round_trip);
    run_criterion("C10 property-suites", c10_property_suites);

    if (g_failures) {
        std::printf("%d criterion(s) FAILED\n", g_failures);
        return 1;
    }
    std::printf("all criteria passed\n");
    return 0;
}
