// Command-line driver: runs the pivot chains, applies the ensemble
// observables, and writes comparison / table CSVs.
//
//   sawlab half           half-space hitting-angle CDF vs prediction
//   sawlab sphere         sphere hitting-angle CDF vs prediction
//                         (corrected and uncorrected columns)
//   sawlab p2p            first hit of the bisecting plane vs sin^2
//   sawlab lattice-effect estimate the l-hat(theta) table
//   sawlab fit-b          fit the boundary exponent b from >= 3 runs
//   sawlab predict        tabulate a predicted CDF
#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "sawlab/csv.hpp"
#include "sawlab/ensembles.hpp"
#include "sawlab/predictions.hpp"
#include "sawlab/runner.hpp"
#include "sawlab/version.hpp"

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;
constexpr int kBatches = 20;

struct CommonOpts {
    std::int64_t n_steps = 1000;
    std::int64_t samples = 1000000;
    std::int64_t stride = 100;
    std::int64_t warmup = -1;
    int chains = 2;
    std::uint64_t seed = 1;
    std::string out;
    sawlab::ExponentSet exponents;
};

void add_common(CLI::App* cmd, CommonOpts& o, std::int64_t default_stride) {
    o.stride = default_stride;
    cmd->add_option("--n-steps", o.n_steps, "walk length N");
    cmd->add_option("--samples", o.samples, "retained walks fed to the observable");
    cmd->add_option("--stride", o.stride, "pivot attempts between retained walks");
    cmd->add_option("--warmup", o.warmup, "warmup attempts (-1: 20*N)");
    cmd->add_option("--chains", o.chains, "parallel chains (deterministic merge)");
    cmd->add_option("--seed", o.seed, "master seed");
    cmd->add_option("--out", o.out, "output CSV path")->required();
    cmd->add_option("--nu", o.exponents.nu, "exponent nu");
    cmd->add_option("--gamma", o.exponents.gamma, "exponent gamma");
    cmd->add_option("--gamma1", o.exponents.gamma1, "exponent gamma1 = gamma - rho");
    cmd->add_option("--b", o.exponents.b, "boundary exponent b");
}

sawlab::ChainConfig chain_config(const CommonOpts& o, sawlab::Constraint c) {
    sawlab::ChainConfig cfg;
    cfg.n_steps = int(o.n_steps);
    cfg.constraint = c;
    cfg.stride = o.stride;
    cfg.warmup = o.warmup;
    cfg.seed = o.seed;
    cfg.validate();
    return cfg;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

void stamp_meta(sawlab::CsvTable& t, const std::string& cmd, const CommonOpts& o) {
    t.set_meta("version", sawlab::kVersion);
    t.set_meta("cmd", cmd);
    t.set_meta("n_steps", std::to_string(o.n_steps));
    t.set_meta("samples", std::to_string(o.samples));
    t.set_meta("stride", std::to_string(o.stride));
    t.set_meta("warmup", std::to_string(o.warmup));
    t.set_meta("chains", std::to_string(o.chains));
    t.set_meta("seed", std::to_string(o.seed));
    t.set_meta("nu", fmt(o.exponents.nu));
    t.set_meta("gamma", fmt(o.exponents.gamma));
    t.set_meta("gamma1", fmt(o.exponents.gamma1));
    t.set_meta("b", fmt(o.exponents.b));
}

std::vector<double> degree_grid(int lo_deg, int hi_deg) {
    std::vector<double> g;
    for (int d = lo_deg; d <= hi_deg; ++d) g.push_back(d * kDeg);
    return g;
}

int run_half(const CommonOpts& o, double theta_max_deg) {
    if (!(theta_max_deg > 0.0 && theta_max_deg < 90.0))
        throw std::invalid_argument("half: --theta-max must lie in (0, 90)");
    o.exponents.validate();
    const double theta_max = theta_max_deg * kDeg;
    const auto cfg = chain_config(o, sawlab::Constraint::HalfSpace);

    const auto run = sawlab::run_weighted_ensemble(
        cfg, o.chains, o.samples, [&](const sawlab::WalkView& w) {
            return sawlab::half_space_observable(w, o.exponents, theta_max);
        });

    const auto grid = degree_grid(1, int(theta_max_deg));
    const auto cdf = sawlab::weighted_cdf(run.samples, grid, kBatches);

    sawlab::CsvTable t;
    stamp_meta(t, "half", o);
    t.set_meta("theta_max_deg", fmt(theta_max_deg));
    t.set_meta("emitted_samples", std::to_string(run.samples.size()));
    t.set_meta("acceptance", fmt(run.stats.acceptance_fraction()));
    t.columns = {"theta_deg", "cdf_sim", "cdf_pred", "diff", "err_2sigma"};
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const double pred = sawlab::cdf_half_conditioned(grid[j], o.exponents.b, theta_max);
        t.rows.push_back({grid[j] / kDeg, cdf.value[j], pred, cdf.value[j] - pred,
                          cdf.err2sigma[j]});
    }
    t.save(o.out);
    return 0;
}

int run_p2p(const CommonOpts& o) {
    o.exponents.validate();
    const auto cfg = chain_config(o, sawlab::Constraint::FullSpace);
    const auto run = sawlab::run_weighted_ensemble(
        cfg, o.chains, o.samples, [&](const sawlab::WalkView& w) {
            return std::optional<sawlab::WeightedSample>(
                sawlab::point_to_point_observable(w, o.exponents));
        });

    const auto grid = degree_grid(0, 90);
    const auto cdf = sawlab::weighted_cdf(run.samples, grid, kBatches);

    sawlab::CsvTable t;
    stamp_meta(t, "p2p", o);
    t.set_meta("emitted_samples", std::to_string(run.samples.size()));
    t.set_meta("acceptance", fmt(run.stats.acceptance_fraction()));
    t.columns = {"theta_deg", "cdf_sim", "cdf_pred", "diff", "err_2sigma"};
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const double pred = sawlab::cdf_bisect(grid[j]);
        t.rows.push_back({grid[j] / kDeg, cdf.value[j], pred, cdf.value[j] - pred,
                          cdf.err2sigma[j]});
    }
    t.save(o.out);
    return 0;
}

int run_sphere(const CommonOpts& o, double a, const std::string& table_path,
               bool no_lattice_effect) {
    o.exponents.validate();
    if (table_path.empty() && !no_lattice_effect)
        throw std::invalid_argument(
            "sphere: supply --lattice-effect-table or pass --no-lattice-effect explicitly");
    sawlab::SphereConfig scfg;
    scfg.a = a;
    scfg.validate();
    sawlab::LatticeEffectTable table;
    if (!table_path.empty()) {
        table = sawlab::LatticeEffectTable::load_csv(table_path);
        scfg.table = &table;
    }

    const auto cfg = chain_config(o, sawlab::Constraint::FullSpace);
    // one containment scan per walk: raw (uncorrected) sample, corrected by
    // dividing out l-hat afterwards
    sawlab::SphereConfig raw_cfg = scfg;
    raw_cfg.table = nullptr;
    const auto run = sawlab::run_weighted_ensemble(
        cfg, o.chains, o.samples, [&](const sawlab::WalkView& w) {
            return sawlab::sphere_observable(w, raw_cfg, o.exponents);
        });

    sawlab::SampleSet corrected;
    if (scfg.table) {
        corrected.samples.reserve(run.samples.size());
        for (const auto& s : run.samples.samples)
            corrected.add({s.theta, s.weight / table.lookup(s.theta)});
    }
    const sawlab::SampleSet& main_set = scfg.table ? corrected : run.samples;

    const auto grid = degree_grid(1, 180);
    const auto cdf = sawlab::weighted_cdf(main_set, grid, kBatches);
    const auto cdf_uncorr = sawlab::weighted_cdf(run.samples, grid, kBatches);

    sawlab::CsvTable t;
    stamp_meta(t, "sphere", o);
    t.set_meta("a", fmt(a));
    t.set_meta("lattice_effect_table", table_path.empty() ? "none" : table_path);
    t.set_meta("emitted_samples", std::to_string(run.samples.size()));
    t.set_meta("acceptance", fmt(run.stats.acceptance_fraction()));
    t.columns = {"theta_deg", "cdf_sim",         "cdf_pred",   "diff",
                 "err_2sigma", "cdf_sim_uncorr", "diff_uncorr", "err_2sigma_uncorr"};
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const double pred = sawlab::cdf_sphere(grid[j], a, o.exponents.b);
        t.rows.push_back({grid[j] / kDeg, cdf.value[j], pred, cdf.value[j] - pred,
                          cdf.err2sigma[j], cdf_uncorr.value[j], cdf_uncorr.value[j] - pred,
                          cdf_uncorr.err2sigma[j]});
    }
    t.save(o.out);
    return 0;
}

int run_lattice_effect(const CommonOpts& o, int bins) {
    if (bins < 1) throw std::invalid_argument("lattice-effect: --bins must be positive");
    const auto cfg = chain_config(o, sawlab::Constraint::FullSpace);
    const auto table = sawlab::run_lattice_effect(cfg, o.chains, o.samples, bins);
    if (table.empty_bins > 0)
        std::cerr << "warning: " << table.empty_bins
                  << " empty bins; increase --samples for a usable table\n";
    table.save_csv(o.out);
    return 0;
}

int run_fit_b(const std::vector<std::string>& inputs, double beta0, const std::string& out) {
    std::vector<std::vector<double>> data;
    std::vector<double> n_values;
    std::vector<double> grid;
    std::optional<double> theta0;
    for (const auto& path : inputs) {
        const auto t = sawlab::CsvTable::load(path);
        const auto theta_deg = t.column("theta_deg");
        std::vector<double> g(theta_deg.size());
        for (std::size_t j = 0; j < g.size(); ++j) g[j] = theta_deg[j] * kDeg;
        if (grid.empty()) {
            grid = g;
            if (const auto* tm = t.find_meta("theta_max_deg")) theta0 = std::stod(*tm) * kDeg;
        } else if (g != grid) {
            throw std::invalid_argument("fit-b: " + path + " is not on the shared theta grid");
        }
        const auto* n = t.find_meta("n_steps");
        if (!n) throw std::invalid_argument("fit-b: " + path + " lacks n_steps metadata");
        n_values.push_back(std::stod(*n));
        data.push_back(t.column("cdf_sim"));
    }

    const auto fit = sawlab::fit_b(grid, data, n_values, beta0, theta0);
    std::printf("b        = %.6f\n", fit.b);
    std::printf("epsilon  = %.3e\n", fit.epsilon);
    std::printf("p_fit    = %.4f\n", fit.p_fit);
    std::printf("residual = %.4e\n", fit.residual);

    if (!out.empty()) {
        sawlab::CsvTable t;
        t.set_meta("version", sawlab::kVersion);
        t.set_meta("cmd", "fit-b");
        t.set_meta("beta0", fmt(beta0));
        t.set_meta("b", fmt(fit.b));
        t.set_meta("p_fit", fmt(fit.p_fit));
        t.set_meta("residual", fmt(fit.residual));
        t.columns = {"theta_deg", "g"};
        for (std::size_t j = 0; j < grid.size(); ++j)
            t.rows.push_back({grid[j] / kDeg, fit.g[j]});
        t.save(out);
    }
    return 0;
}

int run_predict(const std::string& kind, double a, double b, double theta_max_deg,
                const std::string& out) {
    sawlab::CsvTable t;
    t.set_meta("version", sawlab::kVersion);
    t.set_meta("cmd", "predict");
    t.set_meta("kind", kind);
    t.set_meta("b", fmt(b));
    t.columns = {"theta_deg", "cdf_pred"};
    if (kind == "half") {
        t.set_meta("theta_max_deg", fmt(theta_max_deg));
        for (int d = 0; d <= int(theta_max_deg); ++d)
            t.rows.push_back({double(d), sawlab::cdf_half(d * kDeg, b)});
    } else if (kind == "sphere") {
        t.set_meta("a", fmt(a));
        for (int d = 0; d <= 180; ++d) t.rows.push_back({double(d), sawlab::cdf_sphere(d * kDeg, a, b)});
    } else if (kind == "bisect") {
        for (int d = 0; d <= 90; ++d) t.rows.push_back({double(d), sawlab::cdf_bisect(d * kDeg)});
    } else {
        throw std::invalid_argument("predict: --kind must be half, sphere or bisect");
    }
    t.save(out);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Self-avoiding-walk hitting-density laboratory"};
    app.require_subcommand(1);

    CommonOpts half_opts, sphere_opts, p2p_opts, lat_opts;
    double theta_max_deg = 85.0;
    double sphere_a = 0.75;
    std::string sphere_table;
    bool no_lattice_effect = false;
    int bins = 180;
    std::vector<std::string> fit_inputs;
    double fit_beta0 = 1.3303;
    std::string fit_out;
    std::string predict_kind = "half", predict_out;
    double predict_a = 0.75, predict_b = 1.3303, predict_theta_max = 85.0;

    auto* half = app.add_subcommand("half", "half-space hitting CDF vs prediction");
    add_common(half, half_opts, 100);
    half->add_option("--theta-max", theta_max_deg, "conditioning angle theta_0 in degrees");

    auto* sphere = app.add_subcommand("sphere", "sphere hitting CDF vs prediction");
    add_common(sphere, sphere_opts, 10);
    sphere->add_option("--a", sphere_a, "start offset along z");
    sphere->add_option("--lattice-effect-table", sphere_table, "l-hat table CSV");
    sphere->add_flag("--no-lattice-effect", no_lattice_effect, "run without the l-hat correction");

    auto* p2p = app.add_subcommand("p2p", "first hit of the bisecting plane vs sin^2");
    add_common(p2p, p2p_opts, 100);

    auto* lat = app.add_subcommand("lattice-effect", "estimate the l-hat(theta) table");
    add_common(lat, lat_opts, 10);
    lat->add_option("--bins", bins, "theta bins over [0, pi]");

    auto* fit = app.add_subcommand("fit-b", "fit b from >= 3 comparison CSVs");
    fit->add_option("inputs", fit_inputs, "comparison CSVs on a shared grid")
        ->required()
        ->expected(-3);
    fit->add_option("--b", fit_beta0, "initial estimate beta_0");
    fit->add_option("--out", fit_out, "g(theta) table CSV");

    auto* pred = app.add_subcommand("predict", "tabulate a predicted CDF");
    pred->add_option("--kind", predict_kind, "half | sphere | bisect");
    pred->add_option("--a", predict_a, "start offset (sphere)");
    pred->add_option("--b", predict_b, "boundary exponent");
    pred->add_option("--theta-max", predict_theta_max, "grid top for half, degrees");
    pred->add_option("--out", predict_out, "output CSV path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (half->parsed()) return run_half(half_opts, theta_max_deg);
        if (sphere->parsed()) return run_sphere(sphere_opts, sphere_a, sphere_table, no_lattice_effect);
        if (p2p->parsed()) return run_p2p(p2p_opts);
        if (lat->parsed()) return run_lattice_effect(lat_opts, bins);
        if (fit->parsed()) return run_fit_b(fit_inputs, fit_beta0, fit_out);
        if (pred->parsed())
            return run_predict(predict_kind, predict_a, predict_b, predict_theta_max, predict_out);
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
    return 0;
}
