#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <numbers>

#include "sawlab/lattice_effect.hpp"
#include "sawlab/rng.hpp"

using namespace sawlab;
using Catch::Approx;

namespace {

bool in_interval(const ThetaInterval& iv, double theta) {
    return !iv.empty() && theta > iv.lo && theta < iv.hi;
}

bool satisfies_constraint(const Walk& w, double theta, double phi) {
    const double nx = std::sin(theta) * std::cos(phi);
    const double ny = std::sin(theta) * std::sin(phi);
    const double nz = std::cos(theta);
    for (std::size_t i = 1; i < w.size(); ++i) {
        const double d = w[i].x * nx + w[i].y * ny + w[i].z * nz;
        if (!(d < 0.0)) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("theta_interval on rods") {
    const Walk up = new_rod(6, {0, 0, 1});
    for (double phi : {0.0, 1.1, 4.5}) {
        const auto iv = theta_interval(WalkRef{up}, phi);
        REQUIRE(iv.lo == Approx(std::numbers::pi / 2));
        REQUIRE(iv.hi == Approx(std::numbers::pi));
    }

    const Walk along_x = new_rod(5, {1, 0, 0});
    REQUIRE(theta_interval(WalkRef{along_x}, 0.0).empty());

    const Walk minus_x = new_rod(5, {-1, 0, 0});
    const auto iv = theta_interval(WalkRef{minus_x}, 0.0);
    REQUIRE(iv.lo == Approx(0.0));
    REQUIRE(iv.hi == Approx(std::numbers::pi));
}

TEST_CASE("theta_interval matches a brute-force grid scan") {
    ChainConfig cfg;
    cfg.n_steps = 50;
    cfg.seed = 21;
    cfg.stride = 25;
    Rng phi_rng(55);
    int nonempty = 0;
    run_chain(cfg, 40, [&](const WalkView& v) {
        const Walk w = v.materialize();
        const double phi = 2.0 * std::numbers::pi * phi_rng.uniform();
        const auto iv = theta_interval(WalkRef{w}, phi);
        if (!iv.empty()) ++nonempty;
        const int grid = 100000;
        for (int k = 0; k < grid; ++k) {
            const double theta = std::numbers::pi * (k + 0.5) / grid;
            if (std::abs(theta - iv.lo) < 1e-9 || std::abs(theta - iv.hi) < 1e-9) continue;
            REQUIRE(in_interval(iv, theta) == satisfies_constraint(w, theta, phi));
        }
    });
    // at N=50 a fair share of draws should produce a nonempty interval
    REQUIRE(nonempty > 0);
}

TEST_CASE("z-reflection maps the interval to its mirror") {
    ChainConfig cfg;
    cfg.n_steps = 30;
    cfg.seed = 9;
    cfg.stride = 10;
    Rng phi_rng(3);
    run_chain(cfg, 200, [&](const WalkView& v) {
        const Walk w = v.materialize();
        Walk mirrored = w;
        for (auto& p : mirrored) p.z = -p.z;
        const double phi = 2.0 * std::numbers::pi * phi_rng.uniform();
        const auto iv = theta_interval(WalkRef{w}, phi);
        const auto mv = theta_interval(WalkRef{mirrored}, phi);
        if (iv.empty()) {
            REQUIRE(mv.empty());
        } else {
            REQUIRE(mv.lo == Approx(std::numbers::pi - iv.hi).margin(1e-12));
            REQUIRE(mv.hi == Approx(std::numbers::pi - iv.lo).margin(1e-12));
        }
    });
}

TEST_CASE("estimate_lhat normalizes to mean one") {
    ChainConfig cfg;
    cfg.seed = 40;
    cfg.stride = 10;
    const auto table = estimate_lhat(50, 200000, 60, cfg);
    REQUIRE(table.bins == 60);
    REQUIRE(table.n_steps == 50);
    double mean = 0.0;
    for (double v : table.value) {
        REQUIRE(v >= 0.0);
        mean += v;
    }
    mean /= table.bins;
    REQUIRE(mean == Approx(1.0).margin(1e-12));
    REQUIRE(table.empty_bins == 0);
}

TEST_CASE("under-sampled tables flag empty bins") {
    ChainConfig cfg;
    cfg.seed = 8;
    cfg.stride = 1;
    const auto table = estimate_lhat(50, 40, 720, cfg);
    REQUIRE(table.empty_bins > 0);
}

TEST_CASE("lhat_lookup interpolation") {
    LatticeEffectTable t;
    t.n_steps = 100;
    t.bins = 4;
    t.value = {2.0, 2.0, 2.0, 2.0};
    for (double theta : {0.0, 0.4, 1.0, 2.2, std::numbers::pi}) REQUIRE(t.lookup(theta) == 2.0);

    t.value = {1.0, 3.0, 5.0, 7.0};
    REQUIRE(t.lookup(t.center(1)) == Approx(3.0));
    REQUIRE(t.lookup(0.5 * (t.center(1) + t.center(2))) == Approx(4.0));
    REQUIRE(t.lookup(0.0) == Approx(1.0));                 // clamped below
    REQUIRE(t.lookup(std::numbers::pi) == Approx(7.0));    // clamped above
}

TEST_CASE("lattice-effect table CSV round-trip") {
    ChainConfig cfg;
    cfg.seed = 77;
    cfg.stride = 5;
    const auto table = estimate_lhat(20, 20000, 45, cfg);
    const std::string path = "lhat_roundtrip_test.csv";
    table.save_csv(path);
    const auto loaded = LatticeEffectTable::load_csv(path);
    REQUIRE(loaded.bins == table.bins);
    REQUIRE(loaded.n_steps == table.n_steps);
    REQUIRE(loaded.n_samples == table.n_samples);
    for (int k = 0; k < table.bins; ++k)
        REQUIRE(loaded.value[std::size_t(k)] ==
                Approx(table.value[std::size_t(k)]).epsilon(1e-8));
    std::remove(path.c_str());
}
