// Azimuth-averaged lattice-effect function l-hat(theta): for each sampled
// walk and a uniform azimuth phi, the set of polar angles theta for which the
// walk stays strictly on the negative side of the plane through the origin
// with normal n(theta,phi) is a single (possibly empty) interval; bin-center
// indicators averaged over samples estimate l-hat up to normalization.
#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sawlab/pivot.hpp"
#include "sawlab/rng.hpp"

namespace sawlab {

struct ThetaInterval {
    double lo = 0.0;
    double hi = 0.0;
    bool empty() const { return !(lo < hi); }
};

// Intersection over sites i >= 1 of {theta : <site_i, n(theta,phi)> < 0}.
// Per site the constraint A sin(theta) + B cos(theta) < 0 with
// A = x cos(phi) + y sin(phi), B = z cuts [0, pi] to one sub-interval.
template <class WalkLike>
ThetaInterval theta_interval(const WalkLike& w, double phi) {
    const double cphi = std::cos(phi);
    const double sphi = std::sin(phi);
    double lo = 0.0, hi = std::numbers::pi;
    const int n = w.n_steps();
    for (int i = 1; i <= n; ++i) {
        const Point s = w.site(i);
        const double a = double(s.x) * cphi + double(s.y) * sphi;
        const double b = double(s.z);
        if (b > 0.0) {
            lo = std::max(lo, std::atan2(b, -a));  // negative on (root, pi]
        } else if (b < 0.0) {
            hi = std::min(hi, std::atan2(-b, a));  // negative on [0, root)
        } else if (a >= 0.0) {
            return {0.0, 0.0};  // b == 0: A sin(theta) never negative on (0, pi)
        }
        if (!(lo < hi)) return {0.0, 0.0};
    }
    return {lo, hi};
}

// Adapter so plain Walks can be fed to theta_interval in tests.
struct WalkRef {
    const Walk& w;
    int n_steps() const { return sawlab::n_steps(w); }
    Point site(int i) const { return w[std::size_t(i)]; }
};

struct LatticeEffectTable {
    int n_steps = 0;
    int bins = 0;
    std::uint64_t n_samples = 0;
    std::vector<double> value;  // per bin, normalized to mean 1
    int empty_bins = 0;         // flagged when a bin saw no counts

    double bin_width() const { return std::numbers::pi / bins; }
    double center(int k) const { return (k + 0.5) * bin_width(); }

    // Linear interpolation between bin centers, clamped at the end bins.
    double lookup(double theta) const {
        const double w = bin_width();
        const double x = theta / w - 0.5;
        if (x <= 0.0) return value.front();
        if (x >= double(bins - 1)) return value.back();
        const int k = int(x);
        const double f = x - double(k);
        return value[std::size_t(k)] * (1.0 - f) + value[std::size_t(k) + 1] * f;
    }

    static LatticeEffectTable from_counts(const std::vector<std::uint64_t>& counts, int n_steps,
                                          std::uint64_t n_samples) {
        LatticeEffectTable t;
        t.n_steps = n_steps;
        t.bins = int(counts.size());
        t.n_samples = n_samples;
        long double total = 0.0;
        for (auto c : counts) total += c;
        if (!(total > 0.0))
            throw std::runtime_error("lattice-effect table: no interval hit any bin");
        t.value.resize(counts.size());
        for (std::size_t k = 0; k < counts.size(); ++k) {
            if (counts[k] == 0) ++t.empty_bins;
            t.value[k] = double((long double)(counts[k]) * counts.size() / total);  // mean 1
        }
        return t;
    }

    void save_csv(const std::string& path) const {
        std::ofstream out(path);
        if (!out) throw std::runtime_error("cannot open " + path + " for writing");
        out << "# n_steps = " << n_steps << "\n";
        out << "# samples = " << n_samples << "\n";
        out << "# bins = " << bins << "\n";
        out << "theta_center_deg,value\n";
        char buf[64];
        for (int k = 0; k < bins; ++k) {
            std::snprintf(buf, sizeof buf, "%.9g,%.9g\n", center(k) * 180.0 / std::numbers::pi,
                          value[std::size_t(k)]);
            out << buf;
        }
    }

    static LatticeEffectTable load_csv(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open " + path);
        LatticeEffectTable t;
        std::string line;
        bool header_seen = false;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            if (line[0] == '#') {
                std::istringstream ss(line.substr(1));
                std::string key, eq;
                ss >> key >> eq;
                if (key == "n_steps") ss >> t.n_steps;
                else if (key == "samples") ss >> t.n_samples;
                continue;
            }
            if (!header_seen) {
                if (line != "theta_center_deg,value")
                    throw std::runtime_error("lattice-effect table: unexpected header in " + path);
                header_seen = true;
                continue;
            }
            const auto comma = line.find(',');
            if (comma == std::string::npos)
                throw std::runtime_error("lattice-effect table: malformed row in " + path);
            t.value.push_back(std::stod(line.substr(comma + 1)));
        }
        if (t.value.empty()) throw std::runtime_error("lattice-effect table: no rows in " + path);
        t.bins = int(t.value.size());
        for (double v : t.value)
            if (v == 0.0) ++t.empty_bins;
        return t;
    }
};

// One chain's worth of bin-center counts; merged across chains by summation.
// phi is drawn from a dedicated stream so the chain's pivot randomness is
// untouched.
inline std::vector<std::uint64_t> accumulate_lhat_counts(const ChainConfig& cfg,
                                                         std::int64_t samples, int bins) {
    std::vector<std::int64_t> diff(std::size_t(bins) + 1, 0);
    Rng phi_rng(mix64(chain_seed(cfg.seed, std::uint64_t(cfg.chain_id)) ^ 0xA21CE35EED15ull));
    const double width = std::numbers::pi / bins;
    run_chain(cfg, samples, [&](const WalkView& w) {
        const double phi = 2.0 * std::numbers::pi * phi_rng.uniform();
        const ThetaInterval iv = theta_interval(w, phi);
        if (iv.empty()) return;
        int k_first = int(std::floor(iv.lo / width - 0.5)) + 1;
        int k_last = int(std::ceil(iv.hi / width - 0.5)) - 1;
        k_first = std::max(k_first, 0);
        k_last = std::min(k_last, bins - 1);
        if (k_first > k_last) return;
        ++diff[std::size_t(k_first)];
        --diff[std::size_t(k_last) + 1];
    });
    std::vector<std::uint64_t> counts(std::size_t(bins), 0);
    std::int64_t run = 0;
    for (int k = 0; k < bins; ++k) {
        run += diff[std::size_t(k)];
        counts[std::size_t(k)] = std::uint64_t(run);
    }
    return counts;
}

// Single-chain estimator; the CLI fans this out over chains and merges counts.
inline LatticeEffectTable estimate_lhat(int n_steps, std::int64_t samples, int bins,
                                        ChainConfig cfg) {
    if (bins < 1) throw std::invalid_argument("estimate_lhat: bins must be >= 1");
    cfg.n_steps = n_steps;
    cfg.constraint = Constraint::FullSpace;
    const auto counts = accumulate_lhat_counts(cfg, samples, bins);
    return LatticeEffectTable::from_counts(counts, n_steps, std::uint64_t(samples));
}

}  // namespace sawlab
