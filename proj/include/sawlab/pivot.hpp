// Pivot-algorithm Markov chain over the fixed-length ensemble E_N (full
// space) and the half-space fixed-length ensemble E_N^+.
//
// A proposal picks a pivot site k in {0,...,N-1} and a non-identity lattice
// symmetry g, replaces the sites j > k by omega(k) + g (omega(j) - omega(k)),
// and accepts iff the proposal is self-avoiding (and, for half-space chains,
// keeps every site after the origin at z >= 1). k = 0 must be included: it
// rotates the whole walk about the origin, and without it the first step
// never changes, so the chain would not be ergodic over anchored walks. The
// occupancy check probes the transformed tail from the pivot outward against
// a persistent index of the whole walk, ignoring entries on the moving side.
#pragma once

#include <cassert>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "sawlab/lattice.hpp"
#include "sawlab/rng.hpp"

namespace sawlab {

struct ChainConfig {
    int n_steps = 0;
    Constraint constraint = Constraint::FullSpace;
    std::int64_t stride = 100;
    std::int64_t warmup = -1;  // -1: default 20 * n_steps attempted pivots
    std::uint64_t seed = 0;
    int chain_id = 0;

    std::int64_t effective_warmup() const { return warmup < 0 ? 20ll * n_steps : warmup; }

    void validate() const {
        if (n_steps < 2) throw std::invalid_argument("ChainConfig: n_steps must be >= 2");
        if (n_steps > 500000)
            throw std::invalid_argument("ChainConfig: n_steps exceeds the site-packing limit");
        if (stride < 1) throw std::invalid_argument("ChainConfig: stride must be >= 1");
    }
};

// Read-only view of the current walk, re-anchored to the origin on access.
class WalkView {
  public:
    WalkView(std::span<const Point> raw, Point anchor) : raw_(raw), anchor_(anchor) {}

    int n_steps() const { return static_cast<int>(raw_.size()) - 1; }
    Point site(int i) const { return raw_[std::size_t(i)] - anchor_; }
    Point endpoint() const { return raw_.back() - anchor_; }

    Walk materialize() const {
        Walk w(raw_.size());
        for (std::size_t i = 0; i < raw_.size(); ++i) w[i] = raw_[i] - anchor_;
        return w;
    }

  private:
    std::span<const Point> raw_;
    Point anchor_;
};

struct ChainStats {
    std::int64_t attempts = 0;
    std::int64_t accepted = 0;
    double acceptance_fraction() const { return attempts ? double(accepted) / double(attempts) : 0.0; }

    void merge(const ChainStats& o) {
        attempts += o.attempts;
        accepted += o.accepted;
    }
};

class PivotChain {
  public:
    explicit PivotChain(const ChainConfig& cfg)
        : PivotChain(cfg, new_rod(cfg.n_steps,
                                  cfg.constraint == Constraint::HalfSpace ? Point{0, 0, 1}
                                                                          : Point{1, 0, 0})) {}

    PivotChain(const ChainConfig& cfg, Walk initial)
        : cfg_(cfg), rng_(chain_seed(cfg.seed, std::uint64_t(cfg.chain_id))) {
        cfg_.validate();
        if (n_steps(initial) != cfg_.n_steps || !is_valid_walk(initial, cfg_.constraint))
            throw std::invalid_argument("PivotChain: invalid initial walk");
        raw_ = std::move(initial);
        scratch_.resize(raw_.size());
        index_.reset_capacity(raw_.size());
        rebuild_index();
    }

    // One attempted pivot with randomly chosen (k, g).
    bool step() {
        const int k = static_cast<int>(rng_.bounded(std::uint64_t(cfg_.n_steps)));
        const auto& group = symmetry_group();
        const Symmetry& g = group[1 + rng_.bounded(47)];
        return propose_and_apply(k, g);
    }

    // Deterministic single proposal; exposed for tests of the move mechanics.
    bool propose_and_apply(int k, const Symmetry& g) {
        ++stats_.attempts;
        const int n = cfg_.n_steps;
        const Point pivot = raw_[std::size_t(k)];
        const bool half = cfg_.constraint == Constraint::HalfSpace;

        for (int j = k + 1; j <= n; ++j) {
            const Point t = pivot + g.apply(raw_[std::size_t(j)] - pivot);
            if (half && t.z < 1) return false;
            if (collides(t, k)) return false;
            scratch_[std::size_t(j)] = t;
        }
        for (int j = k + 1; j <= n; ++j) {
            raw_[std::size_t(j)] = scratch_[std::size_t(j)];
            index_.insert(pack_site(scratch_[std::size_t(j)]), j);
        }
        ++stats_.accepted;
        if (index_.needs_rebuild()) rebuild_index();
        return true;
    }

    WalkView view() const { return WalkView(raw_, raw_[0]); }
    const ChainStats& stats() const { return stats_; }
    Rng& rng() { return rng_; }
    const ChainConfig& config() const { return cfg_; }

  private:
    // A probe hit counts only if the entry is live (matches the walk) and
    // sits on the fixed side of the pivot.
    bool collides(Point t, int k) const {
        return index_.contains_if(pack_site(t), [&](std::int32_t i) {
            return i <= k && raw_[std::size_t(i)] == t;
        });
    }

    void rebuild_index() {
        index_.clear();
        for (std::size_t i = 0; i < raw_.size(); ++i)
            index_.insert(pack_site(raw_[i]), static_cast<std::int32_t>(i));
    }

    ChainConfig cfg_;
    Rng rng_;
    std::vector<Point> raw_;
    std::vector<Point> scratch_;
    SiteIndex index_;
    ChainStats stats_;
};

// Drives a chain: warmup attempts, then `n_samples` observations spaced
// `stride` attempts apart. Identical (cfg, n_samples) with an identical seed
// reproduce the identical sample stream.
template <class Observer>
ChainStats run_chain(const ChainConfig& cfg, std::int64_t n_samples, Observer&& observe) {
    PivotChain chain(cfg);
    const std::int64_t warmup = cfg.effective_warmup();
    for (std::int64_t i = 0; i < warmup; ++i) chain.step();
    for (std::int64_t s = 0; s < n_samples; ++s) {
        for (std::int64_t i = 0; i < cfg.stride; ++i) chain.step();
#ifndef NDEBUG
        assert(is_valid_walk(chain.view().materialize(), cfg.constraint));
#endif
        observe(chain.view());
    }
    return chain.stats();
}

}  // namespace sawlab
