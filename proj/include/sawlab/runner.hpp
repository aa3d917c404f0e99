// Parallel-chain fan-out. Each chain owns its RNG stream (derived from the
// master seed and chain_id) and its own sample buffer; buffers are merged in
// chain_id order, so results do not depend on scheduling or worker count.
#pragma once

#include <cstdint>
#include <optional>
#include <thread>
#include <vector>

#include "sawlab/ensembles.hpp"
#include "sawlab/pivot.hpp"

namespace sawlab {

struct EnsembleRunResult {
    SampleSet samples;          // merged in chain_id order
    ChainStats stats;           // summed over chains
    std::int64_t walks = 0;     // retained walks delivered to the observable
};

// Runs `chains` pivot chains and collects the emitted weighted samples.
// sample_fn: (const WalkView&) -> std::optional<WeightedSample>.
template <class SampleFn>
EnsembleRunResult run_weighted_ensemble(const ChainConfig& base, int chains,
                                        std::int64_t total_walks, SampleFn sample_fn) {
    if (chains < 1) chains = 1;
    std::vector<SampleSet> per_chain;
    per_chain.resize(std::size_t(chains));
    std::vector<ChainStats> per_stats;
    per_stats.resize(std::size_t(chains));
    std::vector<std::int64_t> per_walks(std::size_t(chains), 0);

    auto work = [&](int c) {
        ChainConfig cfg = base;
        cfg.chain_id = base.chain_id + c;
        const std::int64_t walks = total_walks / chains + (c < total_walks % chains ? 1 : 0);
        per_walks[std::size_t(c)] = walks;
        per_stats[std::size_t(c)] = run_chain(cfg, walks, [&](const WalkView& w) {
            if (auto s = sample_fn(w)) per_chain[std::size_t(c)].add(*s);
        });
    };

    if (chains == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(std::size_t(chains));
        for (int c = 0; c < chains; ++c) pool.emplace_back(work, c);
        for (auto& t : pool) t.join();
    }

    EnsembleRunResult out;
    for (int c = 0; c < chains; ++c) {
        out.samples.append(per_chain[std::size_t(c)]);
        out.stats.merge(per_stats[std::size_t(c)]);
        out.walks += per_walks[std::size_t(c)];
    }
    return out;
}

// Multi-chain lattice-effect estimate: per-chain count histograms summed in
// chain_id order.
inline LatticeEffectTable run_lattice_effect(const ChainConfig& base, int chains,
                                             std::int64_t total_samples, int bins) {
    if (chains < 1) chains = 1;
    std::vector<std::vector<std::uint64_t>> per_chain;
    per_chain.resize(std::size_t(chains));
    auto work = [&](int c) {
        ChainConfig cfg = base;
        cfg.chain_id = base.chain_id + c;
        const std::int64_t n = total_samples / chains + (c < total_samples % chains ? 1 : 0);
        per_chain[std::size_t(c)] = accumulate_lhat_counts(cfg, n, bins);
    };
    if (chains == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(std::size_t(chains));
        for (int c = 0; c < chains; ++c) pool.emplace_back(work, c);
        for (auto& t : pool) t.join();
    }
    std::vector<std::uint64_t> counts(std::size_t(bins), 0);
    for (const auto& pc : per_chain)
        for (std::size_t k = 0; k < counts.size(); ++k) counts[k] += pc[k];
    return LatticeEffectTable::from_counts(counts, base.n_steps, std::uint64_t(total_samples));
}

}  // namespace sawlab
