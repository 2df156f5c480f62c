#pragma once
// Two-hop follow throughput harness over the invented-relation grid.
// Each strategy answers the same batch of one-hot queries with uniform
// relation weights; rows report queries per second, the peak matrix
// footprint of the follow region (elements * 8 bytes), and wall seconds.
// Every strategy is checked against the naive reference on a probe slice
// before any timing, so a wrong kernel can never post a number.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "kbhop/follow.hpp"
#include "kbhop/grid.hpp"
#include "kbhop/rng.hpp"
#include "kbhop/shard.hpp"

namespace kbhop {

struct BenchConfig {
    std::size_t n = 64;   // grid side, N_E = n^2
    std::size_t m = 4;    // invented relation count
    std::size_t b = 128;  // batch rows
    std::size_t reps = 20;
    std::size_t warmup = 3;
    std::size_t shards = 4; // reified-sharded only
    std::vector<std::string> strategies = {"naive", "late", "reified"};
    std::uint64_t seed = 0;
};

struct BenchRow {
    std::string strategy;
    std::size_t n = 0, m = 0, b = 0;
    double qps = 0.0;
    std::size_t peak_bytes = 0;
    double seconds = 0.0;
};

inline void validate_bench(const BenchConfig& cfg) {
    if (cfg.n < 2) throw ConfigError("grid side must be >= 2");
    if (cfg.m == 0) throw ConfigError("relation count must be positive");
    if (cfg.b == 0) throw ConfigError("batch size must be positive");
    if (cfg.reps == 0) throw ConfigError("rep count must be positive");
    if (cfg.shards == 0) throw ConfigError("shard count must be positive");
    if (cfg.strategies.empty()) throw ConfigError("no strategies requested");
    for (const std::string& s : cfg.strategies)
        if (s != "naive" && s != "late" && s != "reified" && s != "reified-sharded")
            throw ConfigError("unknown strategy: " + s);
}

namespace detail {

// batch two-hop via the single-example reference, row by row
inline DenseMatrix naive_two_hop(const TypedKb& kb, const DenseMatrix& x,
                                 const DenseMatrix& r) {
    const TypeId cell = kb.groups()[0].subj_type;
    DenseMatrix out(x.rows(), x.cols());
    for (std::size_t i = 0; i < x.rows(); ++i) {
        EntitySetVec xv{cell, std::vector<double>(x.cols())};
        for (std::size_t c = 0; c < x.cols(); ++c) xv.values[c] = x(i, c);
        RelSetVec rv{0, std::vector<double>(r.cols())};
        for (std::size_t c = 0; c < r.cols(); ++c) rv.values[c] = r(i, c);
        const EntitySetVec hop = follow_naive(kb, follow_naive(kb, xv, rv), rv);
        for (std::size_t c = 0; c < hop.values.size(); ++c) out(i, c) = hop.values[c];
    }
    return out;
}

} // namespace detail

inline std::vector<BenchRow> run_bench(const BenchConfig& cfg) {
    validate_bench(cfg);

    GridSpec gs;
    gs.n = cfg.n;
    gs.invented_relations = cfg.m;
    const TypedKb kb = gen_grid(gs);
    bool want_reified = false, want_sharded = false;
    for (const std::string& s : cfg.strategies) {
        want_reified |= s == "reified" || s == "reified-sharded";
        want_sharded |= s == "reified-sharded";
    }
    const ReifiedKb rkb = want_reified ? reify(kb) : ReifiedKb{};
    const ShardedReifiedKb skb =
        want_sharded ? partition_reified(rkb, cfg.shards) : ShardedReifiedKb{};

    Rng rng(cfg.seed);
    DenseMatrix x(cfg.b, kb.num_entities());
    for (std::size_t i = 0; i < cfg.b; ++i) x(i, rng.randint(kb.num_entities())) = 1.0;
    const DenseMatrix r(cfg.b, cfg.m, 1.0); // every relation weighted equally

    std::vector<BenchRow> rows;
    rows.reserve(cfg.strategies.size());
    double sink = 0.0;
    for (const std::string& name : cfg.strategies) {
        std::function<DenseMatrix(const DenseMatrix&, const DenseMatrix&)> hop2;
        if (name == "naive")
            hop2 = [&](const DenseMatrix& hx, const DenseMatrix& hr) {
                return detail::naive_two_hop(kb, hx, hr);
            };
        else if (name == "late")
            hop2 = [&](const DenseMatrix& hx, const DenseMatrix& hr) {
                return follow_late(kb, 0, follow_late(kb, 0, hx, hr), hr);
            };
        else if (name == "reified")
            hop2 = [&](const DenseMatrix& hx, const DenseMatrix& hr) {
                return follow_reified(rkb, follow_reified(rkb, hx, hr), hr);
            };
        else
            hop2 = [&](const DenseMatrix& hx, const DenseMatrix& hr) {
                return follow_sharded(skb, follow_sharded(skb, hx, hr), hr);
            };

        // probe slice against the reference before any timing
        {
            const std::size_t probe = std::min<std::size_t>(cfg.b, 4);
            DenseMatrix px(probe, kb.num_entities());
            DenseMatrix pr(probe, cfg.m, 1.0);
            for (std::size_t i = 0; i < probe; ++i)
                for (std::size_t c = 0; c < x.cols(); ++c) px(i, c) = x(i, c);
            if (max_abs_diff(detail::naive_two_hop(kb, px, pr), hop2(px, pr)) > 1e-9)
                throw Error("strategy " + name + " disagrees with the reference");
        }

        mem::reset();
        for (std::size_t w = 0; w < cfg.warmup; ++w) sink += hop2(x, r)(0, 0);
        const auto t0 = std::chrono::steady_clock::now();
        for (std::size_t rep = 0; rep < cfg.reps; ++rep) sink += hop2(x, r)(0, 0);
        const auto t1 = std::chrono::steady_clock::now();
        const double seconds = std::chrono::duration<double>(t1 - t0).count();

        BenchRow row;
        row.strategy = name;
        row.n = cfg.n;
        row.m = cfg.m;
        row.b = cfg.b;
        row.seconds = seconds;
        row.qps = static_cast<double>(cfg.reps * cfg.b) / std::max(seconds, 1e-12);
        row.peak_bytes = mem::peak_elements() * sizeof(double);
        rows.push_back(std::move(row));
    }
    if (sink == 12345.6789) std::puts(""); // keep the result matrices alive
    return rows;
}

inline std::string bench_csv(const std::vector<BenchRow>& rows) {
    std::string out = "strategy,n,m,b,qps,peak_bytes,seconds\n";
    char buf[256];
    for (const BenchRow& r : rows) {
        std::snprintf(buf, sizeof(buf), "%s,%zu,%zu,%zu,%.3f,%zu,%.6f\n",
                      r.strategy.c_str(), r.n, r.m, r.b, r.qps, r.peak_bytes, r.seconds);
        out += buf;
    }
    return out;
}

} // namespace kbhop
