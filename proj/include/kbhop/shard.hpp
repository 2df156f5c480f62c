#pragma once
// Horizontal partition of the reified KB into contiguous triple-id ranges.
// Each shard evaluates the reified follow over its own rows; partial results
// are combined by a pairwise tree sum, so the output depends only on the
// shard count, never on worker scheduling.

#include <cstddef>
#include <future>
#include <vector>

#include "kbhop/follow.hpp"

namespace kbhop {

struct ShardedReifiedKb {
    std::vector<ReifiedKb> shards;       // fragment s owns triple ids [offsets[s], offsets[s+1])
    std::vector<std::size_t> offsets;    // size m+1, offsets[0]=0, offsets[m]=N_T
    std::size_t num_entities = 0;
    std::size_t num_relations = 0;
    std::size_t shard_count() const { return shards.size(); }
};

namespace detail {

inline CooMatrix coo_row_slice(const CooMatrix& m, std::size_t lo, std::size_t hi,
                               std::size_t n_cols) {
    std::vector<CooEntry> es;
    for (const CooEntry& e : m.entries()) {
        if (e.row >= lo && e.row < hi)
            es.push_back({static_cast<std::uint32_t>(e.row - lo), e.col, e.w});
    }
    return CooMatrix::from_entries(hi - lo, n_cols, std::move(es));
}

} // namespace detail

// Near-equal contiguous ranges; the first N_T mod m shards take one extra row.
inline ShardedReifiedKb partition_reified(const ReifiedKb& rkb, std::size_t m) {
    const std::size_t nt = rkb.num_triples();
    if (m < 1 || m > nt) throw InvalidShardCount("shard count must be in [1, N_T]");
    ShardedReifiedKb out;
    out.num_entities = rkb.num_entities();
    out.num_relations = rkb.num_relations();
    out.offsets.assign(m + 1, 0);
    const std::size_t base = nt / m;
    const std::size_t extra = nt % m;
    for (std::size_t s = 0; s < m; ++s)
        out.offsets[s + 1] = out.offsets[s] + base + (s < extra ? 1 : 0);
    out.shards.reserve(m);
    for (std::size_t s = 0; s < m; ++s) {
        const std::size_t lo = out.offsets[s];
        const std::size_t hi = out.offsets[s + 1];
        ReifiedKb frag;
        frag.m_subj = detail::coo_row_slice(rkb.m_subj, lo, hi, rkb.num_entities());
        frag.m_obj = detail::coo_row_slice(rkb.m_obj, lo, hi, rkb.num_entities());
        frag.m_rel = detail::coo_row_slice(rkb.m_rel, lo, hi, rkb.num_relations());
        out.shards.push_back(std::move(frag));
    }
    return out;
}

// Partition built from an explicit range table (testing aid for adversarial
// splits). Ranges must be disjoint, ordered, and cover [0, N_T).
inline ShardedReifiedKb partition_reified_with(const ReifiedKb& rkb,
                                               const std::vector<std::size_t>& offsets) {
    if (offsets.size() < 2 || offsets.front() != 0 || offsets.back() != rkb.num_triples())
        throw InvalidShardCount("offsets must cover [0, N_T]");
    for (std::size_t s = 0; s + 1 < offsets.size(); ++s)
        if (offsets[s + 1] < offsets[s]) throw InvalidShardCount("offsets must be ascending");
    ShardedReifiedKb out;
    out.num_entities = rkb.num_entities();
    out.num_relations = rkb.num_relations();
    out.offsets = offsets;
    for (std::size_t s = 0; s + 1 < offsets.size(); ++s) {
        ReifiedKb frag;
        frag.m_subj = detail::coo_row_slice(rkb.m_subj, offsets[s], offsets[s + 1],
                                            rkb.num_entities());
        frag.m_obj = detail::coo_row_slice(rkb.m_obj, offsets[s], offsets[s + 1],
                                           rkb.num_entities());
        frag.m_rel = detail::coo_row_slice(rkb.m_rel, offsets[s], offsets[s + 1],
                                           rkb.num_relations());
        out.shards.push_back(std::move(frag));
    }
    return out;
}

namespace detail {

// Pairwise tree sum over the shard partials, fixed by shard index.
inline DenseMatrix tree_sum(std::vector<DenseMatrix>& parts) {
    std::size_t n = parts.size();
    while (n > 1) {
        std::size_t half = (n + 1) / 2;
        for (std::size_t i = 0; i + half < n; ++i) add_inplace(parts[i], parts[i + half]);
        n = half;
    }
    return std::move(parts[0]);
}

} // namespace detail

// Each shard computes (X M_subj,s^T (.) R M_rel,s^T) M_obj,s over its triple
// range; X and R are broadcast to every shard. With parallel=true shards run
// on a worker per shard.
inline DenseMatrix follow_sharded(const ShardedReifiedKb& skb, const DenseMatrix& x,
                                  const DenseMatrix& r, bool parallel = true) {
    if (x.rows() != r.rows()) throw BatchMismatch("follow_sharded: batch sizes differ");
    if (x.cols() != skb.num_entities) throw DimensionMismatch("follow_sharded: X width");
    if (r.cols() != skb.num_relations) throw DimensionMismatch("follow_sharded: R width");
    const std::size_t m = skb.shard_count();
    std::vector<DenseMatrix> parts(m);
    if (parallel && m > 1) {
        std::vector<std::future<DenseMatrix>> futs;
        futs.reserve(m);
        for (std::size_t s = 0; s < m; ++s)
            futs.push_back(std::async(std::launch::async, [&, s] {
                return follow_reified(skb.shards[s], x, r);
            }));
        for (std::size_t s = 0; s < m; ++s) parts[s] = futs[s].get();
    } else {
        for (std::size_t s = 0; s < m; ++s) parts[s] = follow_reified(skb.shards[s], x, r);
    }
    return detail::tree_sum(parts);
}

} // namespace kbhop
