#pragma once
// The relation-set following operator in its three forms:
//   naive  - mix relation matrices into M_R, then one sparse-dense product
//            (single example only; it has no batch form)
//   late   - per-relation products X*M_k mixed by broadcasting column k of R
//   reified - triple-indexed matrices M_subj/M_obj/M_rel and a Hadamard join
// All quantities are non-negative, so the support of any output equals the
// hard-logic neighborhood of the inputs. Accumulation is in double and the
// loop orders are fixed, making results deterministic.

#include <cstdint>
#include <vector>

#include "kbhop/coo.hpp"
#include "kbhop/dense.hpp"
#include "kbhop/errors.hpp"
#include "kbhop/kb.hpp"

namespace kbhop {

// M_R = sum_k r[k] * M_{r_k}, over the relations of r's group.
inline CooMatrix mix_relations(const TypedKb& kb, const RelSetVec& r) {
    const RelationGroup& g = kb.groups()[r.group];
    if (r.values.size() != g.relations.size())
        throw DimensionMismatch("mix_relations: relation vector length");
    std::vector<CooEntry> entries;
    for (std::size_t k = 0; k < g.relations.size(); ++k) {
        if (r.values[k] == 0.0) continue;
        if (r.values[k] < 0.0) throw NegativeWeight("mix_relations: negative relation weight");
        auto [lo, hi] = kb.triple_range(g.relations[k]);
        for (std::size_t i = lo; i < hi; ++i) {
            const Triple& t = kb.triples()[i];
            entries.push_back({static_cast<std::uint32_t>(t.subj.index),
                               static_cast<std::uint32_t>(t.obj.index),
                               r.values[k] * t.weight});
        }
    }
    return CooMatrix::from_entries(kb.type_size(g.subj_type), kb.type_size(g.obj_type),
                                   std::move(entries));
}

// follow(x, r) = x * M_R. Single example; see follow_late for minibatches.
inline EntitySetVec follow_naive(const TypedKb& kb, const EntitySetVec& x, const RelSetVec& r) {
    const RelationGroup& g = kb.groups()[r.group];
    if (x.type != g.subj_type)
        throw IncompatibleRelations("follow_naive: x type does not match relation group");
    if (x.values.size() != kb.type_size(g.subj_type))
        throw DimensionMismatch("follow_naive: x length");
    CooMatrix m = mix_relations(kb, r);
    EntitySetVec out{g.obj_type, std::vector<double>(kb.type_size(g.obj_type), 0.0)};
    for (const CooEntry& e : m.entries()) out.values[e.col] += e.w * x.values[e.row];
    return out;
}

// follow(X, R) = sum_k R[:,k] (*) (X * M_k), the column broadcast scaling
// each row of X*M_k. One X*M_k is live at a time; accumulation order is
// ascending k.
inline DenseMatrix follow_late(const TypedKb& kb, GroupId group, const DenseMatrix& x,
                               const DenseMatrix& r) {
    const RelationGroup& g = kb.groups()[group];
    if (x.rows() != r.rows()) throw BatchMismatch("follow_late: batch sizes differ");
    if (x.cols() != kb.type_size(g.subj_type)) throw DimensionMismatch("follow_late: X width");
    if (r.cols() != g.relations.size()) throw DimensionMismatch("follow_late: R width");
    DenseMatrix out(x.rows(), kb.type_size(g.obj_type));
    for (std::size_t k = 0; k < g.relations.size(); ++k) {
        CooMatrix mk = relation_matrix(kb, g.relations[k]);
        DenseMatrix prod = dense_spmm(x, mk);
        for (std::size_t i = 0; i < out.rows(); ++i) {
            const double rik = r(i, k);
            if (rik == 0.0) continue;
            const double* src = prod.row(i);
            double* dst = out.row(i);
            for (std::size_t j = 0; j < out.cols(); ++j) dst[j] += rik * src[j];
        }
    }
    return out;
}

// The reified KB: triple l = (i_l, j_l, k_l, w_l) in the canonical order.
// Row l of m_subj is one entry of value 1 at column i_l; m_obj likewise at
// j_l; m_rel holds w_l at column k_l. Entity columns live in the global
// entity space, relation columns are RelationIds.
struct ReifiedKb {
    CooMatrix m_subj; // N_T x N_E
    CooMatrix m_obj;  // N_T x N_E
    CooMatrix m_rel;  // N_T x N_R
    std::size_t num_triples() const { return m_subj.n_rows(); }
    std::size_t num_entities() const { return m_subj.n_cols(); }
    std::size_t num_relations() const { return m_rel.n_cols(); }
};

inline ReifiedKb reify(const TypedKb& kb) {
    const std::size_t nt = kb.num_triples();
    std::vector<CooEntry> subj, obj, rel;
    subj.reserve(nt);
    obj.reserve(nt);
    rel.reserve(nt);
    for (std::size_t l = 0; l < nt; ++l) {
        const Triple& t = kb.triples()[l];
        subj.push_back({static_cast<std::uint32_t>(l),
                        static_cast<std::uint32_t>(kb.global_index(t.subj)), 1.0});
        obj.push_back({static_cast<std::uint32_t>(l),
                       static_cast<std::uint32_t>(kb.global_index(t.obj)), 1.0});
        rel.push_back({static_cast<std::uint32_t>(l), static_cast<std::uint32_t>(t.rel),
                       t.weight});
    }
    ReifiedKb r;
    r.m_subj = CooMatrix::from_entries(nt, kb.num_entities(), std::move(subj));
    r.m_obj = CooMatrix::from_entries(nt, kb.num_entities(), std::move(obj));
    r.m_rel = CooMatrix::from_entries(nt, kb.num_relations(), std::move(rel));
    return r;
}

// follow(X, R) = (X M_subj^T (.) R M_rel^T) M_obj
inline DenseMatrix follow_reified(const ReifiedKb& rkb, const DenseMatrix& x,
                                  const DenseMatrix& r) {
    if (x.rows() != r.rows()) throw BatchMismatch("follow_reified: batch sizes differ");
    if (x.cols() != rkb.num_entities()) throw DimensionMismatch("follow_reified: X width");
    if (r.cols() != rkb.num_relations()) throw DimensionMismatch("follow_reified: R width");
    DenseMatrix picked_subj = dense_spmm(x, rkb.m_subj, /*transpose_a=*/true);
    DenseMatrix picked_rel = dense_spmm(r, rkb.m_rel, /*transpose_a=*/true);
    DenseMatrix joined = hadamard(picked_subj, picked_rel);
    return dense_spmm(joined, rkb.m_obj);
}

} // namespace kbhop
