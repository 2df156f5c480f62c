#pragma once
// Reverse-mode autodiff over DenseMatrix values. A Tape is an append-only
// list of nodes; each op records a closure that pushes adjoints to its
// inputs. backward() seeds the loss with 1 and replays closures in reverse,
// so adjoints from multiple consumers accumulate additively. Values and
// gradients are double precision throughout.
//
// The follow operator differentiates analytically. For the reified form
// Y = (X A^T (.) R B^T) C with A=m_subj, B=m_rel, C=m_obj:
//   dX = ((dY C^T) (.) (R B^T)) A,   dR = ((dY C^T) (.) (X A^T)) B
// and for late mixing:
//   dX = sum_k R[:,k] (.) (dY M_k^T),   dR[:,k] = rowsum(dY (.) (X M_k)).
// The naive strategy is single-example only and has no batch backward.

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "kbhop/errors.hpp"
#include "kbhop/follow.hpp"
#include "kbhop/shard.hpp"

namespace kbhop {

using NodeId = std::size_t;

class Tape {
public:
    Tape() = default;
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    NodeId push(DenseMatrix value) {
        nodes_.push_back({std::move(value), DenseMatrix(), {}});
        return nodes_.size() - 1;
    }

    void set_back(NodeId id, std::function<void()> back) {
        nodes_[id].back = std::move(back);
    }

    const DenseMatrix& value(NodeId id) const { return nodes_[id].value; }

    // Accumulated adjoint; zeros if the node never received one.
    const DenseMatrix& grad(NodeId id) {
        Node& n = nodes_[id];
        if (n.grad.empty()) n.grad = DenseMatrix(n.value.rows(), n.value.cols());
        return n.grad;
    }

    bool has_grad(NodeId id) const { return !nodes_[id].grad.empty(); }

    void accum(NodeId id, const DenseMatrix& g) {
        Node& n = nodes_[id];
        if (!g.same_shape(n.value)) throw ShapeMismatch("adjoint shape differs from value");
        if (n.grad.empty())
            n.grad = g;
        else
            add_inplace(n.grad, g);
    }

    void backward(NodeId loss) {
        const DenseMatrix& lv = value(loss);
        if (lv.rows() != 1 || lv.cols() != 1)
            throw NonScalarLoss("backward needs a 1x1 loss node");
        accum(loss, DenseMatrix(1, 1, 1.0));
        for (std::size_t i = loss + 1; i-- > 0;) {
            Node& n = nodes_[i];
            if (!n.grad.empty() && n.back) n.back();
        }
    }

    std::size_t size() const { return nodes_.size(); }

private:
    struct Node {
        DenseMatrix value;
        DenseMatrix grad;
        std::function<void()> back;
    };
    std::vector<Node> nodes_;
};

inline NodeId constant(Tape& t, DenseMatrix v) { return t.push(std::move(v)); }

// Leaf whose accumulated adjoint is handed to `sink` during backward; the
// bridge used for parameters stored outside the tape.
inline NodeId leaf(Tape& t, DenseMatrix v,
                   std::function<void(const DenseMatrix&)> sink) {
    NodeId id = t.push(std::move(v));
    t.set_back(id, [&t, id, sink = std::move(sink)] { sink(t.grad(id)); });
    return id;
}

inline NodeId add(Tape& t, NodeId a, NodeId b) {
    if (!t.value(a).same_shape(t.value(b))) throw ShapeMismatch("add: shapes differ");
    NodeId out = t.push(add(t.value(a), t.value(b)));
    t.set_back(out, [&t, a, b, out] {
        t.accum(a, t.grad(out));
        t.accum(b, t.grad(out));
    });
    return out;
}

// out = a + v broadcast over rows; v is 1 x cols.
inline NodeId add_rowvec(Tape& t, NodeId a, NodeId v) {
    const DenseMatrix& va = t.value(a);
    const DenseMatrix& vv = t.value(v);
    if (vv.rows() != 1 || vv.cols() != va.cols())
        throw ShapeMismatch("add_rowvec: bias must be 1 x cols");
    DenseMatrix o(va.rows(), va.cols());
    for (std::size_t i = 0; i < va.rows(); ++i)
        for (std::size_t j = 0; j < va.cols(); ++j) o(i, j) = va(i, j) + vv(0, j);
    NodeId out = t.push(std::move(o));
    t.set_back(out, [&t, a, v, out] {
        const DenseMatrix& g = t.grad(out);
        t.accum(a, g);
        DenseMatrix dv(1, g.cols());
        for (std::size_t i = 0; i < g.rows(); ++i)
            for (std::size_t j = 0; j < g.cols(); ++j) dv(0, j) += g(i, j);
        t.accum(v, dv);
    });
    return out;
}

inline NodeId mul(Tape& t, NodeId a, NodeId b) {
    NodeId out = t.push(hadamard(t.value(a), t.value(b)));
    t.set_back(out, [&t, a, b, out] {
        t.accum(a, hadamard(t.grad(out), t.value(b)));
        t.accum(b, hadamard(t.grad(out), t.value(a)));
    });
    return out;
}

inline NodeId matmul(Tape& t, NodeId a, NodeId b) {
    if (t.value(a).cols() != t.value(b).rows())
        throw ShapeMismatch("matmul: inner dims differ");
    NodeId out = t.push(matmul(t.value(a), t.value(b)));
    t.set_back(out, [&t, a, b, out] {
        t.accum(a, matmul_tb(t.grad(out), t.value(b)));
        t.accum(b, matmul_ta(t.value(a), t.grad(out)));
    });
    return out;
}

// out(i,j) = a(i,j) * c(i,0); c is rows x 1.
inline NodeId rowscale(Tape& t, NodeId a, NodeId c) {
    const DenseMatrix& va = t.value(a);
    const DenseMatrix& vc = t.value(c);
    if (vc.rows() != va.rows() || vc.cols() != 1)
        throw ShapeMismatch("rowscale: coefficients must be rows x 1");
    DenseMatrix o(va.rows(), va.cols());
    for (std::size_t i = 0; i < va.rows(); ++i)
        for (std::size_t j = 0; j < va.cols(); ++j) o(i, j) = va(i, j) * vc(i, 0);
    NodeId out = t.push(std::move(o));
    t.set_back(out, [&t, a, c, out] {
        const DenseMatrix& g = t.grad(out);
        const DenseMatrix& va2 = t.value(a);
        const DenseMatrix& vc2 = t.value(c);
        DenseMatrix da(va2.rows(), va2.cols());
        DenseMatrix dc(va2.rows(), 1);
        for (std::size_t i = 0; i < va2.rows(); ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < va2.cols(); ++j) {
                da(i, j) = g(i, j) * vc2(i, 0);
                s += g(i, j) * va2(i, j);
            }
            dc(i, 0) = s;
        }
        t.accum(a, da);
        t.accum(c, dc);
    });
    return out;
}

// out = alpha * a + beta, elementwise constants.
inline NodeId affine_const(Tape& t, NodeId a, double alpha, double beta) {
    const DenseMatrix& va = t.value(a);
    DenseMatrix o(va.rows(), va.cols());
    for (std::size_t i = 0; i < va.size(); ++i) o.data()[i] = alpha * va.data()[i] + beta;
    NodeId out = t.push(std::move(o));
    t.set_back(out, [&t, a, out, alpha] { t.accum(a, scale(t.grad(out), alpha)); });
    return out;
}

inline NodeId sigmoid(Tape& t, NodeId a) {
    const DenseMatrix& va = t.value(a);
    DenseMatrix o(va.rows(), va.cols());
    for (std::size_t i = 0; i < va.size(); ++i) {
        double x = va.data()[i];
        o.data()[i] = x >= 0 ? 1.0 / (1.0 + std::exp(-x))
                             : std::exp(x) / (1.0 + std::exp(x));
    }
    NodeId out = t.push(std::move(o));
    t.set_back(out, [&t, a, out] {
        const DenseMatrix& y = t.value(out);
        const DenseMatrix& g = t.grad(out);
        DenseMatrix da(y.rows(), y.cols());
        for (std::size_t i = 0; i < y.size(); ++i)
            da.data()[i] = g.data()[i] * y.data()[i] * (1.0 - y.data()[i]);
        t.accum(a, da);
    });
    return out;
}

inline NodeId tanh(Tape& t, NodeId a) {
    const DenseMatrix& va = t.value(a);
    DenseMatrix o(va.rows(), va.cols());
    for (std::size_t i = 0; i < va.size(); ++i) o.data()[i] = std::tanh(va.data()[i]);
    NodeId out = t.push(std::move(o));
    t.set_back(out, [&t, a, out] {
        const DenseMatrix& y = t.value(out);
        const DenseMatrix& g = t.grad(out);
        DenseMatrix da(y.rows(), y.cols());
        for (std::size_t i = 0; i < y.size(); ++i)
            da.data()[i] = g.data()[i] * (1.0 - y.data()[i] * y.data()[i]);
        t.accum(a, da);
    });
    return out;
}

inline NodeId softmax_rows(Tape& t, NodeId a) {
    const DenseMatrix& va = t.value(a);
    DenseMatrix o(va.rows(), va.cols());
    for (std::size_t i = 0; i < va.rows(); ++i) {
        double mx = va(i, 0);
        for (std::size_t j = 1; j < va.cols(); ++j) mx = std::max(mx, va(i, j));
        double z = 0.0;
        for (std::size_t j = 0; j < va.cols(); ++j) z += std::exp(va(i, j) - mx);
        for (std::size_t j = 0; j < va.cols(); ++j) o(i, j) = std::exp(va(i, j) - mx) / z;
    }
    NodeId out = t.push(std::move(o));
    t.set_back(out, [&t, a, out] {
        const DenseMatrix& y = t.value(out);
        const DenseMatrix& g = t.grad(out);
        DenseMatrix da(y.rows(), y.cols());
        for (std::size_t i = 0; i < y.rows(); ++i) {
            double dot = 0.0;
            for (std::size_t j = 0; j < y.cols(); ++j) dot += g(i, j) * y(i, j);
            for (std::size_t j = 0; j < y.cols(); ++j)
                da(i, j) = y(i, j) * (g(i, j) - dot);
        }
        t.accum(a, da);
    });
    return out;
}

// Mean cross entropy of softmax(logits) against fixed target distributions:
// loss = -(1/b) sum_i sum_j target(i,j) log softmax(logits)(i,j).
// Fused with log-sum-exp stabilization; returns a 1x1 node.
inline NodeId softmax_xent(Tape& t, NodeId logits, const DenseMatrix& target) {
    const DenseMatrix& z = t.value(logits);
    if (!z.same_shape(target)) throw ShapeMismatch("softmax_xent: target shape differs");
    const std::size_t b = z.rows();
    DenseMatrix probs(z.rows(), z.cols());
    double loss = 0.0;
    for (std::size_t i = 0; i < b; ++i) {
        double mx = z(i, 0);
        for (std::size_t j = 1; j < z.cols(); ++j) mx = std::max(mx, z(i, j));
        double sum = 0.0;
        for (std::size_t j = 0; j < z.cols(); ++j) sum += std::exp(z(i, j) - mx);
        double lse = mx + std::log(sum);
        for (std::size_t j = 0; j < z.cols(); ++j) {
            probs(i, j) = std::exp(z(i, j) - lse);
            if (target(i, j) != 0.0) loss -= target(i, j) * (z(i, j) - lse);
        }
    }
    loss /= static_cast<double>(b);
    NodeId out = t.push(DenseMatrix(1, 1, loss));
    t.set_back(out, [&t, logits, out, probs = std::move(probs), target] {
        double g = t.grad(out)(0, 0) / static_cast<double>(probs.rows());
        DenseMatrix dz(probs.rows(), probs.cols());
        for (std::size_t i = 0; i < probs.rows(); ++i) {
            double tmass = 0.0;
            for (std::size_t j = 0; j < probs.cols(); ++j) tmass += target(i, j);
            for (std::size_t j = 0; j < probs.cols(); ++j)
                dz(i, j) = g * (tmass * probs(i, j) - target(i, j));
        }
        t.accum(logits, dz);
    });
    return out;
}

// Rows of an embedding table selected by token id.
inline NodeId embed_rows(Tape& t, NodeId table, std::vector<std::int32_t> ids) {
    const DenseMatrix& tab = t.value(table);
    DenseMatrix o(ids.size(), tab.cols());
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (ids[i] < 0 || static_cast<std::size_t>(ids[i]) >= tab.rows())
            throw ShapeMismatch("embed_rows: token id out of range");
        for (std::size_t j = 0; j < tab.cols(); ++j) o(i, j) = tab(ids[i], j);
    }
    NodeId out = t.push(std::move(o));
    t.set_back(out, [&t, table, out, ids = std::move(ids)] {
        const DenseMatrix& g = t.grad(out);
        const DenseMatrix& tab2 = t.value(table);
        DenseMatrix dt(tab2.rows(), tab2.cols());
        for (std::size_t i = 0; i < ids.size(); ++i)
            for (std::size_t j = 0; j < g.cols(); ++j) dt(ids[i], j) += g(i, j);
        t.accum(table, dt);
    });
    return out;
}

// Row i of the output is the mean of the table rows listed in groups[i].
inline NodeId embed_mean(Tape& t, NodeId table,
                         std::vector<std::vector<std::int32_t>> groups) {
    const DenseMatrix& tab = t.value(table);
    DenseMatrix o(groups.size(), tab.cols());
    for (std::size_t i = 0; i < groups.size(); ++i) {
        if (groups[i].empty()) throw ShapeMismatch("embed_mean: empty token group");
        for (std::int32_t id : groups[i]) {
            if (id < 0 || static_cast<std::size_t>(id) >= tab.rows())
                throw ShapeMismatch("embed_mean: token id out of range");
            for (std::size_t j = 0; j < tab.cols(); ++j) o(i, j) += tab(id, j);
        }
        for (std::size_t j = 0; j < tab.cols(); ++j)
            o(i, j) /= static_cast<double>(groups[i].size());
    }
    NodeId out = t.push(std::move(o));
    t.set_back(out, [&t, table, out, groups = std::move(groups)] {
        const DenseMatrix& g = t.grad(out);
        const DenseMatrix& tab2 = t.value(table);
        DenseMatrix dt(tab2.rows(), tab2.cols());
        for (std::size_t i = 0; i < groups.size(); ++i) {
            double inv = 1.0 / static_cast<double>(groups[i].size());
            for (std::int32_t id : groups[i])
                for (std::size_t j = 0; j < g.cols(); ++j) dt(id, j) += inv * g(i, j);
        }
        t.accum(table, dt);
    });
    return out;
}

// Column j of a lands in column dst[j] of a width-wide output.
inline NodeId scatter_cols(Tape& t, NodeId a, std::vector<std::size_t> dst,
                           std::size_t width) {
    const DenseMatrix& va = t.value(a);
    if (dst.size() != va.cols()) throw ShapeMismatch("scatter_cols: one target per column");
    for (std::size_t d : dst)
        if (d >= width) throw ShapeMismatch("scatter_cols: target column out of range");
    DenseMatrix o(va.rows(), width);
    for (std::size_t i = 0; i < va.rows(); ++i)
        for (std::size_t j = 0; j < va.cols(); ++j) o(i, dst[j]) += va(i, j);
    NodeId out = t.push(std::move(o));
    t.set_back(out, [&t, a, out, dst = std::move(dst)] {
        const DenseMatrix& g = t.grad(out);
        const DenseMatrix& va2 = t.value(a);
        DenseMatrix da(va2.rows(), va2.cols());
        for (std::size_t i = 0; i < va2.rows(); ++i)
            for (std::size_t j = 0; j < va2.cols(); ++j) da(i, j) = g(i, dst[j]);
        t.accum(a, da);
    });
    return out;
}

inline NodeId sum_all(Tape& t, NodeId a) {
    const DenseMatrix& va = t.value(a);
    double s = 0.0;
    for (std::size_t i = 0; i < va.size(); ++i) s += va.data()[i];
    NodeId out = t.push(DenseMatrix(1, 1, s));
    t.set_back(out, [&t, a, out] {
        const DenseMatrix& va2 = t.value(a);
        t.accum(a, DenseMatrix(va2.rows(), va2.cols(), t.grad(out)(0, 0)));
    });
    return out;
}

// ---- analytic follow gradients ----

struct FollowGrads {
    DenseMatrix dx;
    DenseMatrix dr;
};

// Reified strategy: Y = (X A^T (.) R B^T) C.
inline FollowGrads follow_backward(const ReifiedKb& rkb, const DenseMatrix& x,
                                   const DenseMatrix& r, const DenseMatrix& dy) {
    if (x.rows() != r.rows() || x.rows() != dy.rows())
        throw ShapeMismatch("follow_backward: batch sizes differ");
    if (x.cols() != rkb.num_entities() || dy.cols() != rkb.num_entities() ||
        r.cols() != rkb.num_relations())
        throw ShapeMismatch("follow_backward: widths differ from the reified KB");
    DenseMatrix gc = dense_spmm(dy, rkb.m_obj, true);  // dY C^T
    DenseMatrix rb = dense_spmm(r, rkb.m_rel, true);   // R B^T
    DenseMatrix xa = dense_spmm(x, rkb.m_subj, true);  // X A^T
    FollowGrads out;
    out.dx = dense_spmm(hadamard(gc, rb), rkb.m_subj);
    out.dr = dense_spmm(hadamard(gc, xa), rkb.m_rel);
    return out;
}

// Late-mixing strategy over one relation group.
inline FollowGrads follow_backward(const TypedKb& kb, GroupId group, const DenseMatrix& x,
                                   const DenseMatrix& r, const DenseMatrix& dy) {
    const RelationGroup& g = kb.groups()[group];
    if (x.rows() != r.rows() || x.rows() != dy.rows())
        throw ShapeMismatch("follow_backward: batch sizes differ");
    if (x.cols() != kb.type_size(g.subj_type) || r.cols() != g.relations.size() ||
        dy.cols() != kb.type_size(g.obj_type))
        throw ShapeMismatch("follow_backward: widths differ from the relation group");
    FollowGrads out;
    out.dx = DenseMatrix(x.rows(), x.cols());
    out.dr = DenseMatrix(r.rows(), r.cols());
    for (std::size_t k = 0; k < g.relations.size(); ++k) {
        CooMatrix mk = relation_matrix(kb, g.relations[k]);
        DenseMatrix dyk = dense_spmm(dy, mk, true); // dY M_k^T
        DenseMatrix xmk = dense_spmm(x, mk);        // X M_k
        for (std::size_t i = 0; i < x.rows(); ++i) {
            const double rik = r(i, k);
            if (rik != 0.0) {
                const double* src = dyk.row(i);
                double* dst = out.dx.row(i);
                for (std::size_t j = 0; j < x.cols(); ++j) dst[j] += rik * src[j];
            }
            double s = 0.0;
            const double* gd = dy.row(i);
            const double* xm = xmk.row(i);
            for (std::size_t j = 0; j < dy.cols(); ++j) s += gd[j] * xm[j];
            out.dr(i, k) = s;
        }
    }
    return out;
}

// ---- follow as a tape node ----

enum class FollowStrategy { naive, late, reified };

// Bundles one strategy with the structures it needs. The referenced KB
// objects must outlive every tape that uses the engine. The naive strategy
// exists for forward-only use; its backward throws StrategyUnavailable.
struct FollowEngine {
    FollowStrategy strategy = FollowStrategy::reified;
    const TypedKb* kb = nullptr;           // naive, late
    GroupId group = 0;                     // naive, late
    const ReifiedKb* rkb = nullptr;        // reified
    const ShardedReifiedKb* skb = nullptr; // optional sharded reified forward

    DenseMatrix forward(const DenseMatrix& x, const DenseMatrix& r) const {
        switch (strategy) {
        case FollowStrategy::naive: {
            const RelationGroup& g = kb->groups()[group];
            DenseMatrix out(x.rows(), kb->type_size(g.obj_type));
            for (std::size_t i = 0; i < x.rows(); ++i) {
                EntitySetVec xv{g.subj_type,
                                std::vector<double>(x.row(i), x.row(i) + x.cols())};
                RelSetVec rv{group, std::vector<double>(r.row(i), r.row(i) + r.cols())};
                EntitySetVec y = follow_naive(*kb, xv, rv);
                for (std::size_t j = 0; j < y.values.size(); ++j) out(i, j) = y.values[j];
            }
            return out;
        }
        case FollowStrategy::late:
            return follow_late(*kb, group, x, r);
        case FollowStrategy::reified:
        default:
            if (skb) return follow_sharded(*skb, x, r);
            return follow_reified(*rkb, x, r);
        }
    }

    FollowGrads backward(const DenseMatrix& x, const DenseMatrix& r,
                         const DenseMatrix& dy) const {
        switch (strategy) {
        case FollowStrategy::naive:
            throw StrategyUnavailable("naive follow has no batch backward");
        case FollowStrategy::late:
            return follow_backward(*kb, group, x, r, dy);
        case FollowStrategy::reified:
        default:
            return follow_backward(*rkb, x, r, dy);
        }
    }
};

inline NodeId follow(Tape& t, NodeId x, NodeId r, const FollowEngine& eng) {
    if (eng.strategy == FollowStrategy::naive)
        throw StrategyUnavailable("naive follow cannot join a tape; it has no batch backward");
    if (eng.strategy == FollowStrategy::reified && !eng.rkb)
        throw ConfigError("follow engine needs the reified KB for its backward pass");
    if (eng.strategy == FollowStrategy::late && !eng.kb)
        throw ConfigError("follow engine needs the typed KB for late mixing");
    NodeId out = t.push(eng.forward(t.value(x), t.value(r)));
    t.set_back(out, [&t, x, r, out, &eng] {
        FollowGrads fg = eng.backward(t.value(x), t.value(r), t.grad(out));
        t.accum(x, fg.dx);
        t.accum(r, fg.dr);
    });
    return out;
}

} // namespace kbhop
