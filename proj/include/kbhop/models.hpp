#pragma once
// The four question-answering models. Every model builds its forward pass
// on a Tape and returns pre-softmax answer scores over one entity type;
// training applies softmax cross entropy to the scores and evaluation
// softmaxes them, so the predicted distribution is always valid.
//
// ChainModel     encoder-decoder over walk sentences; a stop probability
//                mixes the per-step locations (stick-breaking weights).
// TemplateQaModel mean-pooled tokens feed three linear relation heads;
//                the answer mixes a direct hop with a hub-mediated
//                two-hop path.
// FixedHopModel  k chained follows, one linear relation head per step.
// KbcModel       query-relation embedding drives N residual chains of T
//                follow steps each.

#include <cstdint>
#include <string>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include "kbhop/datasets.hpp"
#include "kbhop/nn.hpp"
#include "kbhop/tape.hpp"

namespace kbhop {

// One-hot batch rows from example start entities; an empty start name
// gives a zero row (the empty set).
inline DenseMatrix one_hot_rows(const TypedKb& kb, TypeId type,
                                const std::vector<const Example*>& batch) {
    DenseMatrix x(batch.size(), kb.type_size(type));
    for (std::size_t i = 0; i < batch.size(); ++i) {
        if (batch[i]->start.empty()) continue;
        EntityId e = kb.entity(batch[i]->start);
        if (e.type != type) throw TypeMismatch("start entity has the wrong type");
        x(i, static_cast<std::size_t>(e.index)) = 1.0;
    }
    return x;
}

// Uniform target distribution over each example's answer set.
inline DenseMatrix uniform_targets(const TypedKb& kb, TypeId type,
                                   const std::vector<const Example*>& batch) {
    DenseMatrix y(batch.size(), kb.type_size(type));
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const auto& answers = batch[i]->answers;
        if (answers.empty()) throw ConfigError("example has an empty answer set");
        const double w = 1.0 / static_cast<double>(answers.size());
        for (const std::string& a : answers) {
            EntityId e = kb.entity(a);
            if (e.type != type) throw TypeMismatch("answer entity has the wrong type");
            y(i, static_cast<std::size_t>(e.index)) += w;
        }
    }
    return y;
}

// Stick-breaking mixture weights from stop probabilities p^1..p^T; the
// final step is clamped to 1 by default so the weights sum to exactly 1.
inline std::vector<double> stop_mixture_weights(const std::vector<double>& p,
                                                bool clamp_last = true) {
    std::vector<double> w(p.size());
    double survive = 1.0;
    for (std::size_t t = 0; t < p.size(); ++t) {
        const double pt = (clamp_last && t + 1 == p.size()) ? 1.0 : p[t];
        w[t] = survive * pt;
        survive *= 1.0 - pt;
    }
    return w;
}

// ---- chain model (variable-length walks) ----

struct ChainConfig {
    std::size_t emb = 16;
    std::size_t hidden = 64;
    int max_hops = 10; // T
};

class ChainModel {
public:
    ChainModel(const TypedKb& kb, GroupId group, Vocab vocab, ChainConfig cfg, Rng& rng)
        : kb_(&kb), group_(group), vocab_(std::move(vocab)), cfg_(cfg) {
        if (cfg.max_hops < 1) throw ConfigError("chain model needs at least one step");
        const RelationGroup& g = kb.groups()[group];
        answer_type_ = g.obj_type;
        n_cells_ = kb.type_size(g.obj_type);
        n_rel_ = g.relations.size();
        params_.add("tok_emb", vocab_.size(), cfg.emb);
        params_.init_uniform(rng, "tok_emb", 0.1);
        add_lstm_params(params_, "enc", cfg.emb, cfg.hidden);
        init_lstm_params(params_, rng, "enc");
        add_lstm_params(params_, "dec", n_rel_, cfg.hidden);
        init_lstm_params(params_, rng, "dec");
        params_.add("w0", cfg.hidden, n_cells_);
        params_.init_glorot(rng, "w0");
        params_.add("b0", 1, n_cells_);
        params_.add("wp", cfg.hidden, 1);
        params_.init_glorot(rng, "wp");
        // bias the stop gate toward continuing, otherwise the residual
        // attention on hop k starts near 2^-k and deep hops learn nothing
        params_.add("bp", 1, 1);
        params_.at("bp").value[0] = -2.0f;
        params_.add("wr", cfg.hidden, n_rel_);
        params_.init_glorot(rng, "wr");
        params_.add("br", 1, n_rel_);
        eng_ = FollowEngine{FollowStrategy::late, kb_, group_, nullptr, nullptr};
    }

    // swap in a reified or sharded engine; the structures it references
    // must outlive every tape built from this model
    void set_engine(const FollowEngine& eng) { eng_ = eng; }

    NodeId scores(Tape& t, const std::vector<const Example*>& batch) {
        const std::size_t B = batch.size();
        const std::size_t L = batch.front()->tokens.size();
        for (const Example* ex : batch)
            if (ex->tokens.size() != L)
                throw BatchMismatch("chain batches need equal token counts");

        NodeId emb = param(t, params_, "tok_emb");
        LstmNodes enc = lstm_nodes(t, params_, "enc");
        NodeId h = constant(t, DenseMatrix(B, cfg_.hidden));
        NodeId c = constant(t, DenseMatrix(B, cfg_.hidden));
        for (std::size_t l = 0; l < L; ++l) {
            std::vector<std::int32_t> ids(B);
            for (std::size_t i = 0; i < B; ++i) ids[i] = vocab_.at(batch[i]->tokens[l]);
            std::tie(h, c) = lstm_cell(t, embed_rows(t, emb, std::move(ids)), h, c, enc);
        }

        NodeId x0 = softmax_rows(
            t, linear(t, h, param(t, params_, "w0"), param(t, params_, "b0")));

        // decoder starts from the encoder's hidden state with a fresh cell
        LstmNodes dec = lstm_nodes(t, params_, "dec");
        NodeId wp = param(t, params_, "wp"), bp = param(t, params_, "bp");
        NodeId wr = param(t, params_, "wr"), br = param(t, params_, "br");
        NodeId dh = h;
        NodeId dc = constant(t, DenseMatrix(B, cfg_.hidden));
        NodeId r_prev = constant(t, DenseMatrix(B, n_rel_)); // r^0 = 0
        NodeId xt = x0;
        NodeId z = constant(t, DenseMatrix(B, n_cells_));
        NodeId survive = constant(t, DenseMatrix(B, 1, 1.0));
        for (int step = 1; step <= cfg_.max_hops; ++step) {
            const bool last = step == cfg_.max_hops;
            NodeId r_t = linear(t, dh, wr, br);
            NodeId p_t = last ? NodeId(0) : sigmoid(t, linear(t, dh, wp, bp));
            auto next = lstm_cell(t, r_prev, dh, dc, dec);
            xt = follow(t, xt, r_t, eng_);
            // the final stop probability is clamped to 1, handing the
            // remaining stick-breaking mass to the last step
            NodeId w_t = last ? survive : mul(t, survive, p_t);
            z = add(t, z, rowscale(t, xt, w_t));
            if (!last) survive = mul(t, survive, affine_const(t, p_t, -1.0, 1.0));
            dh = next.first;
            dc = next.second;
            r_prev = r_t;
        }
        return z;
    }

    DenseMatrix targets(const std::vector<const Example*>& batch) const {
        return uniform_targets(*kb_, answer_type_, batch);
    }

    ModelParams& params() { return params_; }
    const Vocab& vocab() const { return vocab_; }
    const TypedKb& kb() const { return *kb_; }
    TypeId answer_type() const { return answer_type_; }
    static constexpr bool equal_length_batches = true;

private:
    const TypedKb* kb_;
    GroupId group_;
    Vocab vocab_;
    ChainConfig cfg_;
    ModelParams params_;
    FollowEngine eng_;
    TypeId answer_type_ = 0;
    std::size_t n_cells_ = 0, n_rel_ = 0;
};

// ---- template QA model (direct hop + hub-mediated two-hop) ----

struct TemplateConfig {
    std::size_t emb = 16;
    bool ablate_two_hop = false;
};

class TemplateQaModel {
public:
    TemplateQaModel(const TypedKb& kb, const std::string& ent_type,
                    const std::string& cvt_type, Vocab vocab, TemplateConfig cfg, Rng& rng)
        : kb_(&kb), vocab_(std::move(vocab)), cfg_(cfg) {
        const TypeId ent = kb.type_id(ent_type);
        const TypeId cvt = kb.type_id(cvt_type);
        answer_type_ = ent;
        g_ee_ = g_ec_ = g_ce_ = -1;
        for (std::size_t i = 0; i < kb.groups().size(); ++i) {
            const RelationGroup& g = kb.groups()[i];
            if (g.subj_type == ent && g.obj_type == ent)
                g_ee_ = static_cast<GroupId>(i);
            else if (g.subj_type == ent && g.obj_type == cvt)
                g_ec_ = static_cast<GroupId>(i);
            else if (g.subj_type == cvt && g.obj_type == ent)
                g_ce_ = static_cast<GroupId>(i);
            else
                throw MissingGroupTag("relation group " + g.name + " fits no template slot");
        }
        if (g_ee_ < 0 || g_ec_ < 0 || g_ce_ < 0)
            throw MissingGroupTag("KB lacks one of the ent->ent, ent->cvt, cvt->ent groups");

        params_.add("tok_emb", vocab_.size(), cfg.emb);
        params_.init_uniform(rng, "tok_emb", 0.1);
        add_head(rng, "ee", kb.groups()[g_ee_].relations.size());
        add_head(rng, "ec", kb.groups()[g_ec_].relations.size());
        add_head(rng, "ce", kb.groups()[g_ce_].relations.size());
        eng_ee_ = FollowEngine{FollowStrategy::late, kb_, g_ee_, nullptr, nullptr};
        eng_ec_ = FollowEngine{FollowStrategy::late, kb_, g_ec_, nullptr, nullptr};
        eng_ce_ = FollowEngine{FollowStrategy::late, kb_, g_ce_, nullptr, nullptr};
    }

    NodeId scores(Tape& t, const std::vector<const Example*>& batch) {
        NodeId q = pooled_tokens(t, batch);
        NodeId x = constant(t, one_hot_rows(*kb_, answer_type_, batch));
        NodeId r_ee = head(t, q, "ee");
        NodeId z = follow(t, x, r_ee, eng_ee_);
        if (!cfg_.ablate_two_hop) {
            NodeId r_ec = head(t, q, "ec");
            NodeId r_ce = head(t, q, "ce");
            NodeId hub = follow(t, x, r_ec, eng_ec_);
            z = add(t, z, follow(t, hub, r_ce, eng_ce_));
        }
        return z;
    }

    DenseMatrix targets(const std::vector<const Example*>& batch) const {
        return uniform_targets(*kb_, answer_type_, batch);
    }

    ModelParams& params() { return params_; }
    const Vocab& vocab() const { return vocab_; }
    const TypedKb& kb() const { return *kb_; }
    TypeId answer_type() const { return answer_type_; }
    static constexpr bool equal_length_batches = false;

private:
    void add_head(Rng& rng, const std::string& tag, std::size_t n_rel) {
        params_.add("w_" + tag, cfg_.emb, n_rel);
        params_.init_glorot(rng, "w_" + tag);
        params_.add("b_" + tag, 1, n_rel);
    }

    NodeId head(Tape& t, NodeId q, const std::string& tag) {
        return linear(t, q, param(t, params_, "w_" + tag), param(t, params_, "b_" + tag));
    }

    NodeId pooled_tokens(Tape& t, const std::vector<const Example*>& batch) {
        std::vector<std::vector<std::int32_t>> groups(batch.size());
        for (std::size_t i = 0; i < batch.size(); ++i)
            for (const std::string& w : batch[i]->tokens) groups[i].push_back(vocab_.at(w));
        return embed_mean(t, param(t, params_, "tok_emb"), std::move(groups));
    }

    const TypedKb* kb_;
    Vocab vocab_;
    TemplateConfig cfg_;
    ModelParams params_;
    GroupId g_ee_ = -1, g_ec_ = -1, g_ce_ = -1;
    FollowEngine eng_ee_, eng_ec_, eng_ce_;
    TypeId answer_type_ = 0;
};

// ---- fixed-hop model (k chained follows) ----

struct FixedHopConfig {
    std::size_t emb = 16;
    int hops = 1; // k in {1,2,3}
};

class FixedHopModel {
public:
    FixedHopModel(const TypedKb& kb, GroupId group, Vocab vocab, FixedHopConfig cfg,
                  Rng& rng)
        : kb_(&kb), vocab_(std::move(vocab)), cfg_(cfg) {
        if (cfg.hops < 1 || cfg.hops > 3) throw ConfigError("hop count must be 1, 2, or 3");
        const RelationGroup& g = kb.groups()[group];
        if (g.subj_type != g.obj_type)
            throw ConfigError("fixed-hop chaining needs one entity type");
        answer_type_ = g.obj_type;
        const std::size_t n_rel = g.relations.size();
        params_.add("tok_emb", vocab_.size(), cfg.emb);
        params_.init_uniform(rng, "tok_emb", 0.1);
        for (int s = 1; s <= cfg.hops; ++s) {
            const std::string tag = std::to_string(s);
            params_.add("w_s" + tag, cfg.emb, n_rel);
            params_.init_glorot(rng, "w_s" + tag);
            params_.add("b_s" + tag, 1, n_rel);
        }
        eng_ = FollowEngine{FollowStrategy::late, kb_, group, nullptr, nullptr};
    }

    NodeId scores(Tape& t, const std::vector<const Example*>& batch) {
        std::vector<std::vector<std::int32_t>> groups(batch.size());
        for (std::size_t i = 0; i < batch.size(); ++i)
            for (const std::string& w : batch[i]->tokens) groups[i].push_back(vocab_.at(w));
        NodeId q = embed_mean(t, param(t, params_, "tok_emb"), std::move(groups));
        NodeId x = constant(t, one_hot_rows(*kb_, answer_type_, batch));
        for (int s = 1; s <= cfg_.hops; ++s) {
            const std::string tag = std::to_string(s);
            NodeId r = linear(t, q, param(t, params_, "w_s" + tag),
                              param(t, params_, "b_s" + tag));
            x = follow(t, x, r, eng_);
        }
        return x;
    }

    DenseMatrix targets(const std::vector<const Example*>& batch) const {
        return uniform_targets(*kb_, answer_type_, batch);
    }

    ModelParams& params() { return params_; }
    const Vocab& vocab() const { return vocab_; }
    const TypedKb& kb() const { return *kb_; }
    TypeId answer_type() const { return answer_type_; }
    static constexpr bool equal_length_batches = false;

private:
    const TypedKb* kb_;
    Vocab vocab_;
    FixedHopConfig cfg_;
    ModelParams params_;
    FollowEngine eng_;
    TypeId answer_type_ = 0;
};

// ---- KB-completion model (N residual chains of length T) ----

struct KbcConfig {
    std::size_t emb = 8;
    int chains = 1; // N in {1,2,3}
    int steps = 2;  // T in {1..6}
};

class KbcModel {
public:
    KbcModel(const TypedKb& kb, GroupId group, const std::vector<std::string>& queries,
             KbcConfig cfg, Rng& rng)
        : kb_(&kb), cfg_(cfg) {
        if (cfg.chains < 1 || cfg.chains > 3) throw ConfigError("chain count must be 1..3");
        if (cfg.steps < 1 || cfg.steps > 6) throw ConfigError("step count must be 1..6");
        if (queries.empty()) throw ConfigError("kbc model needs at least one query relation");
        const RelationGroup& g = kb.groups()[group];
        if (g.subj_type != g.obj_type)
            throw ConfigError("kbc chaining needs one entity type");
        answer_type_ = g.obj_type;
        const std::size_t n_rel = g.relations.size();
        for (std::size_t i = 0; i < queries.size(); ++i)
            query_id_.emplace(queries[i], static_cast<std::int32_t>(i));
        params_.add("q_emb", queries.size(), cfg.emb);
        params_.init_uniform(rng, "q_emb", 0.1);
        for (int i = 0; i < cfg.chains; ++i)
            for (int s = 1; s <= cfg.steps; ++s) {
                const std::string tag = head_tag(i, s);
                params_.add("w_" + tag, cfg.emb, n_rel);
                params_.init_glorot(rng, "w_" + tag);
                params_.add("b_" + tag, 1, n_rel);
            }
        eng_ = FollowEngine{FollowStrategy::late, kb_, group, nullptr, nullptr};
    }

    NodeId scores(Tape& t, const std::vector<const Example*>& batch) {
        std::vector<std::int32_t> qids(batch.size());
        for (std::size_t i = 0; i < batch.size(); ++i) {
            if (batch[i]->tokens.size() != 1)
                throw UnknownQueryRelation("kbc queries are single relation names");
            auto it = query_id_.find(batch[i]->tokens.front());
            if (it == query_id_.end())
                throw UnknownQueryRelation("unknown query relation: " +
                                           batch[i]->tokens.front());
            qids[i] = it->second;
        }
        NodeId qe = embed_rows(t, param(t, params_, "q_emb"), std::move(qids));
        NodeId x0 = constant(t, one_hot_rows(*kb_, answer_type_, batch));
        NodeId z = 0;
        for (int i = 0; i < cfg_.chains; ++i) {
            NodeId xi = x0;
            for (int s = 1; s <= cfg_.steps; ++s) {
                const std::string tag = head_tag(i, s);
                NodeId r = linear(t, qe, param(t, params_, "w_" + tag),
                                  param(t, params_, "b_" + tag));
                xi = add(t, follow(t, xi, r, eng_), xi); // residual step
            }
            z = (i == 0) ? xi : add(t, z, xi);
        }
        return z;
    }

    DenseMatrix targets(const std::vector<const Example*>& batch) const {
        return uniform_targets(*kb_, answer_type_, batch);
    }

    ModelParams& params() { return params_; }
    const TypedKb& kb() const { return *kb_; }
    TypeId answer_type() const { return answer_type_; }
    static constexpr bool equal_length_batches = false;

private:
    static std::string head_tag(int chain, int step) {
        return "c" + std::to_string(chain) + "_s" + std::to_string(step);
    }

    const TypedKb* kb_;
    KbcConfig cfg_;
    ModelParams params_;
    std::unordered_map<std::string, std::int32_t> query_id_;
    FollowEngine eng_;
    TypeId answer_type_ = 0;
};

} // namespace kbhop
