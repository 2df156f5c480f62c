#pragma once
// Minibatch training loop and ranking evaluation shared by every model.
// A model exposes scores(tape, batch), targets(batch), params(), kb(),
// answer_type(), and an equal_length_batches flag; everything else
// (shuffling, batching, Adam, metrics) lives here.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <string>
#include <vector>

#include <json.hpp>

#include "kbhop/models.hpp"

namespace kbhop {

struct TrainConfig {
    int epochs = 10;
    std::size_t batch = 10;
    double lr = 1e-3;
    double lr_decay = 1.0; // per-epoch multiplier
    std::uint64_t seed = 0;
    std::string metrics_path; // per-epoch JSONL when non-empty
};

struct EpochMetrics {
    int epoch = 0;
    double loss = 0.0;
    double hits1 = 0.0;
    double hits10 = 0.0;
};

struct EvalResult {
    double hits1 = 0.0;
    double hits10 = 0.0;
};

namespace detail {

// Split an index order into batches. When equal_lengths is set, indices
// are first stably sorted by token count so no batch mixes lengths.
inline std::vector<std::vector<std::size_t>> chunk_indices(
    const std::vector<const Example*>& ex, std::vector<std::size_t> order,
    std::size_t batch, bool equal_lengths) {
    if (batch == 0) throw ConfigError("batch size must be positive");
    if (equal_lengths)
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return ex[a]->tokens.size() < ex[b]->tokens.size();
        });
    std::vector<std::vector<std::size_t>> chunks;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i + 1;
        while (j < order.size() && j - i < batch &&
               (!equal_lengths ||
                ex[order[j]]->tokens.size() == ex[order[i]]->tokens.size()))
            ++j;
        chunks.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(i),
                            order.begin() + static_cast<std::ptrdiff_t>(j));
        i = j;
    }
    return chunks;
}

inline std::vector<const Example*> pointers(const std::vector<Example>& examples) {
    std::vector<const Example*> ptrs;
    ptrs.reserve(examples.size());
    for (const Example& e : examples) ptrs.push_back(&e);
    return ptrs;
}

// Top-k column indices of one score row, ties toward the smaller index.
inline std::vector<std::size_t> topk_row(const DenseMatrix& s, std::size_t row,
                                         std::size_t k) {
    std::vector<std::size_t> idx(s.cols());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    k = std::min(k, idx.size());
    std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(),
                      [&](std::size_t a, std::size_t b) {
                          if (s(row, a) != s(row, b)) return s(row, a) > s(row, b);
                          return a < b;
                      });
    idx.resize(k);
    return idx;
}

} // namespace detail

// Forward-only Hits@1 and Hits@10 over a test set; a hit means any gold
// answer appears in the top-k scores.
template <class Model>
EvalResult evaluate(Model& model, const std::vector<Example>& test,
                    std::size_t batch = 64) {
    if (test.empty()) throw ConfigError("evaluation needs a non-empty test set");
    const std::vector<const Example*> ptrs = detail::pointers(test);
    std::vector<std::size_t> order(test.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    const auto chunks =
        detail::chunk_indices(ptrs, std::move(order), batch, Model::equal_length_batches);

    const TypedKb& kb = model.kb();
    const TypeId at = model.answer_type();
    std::size_t hit1 = 0, hit10 = 0;
    for (const auto& chunk : chunks) {
        std::vector<const Example*> bp;
        bp.reserve(chunk.size());
        for (std::size_t i : chunk) bp.push_back(ptrs[i]);
        Tape t;
        const DenseMatrix& s = t.value(model.scores(t, bp));
        for (std::size_t row = 0; row < bp.size(); ++row) {
            std::vector<bool> gold(s.cols(), false);
            for (const std::string& a : bp[row]->answers) {
                EntityId e = kb.entity(a);
                if (e.type != at) throw TypeMismatch("answer entity has the wrong type");
                gold[static_cast<std::size_t>(e.index)] = true;
            }
            const auto top = detail::topk_row(s, row, 10);
            for (std::size_t r = 0; r < top.size(); ++r)
                if (gold[top[r]]) {
                    if (r == 0) ++hit1;
                    ++hit10;
                    break;
                }
        }
    }
    const double n = static_cast<double>(test.size());
    return {static_cast<double>(hit1) / n, static_cast<double>(hit10) / n};
}

// Epochs of shuffled minibatch Adam with a per-epoch evaluation pass.
// Returns the metric history and appends it as JSON lines when a metrics
// path is configured.
template <class Model>
std::vector<EpochMetrics> train_model(Model& model, const std::vector<Example>& train,
                                      const std::vector<Example>& test,
                                      const TrainConfig& cfg) {
    if (cfg.epochs < 1) throw ConfigError("epoch count must be positive");
    if (cfg.lr <= 0.0) throw ConfigError("learning rate must be positive");
    if (cfg.lr_decay <= 0.0 || cfg.lr_decay > 1.0)
        throw ConfigError("lr decay must be in (0, 1]");
    if (train.empty()) throw ConfigError("training needs a non-empty train set");

    std::ofstream metrics;
    if (!cfg.metrics_path.empty()) {
        metrics.open(cfg.metrics_path);
        if (!metrics) throw IoError("cannot open metrics file: " + cfg.metrics_path);
    }

    Rng rng(cfg.seed);
    const std::vector<const Example*> ptrs = detail::pointers(train);
    std::vector<EpochMetrics> history;
    history.reserve(static_cast<std::size_t>(cfg.epochs));

    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        std::vector<std::size_t> order(ptrs.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        rng.shuffle(order);
        auto chunks = detail::chunk_indices(ptrs, std::move(order), cfg.batch,
                                            Model::equal_length_batches);
        // length bucketing leaves batches sorted short to long; mix the
        // batch order so no epoch ends on only the longest questions
        rng.shuffle(chunks);
        const double lr = cfg.lr * std::pow(cfg.lr_decay, epoch - 1);
        double loss_sum = 0.0;
        for (const auto& chunk : chunks) {
            std::vector<const Example*> bp;
            bp.reserve(chunk.size());
            for (std::size_t i : chunk) bp.push_back(ptrs[i]);
            Tape t;
            NodeId loss = softmax_xent(t, model.scores(t, bp), model.targets(bp));
            model.params().zero_grad();
            t.backward(loss);
            adam_step(model.params(), lr);
            loss_sum += t.value(loss)(0, 0) * static_cast<double>(bp.size());
        }

        EpochMetrics m;
        m.epoch = epoch;
        m.loss = loss_sum / static_cast<double>(ptrs.size());
        const EvalResult ev = evaluate(model, test);
        m.hits1 = ev.hits1;
        m.hits10 = ev.hits10;
        history.push_back(m);

        if (metrics.is_open()) {
            nlohmann::json line = {{"epoch", m.epoch},
                                   {"loss", m.loss},
                                   {"hits1", m.hits1},
                                   {"hits10", m.hits10}};
            metrics << line.dump() << "\n";
            metrics.flush();
        }
    }
    return history;
}

} // namespace kbhop
