#pragma once
// Model parameters and the layers built from tape primitives. Parameters are
// stored as 32-bit floats (matching the checkpoint format) with Adam state;
// tape compute happens in double, and gradients are rounded back to float
// when they land in the buffers.

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "kbhop/errors.hpp"
#include "kbhop/rng.hpp"
#include "kbhop/tape.hpp"

namespace kbhop {

struct Param {
    std::string name;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<float> value;
    std::vector<float> grad;
    std::vector<float> m; // Adam first moment
    std::vector<float> v; // Adam second moment
};

class ModelParams {
public:
    std::size_t add(const std::string& name, std::size_t rows, std::size_t cols) {
        if (by_name_.count(name)) throw DuplicateTriple("parameter declared twice: " + name);
        std::size_t idx = params_.size();
        by_name_[name] = idx;
        Param p;
        p.name = name;
        p.rows = rows;
        p.cols = cols;
        p.value.assign(rows * cols, 0.0f);
        p.grad.assign(rows * cols, 0.0f);
        p.m.assign(rows * cols, 0.0f);
        p.v.assign(rows * cols, 0.0f);
        params_.push_back(std::move(p));
        return idx;
    }

    Param& at(const std::string& name) {
        auto it = by_name_.find(name);
        if (it == by_name_.end()) throw UnknownName("unknown parameter: " + name);
        return params_[it->second];
    }

    const Param& at(const std::string& name) const {
        auto it = by_name_.find(name);
        if (it == by_name_.end()) throw UnknownName("unknown parameter: " + name);
        return params_[it->second];
    }

    bool has(const std::string& name) const { return by_name_.count(name) != 0; }

    std::vector<Param>& all() { return params_; }
    const std::vector<Param>& all() const { return params_; }

    std::size_t scalar_count() const {
        std::size_t n = 0;
        for (const Param& p : params_) n += p.value.size();
        return n;
    }

    void zero_grad() {
        for (Param& p : params_)
            std::fill(p.grad.begin(), p.grad.end(), 0.0f);
    }

    void init_uniform(Rng& rng, const std::string& name, double bound) {
        Param& p = at(name);
        for (float& v : p.value) v = static_cast<float>(rng.uniform(-bound, bound));
    }

    // scaled bound sqrt(6 / (fan_in + fan_out)) for projection matrices
    void init_glorot(Rng& rng, const std::string& name) {
        Param& p = at(name);
        double bound = std::sqrt(6.0 / static_cast<double>(p.rows + p.cols));
        for (float& v : p.value) v = static_cast<float>(rng.uniform(-bound, bound));
    }

    std::int64_t& adam_steps() { return adam_t_; }

private:
    std::vector<Param> params_;
    std::unordered_map<std::string, std::size_t> by_name_;
    std::int64_t adam_t_ = 0;
};

// Parameter as a tape leaf: value widened to double on the way in, adjoint
// rounded to float and accumulated into the gradient buffer on the way out.
// The ModelParams object must outlive the tape.
inline NodeId param(Tape& t, ModelParams& p, const std::string& name) {
    Param& pp = p.at(name);
    DenseMatrix v(pp.rows, pp.cols);
    for (std::size_t i = 0; i < pp.value.size(); ++i)
        v.data()[i] = static_cast<double>(pp.value[i]);
    return leaf(t, std::move(v), [&pp](const DenseMatrix& g) {
        for (std::size_t i = 0; i < pp.grad.size(); ++i)
            pp.grad[i] += static_cast<float>(g.data()[i]);
    });
}

inline NodeId linear(Tape& t, NodeId x, NodeId w, NodeId b) {
    return add_rowvec(t, matmul(t, x, w), b);
}

struct LstmNodes {
    NodeId wxi, whi, bi;
    NodeId wxf, whf, bf;
    NodeId wxo, who, bo;
    NodeId wxg, whg, bg;
};

inline void add_lstm_params(ModelParams& p, const std::string& prefix, std::size_t in_dim,
                            std::size_t hidden) {
    for (const char* gate : {"i", "f", "o", "g"}) {
        p.add(prefix + "_wx" + gate, in_dim, hidden);
        p.add(prefix + "_wh" + gate, hidden, hidden);
        p.add(prefix + "_b" + gate, 1, hidden);
    }
}

inline void init_lstm_params(ModelParams& p, Rng& rng, const std::string& prefix,
                             double bound = 0.1) {
    for (const char* gate : {"i", "f", "o", "g"}) {
        p.init_uniform(rng, prefix + "_wx" + gate, bound);
        p.init_uniform(rng, prefix + "_wh" + gate, bound);
    }
}

inline LstmNodes lstm_nodes(Tape& t, ModelParams& p, const std::string& prefix) {
    return {param(t, p, prefix + "_wxi"), param(t, p, prefix + "_whi"),
            param(t, p, prefix + "_bi"),  param(t, p, prefix + "_wxf"),
            param(t, p, prefix + "_whf"), param(t, p, prefix + "_bf"),
            param(t, p, prefix + "_wxo"), param(t, p, prefix + "_who"),
            param(t, p, prefix + "_bo"),  param(t, p, prefix + "_wxg"),
            param(t, p, prefix + "_whg"), param(t, p, prefix + "_bg")};
}

// One LSTM step; returns (h', c').
inline std::pair<NodeId, NodeId> lstm_cell(Tape& t, NodeId x, NodeId h, NodeId c,
                                           const LstmNodes& n) {
    NodeId i = sigmoid(t, add_rowvec(t, add(t, matmul(t, x, n.wxi), matmul(t, h, n.whi)), n.bi));
    NodeId f = sigmoid(t, add_rowvec(t, add(t, matmul(t, x, n.wxf), matmul(t, h, n.whf)), n.bf));
    NodeId o = sigmoid(t, add_rowvec(t, add(t, matmul(t, x, n.wxo), matmul(t, h, n.who)), n.bo));
    NodeId g = tanh(t, add_rowvec(t, add(t, matmul(t, x, n.wxg), matmul(t, h, n.whg)), n.bg));
    NodeId c2 = add(t, mul(t, f, c), mul(t, i, g));
    NodeId h2 = mul(t, o, tanh(t, c2));
    return {h2, c2};
}

inline void sgd_step(ModelParams& p, double lr) {
    for (Param& pp : p.all())
        for (std::size_t i = 0; i < pp.value.size(); ++i)
            pp.value[i] = static_cast<float>(static_cast<double>(pp.value[i]) -
                                             lr * static_cast<double>(pp.grad[i]));
}

inline void adam_step(ModelParams& p, double lr, double beta1 = 0.9, double beta2 = 0.999,
                      double eps = 1e-8) {
    double t = static_cast<double>(++p.adam_steps());
    double bc1 = 1.0 - std::pow(beta1, t);
    double bc2 = 1.0 - std::pow(beta2, t);
    for (Param& pp : p.all()) {
        for (std::size_t i = 0; i < pp.value.size(); ++i) {
            double g = pp.grad[i];
            double m = beta1 * pp.m[i] + (1.0 - beta1) * g;
            double v = beta2 * pp.v[i] + (1.0 - beta2) * g * g;
            pp.m[i] = static_cast<float>(m);
            pp.v[i] = static_cast<float>(v);
            pp.value[i] = static_cast<float>(static_cast<double>(pp.value[i]) -
                                             lr * (m / bc1) / (std::sqrt(v / bc2) + eps));
        }
    }
}

// Checkpoint: [uint64 LE header length][JSON header][row-major f32 payload].
inline void save_params(const ModelParams& p, const std::string& path) {
    nlohmann::json h;
    h["dtype"] = "f32";
    h["params"] = nlohmann::json::array();
    for (const Param& pp : p.all())
        h["params"].push_back({{"name", pp.name}, {"rows", pp.rows}, {"cols", pp.cols}});
    std::string hs = h.dump();

    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open for write: " + path);
    std::uint64_t len = hs.size();
    unsigned char lb[8];
    for (int i = 0; i < 8; ++i) lb[i] = static_cast<unsigned char>((len >> (8 * i)) & 0xff);
    f.write(reinterpret_cast<const char*>(lb), 8);
    f.write(hs.data(), static_cast<std::streamsize>(hs.size()));
    for (const Param& pp : p.all())
        f.write(reinterpret_cast<const char*>(pp.value.data()),
                static_cast<std::streamsize>(pp.value.size() * sizeof(float)));
    if (!f) throw IoError("write failed: " + path);
}

// Loads values into an existing parameter set; the checkpoint schema must
// list the same names and shapes in the same order.
inline void load_params(ModelParams& p, const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open: " + path);
    unsigned char lb[8];
    f.read(reinterpret_cast<char*>(lb), 8);
    if (!f) throw ParseError("checkpoint too short for its header length", 0);
    std::uint64_t len = 0;
    for (int i = 0; i < 8; ++i) len |= static_cast<std::uint64_t>(lb[i]) << (8 * i);
    std::string hs(len, '\0');
    f.read(hs.data(), static_cast<std::streamsize>(len));
    if (!f) throw ParseError("checkpoint header truncated", 0);

    nlohmann::json h = nlohmann::json::parse(hs, nullptr, false);
    if (h.is_discarded() || h.value("dtype", "") != "f32" || !h.contains("params"))
        throw ParseError("malformed checkpoint header", 0);
    const auto& list = h["params"];
    if (list.size() != p.all().size())
        throw ShapeMismatch("checkpoint lists a different parameter count");
    for (std::size_t i = 0; i < list.size(); ++i) {
        Param& pp = p.all()[i];
        if (list[i].value("name", "") != pp.name ||
            list[i].value("rows", std::size_t(0)) != pp.rows ||
            list[i].value("cols", std::size_t(0)) != pp.cols)
            throw ShapeMismatch("checkpoint schema differs at parameter " + pp.name);
        f.read(reinterpret_cast<char*>(pp.value.data()),
               static_cast<std::streamsize>(pp.value.size() * sizeof(float)));
        if (!f) throw ParseError("checkpoint payload truncated", 0);
    }
}

} // namespace kbhop
