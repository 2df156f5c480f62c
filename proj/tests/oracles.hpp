#pragma once
// Reference implementations used only by tests. Everything here is written
// the slow, obvious way and shares no code with the library kernels.

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "kbhop/kb.hpp"
#include "kbhop/rng.hpp"

namespace oracle {

// plain cubic matmul over nested vectors
inline std::vector<std::vector<double>> matmul(const std::vector<std::vector<double>>& a,
                                               const std::vector<std::vector<double>>& b) {
    std::size_t n = a.size(), k = a.empty() ? 0 : a[0].size(), m = b.empty() ? 0 : b[0].size();
    std::vector<std::vector<double>> out(n, std::vector<double>(m, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j)
            for (std::size_t l = 0; l < k; ++l) out[i][j] += a[i][l] * b[l][j];
    return out;
}

inline std::vector<std::vector<double>> transpose(const std::vector<std::vector<double>>& a) {
    std::size_t n = a.size(), m = a.empty() ? 0 : a[0].size();
    std::vector<std::vector<double>> out(m, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) out[j][i] = a[i][j];
    return out;
}

// set of entity names reachable from any member of `starts` by one hop over
// any relation in `rels`, read straight off the triple list
inline std::set<std::string> r_neighbors(const kbhop::TypedKb& kb,
                                         const std::set<std::string>& starts,
                                         const std::set<std::string>& rels) {
    std::set<std::string> out;
    for (const kbhop::Triple& t : kb.triples()) {
        const std::string& rel = kb.relations()[t.rel].name;
        if (!rels.count(rel)) continue;
        const std::string& s = kb.types()[t.subj.type].entity_names[t.subj.index];
        if (!starts.count(s)) continue;
        out.insert(kb.types()[t.obj.type].entity_names[t.obj.index]);
    }
    return out;
}

// expected neighbor of a grid cell for a direction, or "" if out of bounds
inline std::string grid_step(std::size_t n, std::size_t i, std::size_t j, const std::string& dir) {
    long long r = static_cast<long long>(i), c = static_cast<long long>(j);
    if (dir == "north") --r;
    else if (dir == "south") ++r;
    else if (dir == "east") ++c;
    else if (dir == "west") --c;
    if (r < 0 || c < 0 || r >= static_cast<long long>(n) || c >= static_cast<long long>(n)) return "";
    return "c" + std::to_string(r) + "_" + std::to_string(c);
}

// walk a direction sequence from a start cell; "" once any step leaves the grid
inline std::string grid_walk(std::size_t n, std::size_t i, std::size_t j,
                             const std::vector<std::string>& dirs) {
    std::string cur = "c" + std::to_string(i) + "_" + std::to_string(j);
    std::size_t ci = i, cj = j;
    for (const std::string& d : dirs) {
        cur = grid_step(n, ci, cj, d);
        if (cur.empty()) return "";
        auto us = cur.find('_');
        ci = std::stoul(cur.substr(1, us - 1));
        cj = std::stoul(cur.substr(us + 1));
    }
    return cur;
}

// random KB over one entity type with `nr` relations in one group; weights
// drawn from (0, 1]; duplicate (s, r, o) coordinates are skipped. The triple
// count is capped at half the coordinate space so rejection sampling stays
// cheap and always terminates.
inline kbhop::TypedKb random_kb(kbhop::Rng& rng, std::size_t ne, std::size_t nr,
                                std::size_t n_triples) {
    std::size_t cap = ne * ne * nr / 2;
    if (cap == 0) cap = 1;
    if (n_triples > cap) n_triples = cap;
    std::vector<std::tuple<std::string, std::string, std::string>> rels;
    for (std::size_t k = 0; k < nr; ++k)
        rels.push_back({"r" + std::to_string(k), "node", "node"});
    std::set<std::tuple<std::string, std::string, std::string>> seen;
    std::vector<std::tuple<std::string, std::string, std::string, double>> triples;
    while (triples.size() < n_triples) {
        std::string s = "node" + std::to_string(rng.randint(static_cast<std::int64_t>(ne)));
        std::string r = "r" + std::to_string(rng.randint(static_cast<std::int64_t>(nr)));
        std::string o = "node" + std::to_string(rng.randint(static_cast<std::int64_t>(ne)));
        if (!seen.insert({s, r, o}).second) continue;
        triples.push_back({s, r, o, 1.0 - rng.uniform() * 0.999});
    }
    return kbhop::build_kb({{"node", ne}}, rels, triples);
}

inline std::vector<std::vector<double>> to_nested(const kbhop::DenseMatrix& m) {
    std::vector<std::vector<double>> out(m.rows(), std::vector<double>(m.cols()));
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) out[i][j] = m(i, j);
    return out;
}

inline double max_abs_diff(const std::vector<std::vector<double>>& a,
                           const std::vector<std::vector<double>>& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a[i].size(); ++j)
            d = std::max(d, std::abs(a[i][j] - b[i][j]));
    return d;
}

} // namespace oracle
