#pragma once
// Synthetic n-by-n grid KB. Every cell is an entity named c<row>_<col>;
// north/south/east/west connect immediate neighbors, giving 4n(n-1) directed
// triples. Benchmark mode reassigns each triple to one of m invented
// relation names, round-robin by triple id, keeping the (subj, obj) pairs.

#include <string>
#include <tuple>
#include <vector>

#include "kbhop/kb.hpp"

namespace kbhop {

struct GridSpec {
    std::size_t n = 2;               // side length, >= 2
    std::size_t invented_relations = 0; // benchmark mode when > 0
};

inline std::string grid_cell_name(std::size_t row, std::size_t col) {
    return "c" + std::to_string(row) + "_" + std::to_string(col);
}

inline TypedKb gen_grid(const GridSpec& spec) {
    const std::size_t n = spec.n;
    if (n < 2) throw ConfigError("grid side must be >= 2");
    std::vector<std::string> cells;
    cells.reserve(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) cells.push_back(grid_cell_name(i, j));

    // edges in a fixed order: per cell, the in-bounds moves
    struct Edge {
        std::string from, to;
        int dir; // 0 north, 1 south, 2 east, 3 west
    };
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i > 0) edges.push_back({grid_cell_name(i, j), grid_cell_name(i - 1, j), 0});
            if (i + 1 < n) edges.push_back({grid_cell_name(i, j), grid_cell_name(i + 1, j), 1});
            if (j + 1 < n) edges.push_back({grid_cell_name(i, j), grid_cell_name(i, j + 1), 2});
            if (j > 0) edges.push_back({grid_cell_name(i, j), grid_cell_name(i, j - 1), 3});
        }
    }

    static const char* kDirNames[4] = {"north", "south", "east", "west"};
    std::vector<std::tuple<std::string, std::string, std::string>> rel_decls;
    std::vector<std::tuple<std::string, std::string, std::string, double>> triples;
    triples.reserve(edges.size());

    if (spec.invented_relations == 0) {
        for (int d = 0; d < 4; ++d) rel_decls.push_back({kDirNames[d], "cell", "cell"});
        for (const Edge& e : edges) triples.push_back({e.from, kDirNames[e.dir], e.to, 1.0});
    } else {
        const std::size_t m = spec.invented_relations;
        for (std::size_t k = 0; k < m; ++k)
            rel_decls.push_back({"r" + std::to_string(k), "cell", "cell"});
        for (std::size_t l = 0; l < edges.size(); ++l)
            triples.push_back({edges[l].from, "r" + std::to_string(l % m), edges[l].to, 1.0});
    }

    return build_kb_named({{"cell", cells}}, rel_decls, triples);
}

} // namespace kbhop
