#pragma once
// Random walk questions over the grid KB in the fixed grammar
// "from <anchor> go <dir> (then <dir>)*". The nine anchors name landmark
// cells; direction words up/down/left/right map to the relations
// north/south/west/east. Walks only take in-bounds moves, so every
// question has exactly one answer cell.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "kbhop/grid.hpp"
#include "kbhop/rng.hpp"

namespace kbhop {

struct ChainQuestion {
    std::vector<std::string> tokens;
    std::string start;              // cell name
    std::vector<std::string> dirs;  // relation names, one per hop
    std::string answer;             // cell name
};

struct GridAnchor {
    std::vector<std::string> words;
    std::size_t row, col;
};

inline std::vector<GridAnchor> grid_anchors(std::size_t n) {
    const std::size_t c = (n - 1) / 2, e = n - 1;
    return {{{"center"}, c, c},
            {{"top", "left"}, 0, 0},
            {{"top", "right"}, 0, e},
            {{"bottom", "left"}, e, 0},
            {{"bottom", "right"}, e, e},
            {{"center", "left"}, c, 0},
            {{"center", "right"}, c, e},
            {{"top", "center"}, 0, c},
            {{"bottom", "center"}, e, c}};
}

namespace detail {

struct DirWord {
    const char* word;
    const char* rel;
    int di, dj;
};

inline const std::array<DirWord, 4>& dir_words() {
    static const std::array<DirWord, 4> d = {{{"up", "north", -1, 0},
                                              {"down", "south", 1, 0},
                                              {"left", "west", 0, -1},
                                              {"right", "east", 0, 1}}};
    return d;
}

} // namespace detail

inline std::vector<ChainQuestion> gen_chain_questions(const GridSpec& spec, std::size_t count,
                                                      int hop_lo, int hop_hi,
                                                      std::uint64_t seed) {
    if (spec.n < 2) throw ConfigError("grid side must be >= 2");
    if (hop_lo < 1 || hop_hi > 10 || hop_lo > hop_hi)
        throw ConfigError("hop range must sit inside [1, 10]");
    const std::size_t n = spec.n;
    Rng rng(seed);
    std::vector<GridAnchor> anchors = grid_anchors(n);
    std::vector<ChainQuestion> out;
    out.reserve(count);
    for (std::size_t qi = 0; qi < count; ++qi) {
        const GridAnchor& a = anchors[rng.randint(anchors.size())];
        const int hops = hop_lo + static_cast<int>(rng.randint(
                                      static_cast<std::size_t>(hop_hi - hop_lo) + 1));
        ChainQuestion q;
        q.start = grid_cell_name(a.row, a.col);
        q.tokens.push_back("from");
        for (const std::string& w : a.words) q.tokens.push_back(w);
        q.tokens.push_back("go");
        std::size_t i = a.row, j = a.col;
        for (int h = 0; h < hops; ++h) {
            std::vector<const detail::DirWord*> legal;
            for (const detail::DirWord& d : detail::dir_words()) {
                const long ni = static_cast<long>(i) + d.di;
                const long nj = static_cast<long>(j) + d.dj;
                if (ni >= 0 && nj >= 0 && ni < static_cast<long>(n) &&
                    nj < static_cast<long>(n))
                    legal.push_back(&d);
            }
            const detail::DirWord* pick = legal[rng.randint(legal.size())];
            if (h > 0) q.tokens.push_back("then");
            q.tokens.push_back(pick->word);
            q.dirs.push_back(pick->rel);
            i = static_cast<std::size_t>(static_cast<long>(i) + pick->di);
            j = static_cast<std::size_t>(static_cast<long>(j) + pick->dj);
        }
        q.answer = grid_cell_name(i, j);
        out.push_back(std::move(q));
    }
    return out;
}

} // namespace kbhop
