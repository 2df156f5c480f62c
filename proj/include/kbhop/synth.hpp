#pragma once
// Synthetic stand-in KBs for the three non-grid tasks, each with ground
// truth derived by graph traversal at generation time.
//
// - CvtTask: event-style KB where composed queries are answerable only
//   through a hub (CVT) entity: subj --q_s--> event --q_o--> obj. Direct
//   queries use ordinary ent->ent relations. Questions mix both kinds.
// - HopTask: single-type KB whose queries name fixed relation paths of
//   length k; answers are the k-hop traversal results.
// - KinTask: layered population with a parent relation pointing one layer
//   up, so grandparent facts need a two-step chain and never collapse
//   onto one step. A "likes" relation adds in-group distractor edges.

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "kbhop/datasets.hpp"
#include "kbhop/kb.hpp"
#include "kbhop/rng.hpp"

namespace kbhop {

namespace detail {

// unique random (subject, object) pairs, no self loops
inline std::set<std::pair<std::size_t, std::size_t>> random_pairs(Rng& rng, std::size_t n_subj,
                                                                  std::size_t n_obj,
                                                                  std::size_t count) {
    std::set<std::pair<std::size_t, std::size_t>> pairs;
    const std::size_t cap = n_subj * (n_obj - 1) / 2;
    count = std::min(count, std::max<std::size_t>(cap, 1));
    while (pairs.size() < count) {
        std::size_t s = rng.randint(n_subj);
        std::size_t o = rng.randint(n_obj);
        if (s == o) continue;
        pairs.insert({s, o});
    }
    return pairs;
}

inline void split_examples(Rng& rng, std::vector<Example> all, double test_frac,
                           std::vector<Example>& train, std::vector<Example>& test) {
    rng.shuffle(all);
    const std::size_t n_test = static_cast<std::size_t>(
        static_cast<double>(all.size()) * test_frac);
    test.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(n_test));
    train.assign(all.begin() + static_cast<std::ptrdiff_t>(n_test), all.end());
}

} // namespace detail

// ---- CVT / template task ----

struct CvtSpec {
    std::size_t n_entities = 40;
    std::size_t n_direct = 3;            // ent->ent query relations d<k>
    std::size_t n_composed = 3;          // hub-mediated query relations q<k>
    std::size_t facts_per_relation = 80; // direct pairs / events per relation
    double test_frac = 0.2;
};

struct CvtTask {
    TypedKb kb;
    std::vector<Example> train, test;
};

inline CvtTask gen_cvt_task(const CvtSpec& spec, std::uint64_t seed) {
    if (spec.n_entities < 2 || spec.n_direct == 0 || spec.n_composed == 0 ||
        spec.facts_per_relation == 0)
        throw ConfigError("cvt task needs entities and at least one relation of each kind");
    Rng rng(seed);
    const std::size_t n_events = spec.n_composed * spec.facts_per_relation;

    std::vector<std::string> ents, cvts;
    for (std::size_t i = 0; i < spec.n_entities; ++i) ents.push_back("e" + std::to_string(i));
    for (std::size_t i = 0; i < n_events; ++i) cvts.push_back("v" + std::to_string(i));

    std::vector<std::tuple<std::string, std::string, std::string>> rels;
    for (std::size_t k = 0; k < spec.n_direct; ++k)
        rels.push_back({"d" + std::to_string(k), "ent", "ent"});
    for (std::size_t k = 0; k < spec.n_composed; ++k) {
        rels.push_back({"q" + std::to_string(k) + "_s", "ent", "cvt"});
        rels.push_back({"q" + std::to_string(k) + "_o", "cvt", "ent"});
    }

    std::vector<std::tuple<std::string, std::string, std::string, double>> triples;
    // query word -> subject -> answer set
    std::map<std::string, std::map<std::string, std::set<std::string>>> truth;
    std::map<std::string, int> query_hops;

    for (std::size_t k = 0; k < spec.n_direct; ++k) {
        const std::string rel = "d" + std::to_string(k);
        query_hops[rel] = 1;
        for (auto [s, o] : detail::random_pairs(rng, spec.n_entities, spec.n_entities,
                                                spec.facts_per_relation)) {
            triples.push_back({ents[s], rel, ents[o], 1.0});
            truth[rel][ents[s]].insert(ents[o]);
        }
    }
    std::size_t event = 0;
    for (std::size_t k = 0; k < spec.n_composed; ++k) {
        const std::string q = "q" + std::to_string(k);
        query_hops[q] = 2;
        for (std::size_t f = 0; f < spec.facts_per_relation; ++f, ++event) {
            const std::size_t s = rng.randint(spec.n_entities);
            std::size_t o = rng.randint(spec.n_entities);
            while (o == s) o = rng.randint(spec.n_entities);
            triples.push_back({ents[s], q + "_s", cvts[event], 1.0});
            triples.push_back({cvts[event], q + "_o", ents[o], 1.0});
            truth[q][ents[s]].insert(ents[o]);
        }
    }

    CvtTask task{build_kb_named({{"ent", ents}, {"cvt", cvts}}, rels, triples), {}, {}};

    std::vector<Example> all;
    for (const auto& [q, subjects] : truth)
        for (const auto& [subj, answers] : subjects)
            all.push_back({{"which", q, "of"},
                           subj,
                           {answers.begin(), answers.end()},
                           query_hops[q]});
    detail::split_examples(rng, std::move(all), spec.test_frac, task.train, task.test);
    return task;
}

// ---- fixed-hop path task ----

struct HopSpec {
    std::size_t n_entities = 60;
    std::size_t n_relations = 3;
    std::size_t facts_per_relation = 120;
    int hops = 1;                 // path length k in {1,2,3}
    std::size_t n_paths = 4;      // distinct query paths (capped by enumeration)
    double test_frac = 0.2;
};

struct HopTask {
    TypedKb kb;
    std::vector<Example> train, test;
    std::vector<std::vector<std::string>> paths; // paths[p] lists relation names
    std::vector<std::string> qwords;             // qwords[p] names path p
};

inline HopTask gen_hop_task(const HopSpec& spec, std::uint64_t seed) {
    if (spec.hops < 1 || spec.hops > 3) throw ConfigError("hop count must be 1, 2, or 3");
    if (spec.n_entities < 2 || spec.n_relations == 0 || spec.n_paths == 0)
        throw ConfigError("hop task needs entities, relations, and at least one path");
    Rng rng(seed);

    std::vector<std::string> nodes;
    for (std::size_t i = 0; i < spec.n_entities; ++i)
        nodes.push_back("m" + std::to_string(i));
    std::vector<std::tuple<std::string, std::string, std::string>> rels;
    for (std::size_t k = 0; k < spec.n_relations; ++k)
        rels.push_back({"rel" + std::to_string(k), "node", "node"});

    // adjacency per relation for traversal ground truth
    std::vector<std::vector<std::vector<std::size_t>>> adj(
        spec.n_relations, std::vector<std::vector<std::size_t>>(spec.n_entities));
    std::vector<std::tuple<std::string, std::string, std::string, double>> triples;
    for (std::size_t k = 0; k < spec.n_relations; ++k)
        for (auto [s, o] : detail::random_pairs(rng, spec.n_entities, spec.n_entities,
                                                spec.facts_per_relation)) {
            triples.push_back({nodes[s], "rel" + std::to_string(k), nodes[o], 1.0});
            adj[k][s].push_back(o);
        }

    HopTask task;
    task.kb = build_kb_named({{"node", nodes}}, rels, triples);

    // enumerate all k-tuples of relation ids, take the first n_paths of a
    // shuffled order so path sets vary with the seed
    std::vector<std::vector<std::size_t>> tuples{{}};
    for (int h = 0; h < spec.hops; ++h) {
        std::vector<std::vector<std::size_t>> next;
        for (const auto& tup : tuples)
            for (std::size_t k = 0; k < spec.n_relations; ++k) {
                auto t2 = tup;
                t2.push_back(k);
                next.push_back(std::move(t2));
            }
        tuples = std::move(next);
    }
    rng.shuffle(tuples);
    tuples.resize(std::min(spec.n_paths, tuples.size()));

    std::vector<Example> all;
    for (const auto& tup : tuples) {
        std::vector<std::string> path;
        std::string qword;
        for (std::size_t k : tup) {
            path.push_back("rel" + std::to_string(k));
            qword += (qword.empty() ? "" : "_") + path.back();
        }
        task.paths.push_back(path);
        task.qwords.push_back(qword);
        for (std::size_t s = 0; s < spec.n_entities; ++s) {
            std::set<std::size_t> frontier{s};
            for (std::size_t k : tup) {
                std::set<std::size_t> next;
                for (std::size_t u : frontier)
                    for (std::size_t v : adj[k][u]) next.insert(v);
                frontier = std::move(next);
            }
            if (frontier.empty()) continue;
            std::vector<std::string> answers;
            for (std::size_t v : frontier) answers.push_back(nodes[v]);
            all.push_back({{"find", qword, "of"}, nodes[s], answers, spec.hops});
        }
    }
    detail::split_examples(rng, std::move(all), spec.test_frac, task.train, task.test);
    return task;
}

// ---- kinship / KB-completion task ----

struct KinSpec {
    std::size_t layer_size = 50;
    std::size_t n_layers = 4;
    std::size_t parents_per_person = 2;  // drawn from the next layer up
    std::size_t n_likes = 150;           // distractor edges, any direction
    double test_frac = 0.2;
};

struct KinTask {
    TypedKb kb;
    std::vector<Example> parent_train, parent_test;           // one-step queries
    std::vector<Example> grandparent_train, grandparent_test; // two-step queries
};

inline KinTask gen_kin_task(const KinSpec& spec, std::uint64_t seed) {
    if (spec.n_layers < 3 || spec.layer_size < 2 ||
        spec.parents_per_person == 0 || spec.parents_per_person > spec.layer_size)
        throw ConfigError("kin task needs 3+ layers and parents within layer size");
    Rng rng(seed);
    const std::size_t n = spec.layer_size * spec.n_layers;

    std::vector<std::string> people;
    for (std::size_t i = 0; i < n; ++i) people.push_back("p" + std::to_string(i));

    std::vector<std::vector<std::size_t>> parents(n);
    std::vector<std::tuple<std::string, std::string, std::string, double>> triples;
    for (std::size_t i = 0; i < n - spec.layer_size; ++i) {
        const std::size_t layer = i / spec.layer_size;
        const std::size_t base = (layer + 1) * spec.layer_size;
        std::set<std::size_t> picked;
        while (picked.size() < spec.parents_per_person)
            picked.insert(base + rng.randint(spec.layer_size));
        for (std::size_t p : picked) {
            parents[i].push_back(p);
            triples.push_back({people[i], "parent", people[p], 1.0});
        }
    }
    for (auto [s, o] : detail::random_pairs(rng, n, n, spec.n_likes))
        triples.push_back({people[s], "likes", people[o], 1.0});

    KinTask task;
    task.kb = build_kb_named({{"p", people}},
                             {{"parent", "p", "p"}, {"likes", "p", "p"}}, triples);

    std::vector<Example> parent_all, grand_all;
    for (std::size_t i = 0; i < n; ++i) {
        if (parents[i].empty()) continue;
        std::vector<std::string> pa;
        std::set<std::size_t> grand;
        for (std::size_t p : parents[i]) {
            pa.push_back(people[p]);
            for (std::size_t g : parents[p]) grand.insert(g);
        }
        parent_all.push_back({{"q_parent"}, people[i], pa, 1});
        if (!grand.empty()) {
            std::vector<std::string> ga;
            for (std::size_t g : grand) ga.push_back(people[g]);
            grand_all.push_back({{"q_grandparent"}, people[i], ga, 2});
        }
    }
    detail::split_examples(rng, std::move(parent_all), spec.test_frac, task.parent_train,
                           task.parent_test);
    detail::split_examples(rng, std::move(grand_all), spec.test_frac,
                           task.grandparent_train, task.grandparent_test);
    return task;
}

} // namespace kbhop
