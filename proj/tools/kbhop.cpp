// kbhop command line. Subcommands generate grid KBs and walk questions,
// benchmark the follow strategies, train and evaluate the QA models, and
// answer one-off follow queries against a TSV KB.
//
// Exit codes: 0 success, 1 unreadable or unparseable inputs, 2 invalid
// configuration or domain errors.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "kbhop/bench.hpp"
#include "kbhop/kb_tsv.hpp"
#include "kbhop/questions.hpp"
#include "kbhop/synth.hpp"
#include "kbhop/train.hpp"

namespace {

using nlohmann::json;
using namespace kbhop;

json load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open config: " + path);
    json j = json::parse(f, nullptr, false);
    if (j.is_discarded()) throw ParseError("config is not valid JSON", 0);
    if (!j.is_object()) throw ParseError("config must be a JSON object", 0);
    return j;
}

// typed config access; a present key with the wrong type is a config error
std::string str_field(const json& j, const std::string& key, const char* fallback = nullptr) {
    if (!j.contains(key)) {
        if (fallback) return fallback;
        throw ConfigError("config needs \"" + key + "\"");
    }
    if (!j[key].is_string()) throw ConfigError("\"" + key + "\" must be a string");
    return j[key].get<std::string>();
}

std::size_t size_field(const json& j, const std::string& key, long long fallback = -1) {
    if (!j.contains(key)) {
        if (fallback >= 0) return static_cast<std::size_t>(fallback);
        throw ConfigError("config needs \"" + key + "\"");
    }
    if (!j[key].is_number_integer() || j[key].get<long long>() < 0)
        throw ConfigError("\"" + key + "\" must be a non-negative integer");
    return j[key].get<std::size_t>();
}

int int_field(const json& j, const std::string& key, int fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number_integer()) throw ConfigError("\"" + key + "\" must be an integer");
    return j[key].get<int>();
}

double num_field(const json& j, const std::string& key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number()) throw ConfigError("\"" + key + "\" must be a number");
    return j[key].get<double>();
}

bool bool_field(const json& j, const std::string& key, bool fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_boolean()) throw ConfigError("\"" + key + "\" must be a boolean");
    return j[key].get<bool>();
}

const json& obj_field(const json& j, const std::string& key) {
    if (!j.contains(key) || !j[key].is_object())
        throw ConfigError("config needs the \"" + key + "\" object");
    return j[key];
}

// smallest fixed-point rendering that parses back to the same double
std::string cli_weight(double w) {
    char buf[64];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*f", prec, w);
        if (std::stod(buf) == w) return buf;
    }
    std::snprintf(buf, sizeof(buf), "%.17g", w);
    return buf;
}

int cmd_gen_grid(const json& cfg) {
    GridSpec spec;
    spec.n = size_field(cfg, "n");
    spec.invented_relations = size_field(cfg, "invented_relations", 0);
    const std::string out = str_field(cfg, "out");
    const TypedKb kb = gen_grid(spec);
    save_kb_tsv(kb, out);
    std::cout << json{{"entities", kb.num_entities()},
                      {"triples", kb.num_triples()},
                      {"out", out}}
                     .dump()
              << "\n";
    return 0;
}

int cmd_gen_questions(const json& cfg, std::uint64_t seed) {
    GridSpec spec;
    spec.n = size_field(cfg, "n");
    const std::size_t count = size_field(cfg, "count");
    const int hop_lo = int_field(cfg, "hop_lo", 1);
    const int hop_hi = int_field(cfg, "hop_hi", 10);
    const std::string out = str_field(cfg, "out");
    const auto exs = to_examples(gen_chain_questions(spec, count, hop_lo, hop_hi, seed));
    save_examples(exs, out);
    std::cout << json{{"count", exs.size()}, {"out", out}}.dump() << "\n";
    return 0;
}

int cmd_bench(const json& cfg, std::uint64_t seed) {
    BenchConfig bc;
    bc.n = size_field(cfg, "n", static_cast<long long>(bc.n));
    bc.m = size_field(cfg, "m", static_cast<long long>(bc.m));
    bc.b = size_field(cfg, "b", static_cast<long long>(bc.b));
    bc.reps = size_field(cfg, "reps", static_cast<long long>(bc.reps));
    bc.warmup = size_field(cfg, "warmup", static_cast<long long>(bc.warmup));
    bc.shards = size_field(cfg, "shards", static_cast<long long>(bc.shards));
    bc.seed = seed;
    if (cfg.contains("strategies")) {
        if (!cfg["strategies"].is_array())
            throw ConfigError("\"strategies\" must be an array of strings");
        bc.strategies.clear();
        for (const auto& s : cfg["strategies"]) {
            if (!s.is_string()) throw ConfigError("\"strategies\" must be an array of strings");
            bc.strategies.push_back(s.get<std::string>());
        }
    }
    const std::string csv = bench_csv(run_bench(bc));
    std::cout << csv;
    const std::string out = str_field(cfg, "out", "");
    if (!out.empty()) {
        std::ofstream f(out);
        if (!f) throw IoError("cannot open for write: " + out);
        f << csv;
    }
    return 0;
}

// ---- task setups shared by train and eval ----
// Models keep pointers into their KB, so each setup heap-allocates the
// task data and hands out a model tied to it.

struct ChainSetup {
    std::unique_ptr<TypedKb> kb;
    std::unique_ptr<ReifiedKb> rkb;
    std::unique_ptr<ShardedReifiedKb> skb;
    std::vector<Example> train, test;
    std::unique_ptr<ChainModel> model;
};

ChainSetup setup_chain(const json& cfg, std::uint64_t seed) {
    ChainSetup s;
    s.kb = std::make_unique<TypedKb>(load_kb_tsv(str_field(cfg, "kb")));
    if (s.kb->groups().size() != 1)
        throw ConfigError("chain task expects a KB with one relation group");
    s.train = load_examples(str_field(cfg, "train"));
    s.test = load_examples(str_field(cfg, "test"));
    Vocab v = vocab_from_examples(s.train);
    for (const Example& e : s.test)
        for (const std::string& w : e.tokens) v.add(w);

    ChainConfig cc;
    cc.emb = size_field(cfg, "emb", 16);
    cc.hidden = size_field(cfg, "hidden", 64);
    cc.max_hops = int_field(cfg, "max_hops", 10);
    Rng rng(seed);
    s.model = std::make_unique<ChainModel>(*s.kb, 0, std::move(v), cc, rng);

    const std::string strat = str_field(cfg, "strategy", "late");
    if (strat == "reified" || strat == "reified-sharded") {
        s.rkb = std::make_unique<ReifiedKb>(reify(*s.kb));
        if (strat == "reified-sharded")
            s.skb = std::make_unique<ShardedReifiedKb>(
                partition_reified(*s.rkb, size_field(cfg, "shards", 4)));
        s.model->set_engine(
            {FollowStrategy::reified, nullptr, 0, s.rkb.get(), s.skb.get()});
    } else if (strat != "late") {
        throw ConfigError("unknown strategy: " + strat);
    }
    return s;
}

struct TemplateSetup {
    std::unique_ptr<CvtTask> task;
    std::unique_ptr<TemplateQaModel> model;
};

TemplateSetup setup_template(const json& cfg, std::uint64_t seed) {
    const json& g = obj_field(cfg, "cvt");
    CvtSpec spec;
    spec.n_entities = size_field(g, "n_entities", static_cast<long long>(spec.n_entities));
    spec.n_direct = size_field(g, "n_direct", static_cast<long long>(spec.n_direct));
    spec.n_composed = size_field(g, "n_composed", static_cast<long long>(spec.n_composed));
    spec.facts_per_relation =
        size_field(g, "facts_per_relation", static_cast<long long>(spec.facts_per_relation));
    spec.test_frac = num_field(g, "test_frac", spec.test_frac);

    TemplateSetup s;
    s.task = std::make_unique<CvtTask>(gen_cvt_task(spec, size_field(g, "seed", 0)));
    std::vector<Example> all = s.task->train;
    all.insert(all.end(), s.task->test.begin(), s.task->test.end());
    TemplateConfig tc;
    tc.emb = size_field(cfg, "emb", 16);
    tc.ablate_two_hop = bool_field(cfg, "ablate_two_hop", false);
    Rng rng(seed);
    s.model = std::make_unique<TemplateQaModel>(s.task->kb, "ent", "cvt",
                                                vocab_from_examples(all), tc, rng);
    return s;
}

struct KbcSetup {
    std::unique_ptr<KinTask> task;
    std::unique_ptr<KbcModel> model;
    const std::vector<Example>* train = nullptr;
    const std::vector<Example>* test = nullptr;
};

KbcSetup setup_kbc(const json& cfg, std::uint64_t seed) {
    const json& g = obj_field(cfg, "kin");
    KinSpec spec;
    spec.layer_size = size_field(g, "layer_size", static_cast<long long>(spec.layer_size));
    spec.n_layers = size_field(g, "n_layers", static_cast<long long>(spec.n_layers));
    spec.parents_per_person = size_field(g, "parents_per_person",
                                         static_cast<long long>(spec.parents_per_person));
    spec.n_likes = size_field(g, "n_likes", static_cast<long long>(spec.n_likes));
    spec.test_frac = num_field(g, "test_frac", spec.test_frac);

    KbcSetup s;
    s.task = std::make_unique<KinTask>(gen_kin_task(spec, size_field(g, "seed", 0)));
    const std::string rel = str_field(cfg, "relation", "grandparent");
    if (rel == "parent") {
        s.train = &s.task->parent_train;
        s.test = &s.task->parent_test;
    } else if (rel == "grandparent") {
        s.train = &s.task->grandparent_train;
        s.test = &s.task->grandparent_test;
    } else {
        throw ConfigError("relation must be parent or grandparent");
    }
    KbcConfig kc;
    kc.emb = size_field(cfg, "emb", 8);
    kc.chains = int_field(cfg, "chains", 1);
    kc.steps = int_field(cfg, "steps", 2);
    Rng rng(seed);
    s.model = std::make_unique<KbcModel>(s.task->kb, 0,
                                         std::vector<std::string>{"q_" + rel}, kc, rng);
    return s;
}

struct FixedHopSetup {
    std::unique_ptr<HopTask> task;
    std::unique_ptr<FixedHopModel> model;
};

FixedHopSetup setup_fixed_hop(const json& cfg, std::uint64_t seed) {
    const json& g = obj_field(cfg, "hop");
    HopSpec spec;
    spec.n_entities = size_field(g, "n_entities", static_cast<long long>(spec.n_entities));
    spec.n_relations = size_field(g, "n_relations", static_cast<long long>(spec.n_relations));
    spec.facts_per_relation =
        size_field(g, "facts_per_relation", static_cast<long long>(spec.facts_per_relation));
    spec.hops = int_field(g, "hops", spec.hops);
    spec.n_paths = size_field(g, "n_paths", static_cast<long long>(spec.n_paths));
    spec.test_frac = num_field(g, "test_frac", spec.test_frac);

    FixedHopSetup s;
    s.task = std::make_unique<HopTask>(gen_hop_task(spec, size_field(g, "seed", 0)));
    std::vector<Example> all = s.task->train;
    all.insert(all.end(), s.task->test.begin(), s.task->test.end());
    FixedHopConfig fc;
    fc.emb = size_field(cfg, "emb", 16);
    fc.hops = spec.hops;
    Rng rng(seed);
    s.model = std::make_unique<FixedHopModel>(s.task->kb, 0, vocab_from_examples(all), fc,
                                              rng);
    return s;
}

template <class Model>
int run_train(Model& model, const std::vector<Example>& train,
              const std::vector<Example>& test, const json& cfg, std::uint64_t seed) {
    TrainConfig tc;
    tc.epochs = int_field(cfg, "epochs", 10);
    tc.batch = size_field(cfg, "batch", 10);
    tc.lr = num_field(cfg, "lr", 1e-3);
    tc.lr_decay = num_field(cfg, "lr_decay", 1.0);
    tc.seed = seed + 1; // model init already consumed the base seed
    tc.metrics_path = str_field(cfg, "metrics", "");
    const auto hist = train_model(model, train, test, tc);

    const std::string ckpt = str_field(cfg, "checkpoint", "");
    if (!ckpt.empty()) save_params(model.params(), ckpt);
    const EpochMetrics& last = hist.back();
    std::cout << json{{"epoch", last.epoch},
                      {"loss", last.loss},
                      {"hits1", last.hits1},
                      {"hits10", last.hits10}}
                     .dump()
              << "\n";
    return 0;
}

template <class Model>
int run_eval(Model& model, const std::vector<Example>& test, const json& cfg) {
    const std::string ckpt = str_field(cfg, "checkpoint", "");
    if (!ckpt.empty()) load_params(model.params(), ckpt);
    const EvalResult ev = evaluate(model, test);
    std::cout << json{{"hits1", ev.hits1}, {"hits10", ev.hits10}}.dump() << "\n";
    return 0;
}

int cmd_train_or_eval(const json& cfg, std::uint64_t seed, bool do_train) {
    const std::string task = str_field(cfg, "task");
    if (task == "chain") {
        ChainSetup s = setup_chain(cfg, seed);
        return do_train ? run_train(*s.model, s.train, s.test, cfg, seed)
                        : run_eval(*s.model, s.test, cfg);
    }
    if (task == "template") {
        TemplateSetup s = setup_template(cfg, seed);
        return do_train ? run_train(*s.model, s.task->train, s.task->test, cfg, seed)
                        : run_eval(*s.model, s.task->test, cfg);
    }
    if (task == "kbc") {
        KbcSetup s = setup_kbc(cfg, seed);
        return do_train ? run_train(*s.model, *s.train, *s.test, cfg, seed)
                        : run_eval(*s.model, *s.test, cfg);
    }
    if (task == "fixed-hop") {
        FixedHopSetup s = setup_fixed_hop(cfg, seed);
        return do_train ? run_train(*s.model, s.task->train, s.task->test, cfg, seed)
                        : run_eval(*s.model, s.task->test, cfg);
    }
    throw ConfigError("unknown task: " + task);
}

int cmd_follow(const std::string& kb_path, const std::string& x_name,
               const std::string& r_names, int hops, const std::string& strategy,
               std::size_t shards, std::size_t topk) {
    if (hops < 1) throw ConfigError("hop count must be positive");
    const TypedKb kb = load_kb_tsv(kb_path);

    std::vector<std::pair<std::string, double>> rels;
    std::stringstream ss(r_names);
    std::string name;
    while (std::getline(ss, name, ','))
        if (!name.empty()) rels.push_back({name, 1.0});
    const RelSetVec r = encode_rel_set(kb, rels);
    const RelationGroup& group = kb.groups()[r.group];
    const EntityId start = kb.entity(x_name);
    if (start.type != group.subj_type)
        throw TypeMismatch("entity " + x_name + " does not match the relation subjects");

    EntitySetVec result{group.obj_type, {}};
    if (strategy == "naive") {
        EntitySetVec x{start.type, std::vector<double>(kb.type_size(start.type), 0.0)};
        x.values[start.index] = 1.0;
        for (int h = 0; h < hops; ++h) x = follow_naive(kb, x, r);
        result = std::move(x);
    } else if (strategy == "late") {
        DenseMatrix x(1, kb.type_size(start.type));
        x(0, static_cast<std::size_t>(start.index)) = 1.0;
        DenseMatrix rv(1, r.values.size());
        for (std::size_t k = 0; k < r.values.size(); ++k) rv(0, k) = r.values[k];
        for (int h = 0; h < hops; ++h) x = follow_late(kb, r.group, x, rv);
        result.values.assign(x.row(0), x.row(0) + x.cols());
    } else if (strategy == "reified" || strategy == "reified-sharded") {
        const ReifiedKb rkb = reify(kb);
        DenseMatrix x(1, kb.num_entities());
        x(0, kb.global_index(start)) = 1.0;
        DenseMatrix rv(1, kb.num_relations());
        for (std::size_t k = 0; k < group.relations.size(); ++k)
            rv(0, static_cast<std::size_t>(group.relations[k])) = r.values[k];
        if (strategy == "reified") {
            for (int h = 0; h < hops; ++h) x = follow_reified(rkb, x, rv);
        } else {
            const ShardedReifiedKb skb = partition_reified(rkb, shards);
            for (int h = 0; h < hops; ++h) x = follow_sharded(skb, x, rv);
        }
        const std::size_t off = kb.type_offset(group.obj_type);
        result.values.assign(x.row(0) + off, x.row(0) + off + kb.type_size(group.obj_type));
    } else {
        throw ConfigError("unknown strategy: " + strategy);
    }

    const auto ranked = decode_topk(kb, result, topk == 0 ? result.values.size() : topk);
    for (const auto& [ent, w] : ranked) std::cout << ent << " " << cli_weight(w) << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"differentiable multi-hop reasoning over symbolic KBs"};
    app.require_subcommand(1);

    std::string config_path;
    std::uint64_t seed = 0;
    auto add_common = [&](CLI::App* sub, bool need_config) {
        auto* opt = sub->add_option("--config", config_path, "JSON config file");
        if (need_config) opt->required();
        sub->add_option("--seed", seed, "RNG seed");
    };

    add_common(app.add_subcommand("gen-grid", "write a grid KB as TSV"), true);
    add_common(app.add_subcommand("gen-questions", "write random walk questions as JSONL"),
               true);
    add_common(app.add_subcommand("bench", "time the follow strategies, CSV on stdout"),
               true);
    add_common(app.add_subcommand("train", "train a model per its task config"), true);
    add_common(app.add_subcommand("eval", "evaluate a model per its task config"), true);

    auto* follow = app.add_subcommand("follow", "run a follow query against a TSV KB");
    std::string kb_path, x_name, r_names, strategy = "naive";
    int hops = 1;
    std::size_t shards = 4, topk = 0;
    follow->add_option("--kb", kb_path, "KB TSV file")->required();
    follow->add_option("--x", x_name, "start entity name")->required();
    follow->add_option("--r", r_names, "relation names, comma separated")->required();
    follow->add_option("-k,--hops", hops, "number of hops");
    follow->add_option("--strategy", strategy, "naive, late, reified, reified-sharded");
    follow->add_option("--shards", shards, "shard count for reified-sharded");
    follow->add_option("--topk", topk, "print only the k best answers");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (app.got_subcommand("gen-grid")) return cmd_gen_grid(load_config(config_path));
        if (app.got_subcommand("gen-questions"))
            return cmd_gen_questions(load_config(config_path), seed);
        if (app.got_subcommand("bench")) return cmd_bench(load_config(config_path), seed);
        if (app.got_subcommand("train"))
            return cmd_train_or_eval(load_config(config_path), seed, true);
        if (app.got_subcommand("eval"))
            return cmd_train_or_eval(load_config(config_path), seed, false);
        if (app.got_subcommand("follow"))
            return cmd_follow(kb_path, x_name, r_names, hops, strategy, shards, topk);
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
