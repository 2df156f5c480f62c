#pragma once
// TSV serialization of a TypedKb. One record per line, UTF-8:
//   #type <name> <size>
//   #entity <type> <name>               (optional, one per entity, index order)
//   #rel <name> <subj_type> <obj_type>
//   <subj>\t<rel>\t<obj>\t<weight>      (weight optional, default 1.0)
// #entity records appear only for types whose names differ from the default
// "<type><i>" pattern; when present they must cover the declared size.
// Lines starting with // are comments. Saving writes the canonical triple
// order, so save(load(f)) reproduces a canonically sorted file byte for byte.

#include <fstream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "kbhop/errors.hpp"
#include "kbhop/kb.hpp"

namespace kbhop {

namespace detail {

inline std::string format_weight(double w) {
    std::ostringstream os;
    os.precision(17);
    os << w;
    std::string s = os.str();
    // shortest representation that round-trips
    for (int prec = 1; prec < 17; ++prec) {
        std::ostringstream t;
        t.precision(prec);
        t << w;
        if (std::stod(t.str()) == w) return t.str();
    }
    return s;
}

inline bool has_default_names(const EntityType& t) {
    for (std::size_t i = 0; i < t.entity_names.size(); ++i)
        if (t.entity_names[i] != t.name + std::to_string(i)) return false;
    return true;
}

} // namespace detail

inline void save_kb_tsv(const TypedKb& kb, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open for write: " + path);
    for (const EntityType& t : kb.types())
        f << "#type " << t.name << " " << t.entity_names.size() << "\n";
    for (const EntityType& t : kb.types()) {
        if (detail::has_default_names(t)) continue;
        for (const std::string& en : t.entity_names)
            f << "#entity " << t.name << " " << en << "\n";
    }
    for (const Relation& r : kb.relations())
        f << "#rel " << r.name << " " << kb.types()[r.subj_type].name << " "
          << kb.types()[r.obj_type].name << "\n";
    for (const Triple& t : kb.triples())
        f << kb.entity_name(t.subj) << "\t" << kb.relations()[t.rel].name << "\t"
          << kb.entity_name(t.obj) << "\t" << detail::format_weight(t.weight) << "\n";
    if (!f) throw IoError("write failed: " + path);
}

inline TypedKb load_kb_tsv(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open: " + path);
    std::vector<std::pair<std::string, std::size_t>> type_decls;
    std::unordered_map<std::string, std::vector<std::string>> entity_names;
    std::vector<std::tuple<std::string, std::string, std::string>> rel_decls;
    std::vector<std::tuple<std::string, std::string, std::string, double>> triples;
    std::string line;
    int line_no = 0;
    while (std::getline(f, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line.size() >= 2 && line[0] == '/' && line[1] == '/') continue;
        if (line[0] == '#') {
            std::istringstream is(line);
            std::string tag;
            is >> tag;
            if (tag == "#type") {
                std::string name;
                long long size = -1;
                is >> name >> size;
                if (name.empty() || size < 0)
                    throw ParseError("malformed #type declaration", line_no);
                type_decls.push_back({name, static_cast<std::size_t>(size)});
            } else if (tag == "#entity") {
                std::string tname;
                is >> tname;
                std::string rest;
                std::getline(is, rest);
                if (!rest.empty() && rest.front() == ' ') rest.erase(0, 1);
                if (tname.empty() || rest.empty())
                    throw ParseError("malformed #entity declaration", line_no);
                entity_names[tname].push_back(rest);
            } else if (tag == "#rel") {
                std::string name, st, ot;
                is >> name >> st >> ot;
                if (name.empty() || st.empty() || ot.empty())
                    throw ParseError("malformed #rel declaration", line_no);
                rel_decls.push_back({name, st, ot});
            } else {
                throw ParseError("unknown declaration " + tag, line_no);
            }
            continue;
        }
        // triple line: tab separated
        std::vector<std::string> fields;
        std::size_t start = 0;
        while (true) {
            std::size_t tab = line.find('\t', start);
            if (tab == std::string::npos) {
                fields.push_back(line.substr(start));
                break;
            }
            fields.push_back(line.substr(start, tab - start));
            start = tab + 1;
        }
        if (fields.size() != 3 && fields.size() != 4)
            throw ParseError("triple line needs 3 or 4 tab-separated fields", line_no);
        double w = 1.0;
        if (fields.size() == 4) {
            std::size_t used = 0;
            try {
                w = std::stod(fields[3], &used);
            } catch (const std::exception&) {
                throw ParseError("malformed weight field \"" + fields[3] + "\"", line_no);
            }
            if (used != fields[3].size())
                throw ParseError("malformed weight field \"" + fields[3] + "\"", line_no);
        }
        triples.push_back({fields[0], fields[1], fields[2], w});
    }

    std::vector<std::pair<std::string, std::vector<std::string>>> named_decls;
    named_decls.reserve(type_decls.size());
    for (const auto& [name, size] : type_decls) {
        auto it = entity_names.find(name);
        if (it == entity_names.end()) {
            std::vector<std::string> ents;
            ents.reserve(size);
            for (std::size_t i = 0; i < size; ++i) ents.push_back(name + std::to_string(i));
            named_decls.push_back({name, std::move(ents)});
        } else {
            if (it->second.size() != size)
                throw ParseError("#entity count for type " + name + " does not match its size",
                                 line_no);
            named_decls.push_back({name, std::move(it->second)});
            entity_names.erase(it);
        }
    }
    for (const auto& [tname, names] : entity_names)
        throw ParseError("#entity for undeclared type " + tname, line_no);

    // signature violations surface as the build_kb errors
    return build_kb_named(named_decls, rel_decls, triples);
}

} // namespace kbhop
