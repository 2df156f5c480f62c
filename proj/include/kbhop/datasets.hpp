#pragma once
// Question datasets as JSON lines, one example per line:
//   {"tokens": [...], "start": "...", "answers": [...], "hops": k}
// plus the token vocabulary, which is fixed by the training split; words
// outside it raise UnknownToken when encoded.

#include <cstdint>
#include <fstream>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "kbhop/errors.hpp"
#include "kbhop/questions.hpp"

namespace kbhop {

struct Example {
    std::vector<std::string> tokens;
    std::string start;
    std::vector<std::string> answers;
    int hops = 0;
};

inline Example to_example(const ChainQuestion& q) {
    return {q.tokens, q.start, {q.answer}, static_cast<int>(q.dirs.size())};
}

inline std::vector<Example> to_examples(const std::vector<ChainQuestion>& qs) {
    std::vector<Example> out;
    out.reserve(qs.size());
    for (const ChainQuestion& q : qs) out.push_back(to_example(q));
    return out;
}

inline void save_examples(const std::vector<Example>& exs, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw IoError("cannot open for write: " + path);
    for (const Example& ex : exs) {
        nlohmann::json j;
        j["tokens"] = ex.tokens;
        j["start"] = ex.start;
        j["answers"] = ex.answers;
        j["hops"] = ex.hops;
        f << j.dump() << '\n';
    }
    if (!f) throw IoError("write failed: " + path);
}

inline std::vector<Example> load_examples(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open: " + path);
    std::vector<Example> out;
    std::string line;
    int line_no = 0;
    while (std::getline(f, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded()) throw ParseError("malformed JSON example", line_no);
        if (!j.is_object() || !j.contains("tokens") || !j["tokens"].is_array() ||
            !j.contains("start") || !j["start"].is_string() || !j.contains("answers") ||
            !j["answers"].is_array() || !j.contains("hops") ||
            !j["hops"].is_number_integer())
            throw ParseError("example needs tokens, start, answers, hops", line_no);
        Example ex;
        for (const auto& tok : j["tokens"]) {
            if (!tok.is_string()) throw ParseError("tokens must be strings", line_no);
            ex.tokens.push_back(tok.get<std::string>());
        }
        ex.start = j["start"].get<std::string>();
        for (const auto& a : j["answers"]) {
            if (!a.is_string()) throw ParseError("answers must be strings", line_no);
            ex.answers.push_back(a.get<std::string>());
        }
        ex.hops = j["hops"].get<int>();
        out.push_back(std::move(ex));
    }
    return out;
}

class Vocab {
public:
    std::int32_t add(const std::string& w) {
        auto it = id_.find(w);
        if (it != id_.end()) return it->second;
        const auto id = static_cast<std::int32_t>(words_.size());
        id_.emplace(w, id);
        words_.push_back(w);
        return id;
    }

    std::int32_t at(const std::string& w) const {
        auto it = id_.find(w);
        if (it == id_.end()) throw UnknownToken("unknown token: " + w);
        return it->second;
    }

    bool has(const std::string& w) const { return id_.count(w) != 0; }
    std::size_t size() const { return words_.size(); }
    const std::string& word(std::int32_t id) const { return words_[id]; }

private:
    std::unordered_map<std::string, std::int32_t> id_;
    std::vector<std::string> words_;
};

inline Vocab vocab_from_examples(const std::vector<Example>& exs) {
    Vocab v;
    for (const Example& ex : exs)
        for (const std::string& w : ex.tokens) v.add(w);
    return v;
}

} // namespace kbhop
