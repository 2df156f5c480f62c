#pragma once
// Typed symbolic KB: entity types with dense per-type indices, typed
// relations, and weighted triples grouped by relation in a canonical order.
// Immutable once built; every index assignment is determined by declaration
// order so two identical builds agree exactly.

#include <algorithm>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "kbhop/coo.hpp"
#include "kbhop/errors.hpp"

namespace kbhop {

using TypeId = std::int32_t;
using RelationId = std::int32_t;
using GroupId = std::int32_t;

struct EntityId {
    TypeId type;
    std::int32_t index; // zero-based within the type
    bool operator==(const EntityId& o) const { return type == o.type && index == o.index; }
};

struct Triple {
    EntityId subj;
    RelationId rel;
    EntityId obj;
    double weight; // > 0; hard KB triples use 1
};

struct EntityType {
    std::string name;
    std::vector<std::string> entity_names; // index -> name
};

struct Relation {
    std::string name;
    TypeId subj_type;
    TypeId obj_type;
    GroupId group;      // signature group (subj_type, obj_type)
    std::int32_t group_index; // position of this relation within its group
};

// Relations sharing a (subj, obj) signature. The group owns the synthetic
// "rel:<subj>-><obj>" entity type that makes relation sets encodable as
// entity-set vectors.
struct RelationGroup {
    std::string name; // "rel:<subj_type>-><obj_type>"
    TypeId subj_type;
    TypeId obj_type;
    std::vector<RelationId> relations; // in declaration order
};

// Dense non-negative vector encoding a weighted entity set of one type.
struct EntitySetVec {
    TypeId type;
    std::vector<double> values;
};

// Same encoding for a weighted set of type-compatible relations; indices are
// group-local (positions within the group's relation list).
struct RelSetVec {
    GroupId group;
    std::vector<double> values;
};

class TypedKb {
public:
    const std::vector<EntityType>& types() const { return types_; }
    const std::vector<Relation>& relations() const { return relations_; }
    const std::vector<RelationGroup>& groups() const { return groups_; }
    // canonical order: sorted by (rel, subj index, obj index)
    const std::vector<Triple>& triples() const { return triples_; }

    std::size_t num_entities() const { return n_entities_; }    // N_E, declared types only
    std::size_t num_relations() const { return relations_.size(); } // N_R
    std::size_t num_triples() const { return triples_.size(); }     // N_T

    std::size_t type_size(TypeId t) const { return types_[t].entity_names.size(); }

    TypeId type_id(const std::string& name) const {
        auto it = type_by_name_.find(name);
        if (it == type_by_name_.end()) throw UnknownName("unknown type: " + name);
        return it->second;
    }

    RelationId relation_id(const std::string& name) const {
        auto it = rel_by_name_.find(name);
        if (it == rel_by_name_.end()) throw UnknownName("unknown relation: " + name);
        return it->second;
    }

    EntityId entity(const std::string& name) const {
        auto it = entity_by_name_.find(name);
        if (it == entity_by_name_.end()) throw UnknownName("unknown entity: " + name);
        return it->second;
    }

    bool has_entity(const std::string& name) const {
        return entity_by_name_.count(name) != 0;
    }

    const std::string& entity_name(EntityId id) const {
        return types_[id.type].entity_names[id.index];
    }

    // Global entity space: all declared types concatenated in declaration
    // order. Used by the reified strategy.
    std::size_t global_index(EntityId id) const {
        return type_offsets_[id.type] + static_cast<std::size_t>(id.index);
    }

    EntityId entity_of_global(std::size_t g) const {
        TypeId t = 0;
        while (t + 1 < static_cast<TypeId>(types_.size()) &&
               type_offsets_[t + 1] <= g)
            ++t;
        return {t, static_cast<std::int32_t>(g - type_offsets_[t])};
    }

    std::size_t type_offset(TypeId t) const { return type_offsets_[t]; }

    // Triples of one relation as a contiguous span of the canonical list.
    std::pair<std::size_t, std::size_t> triple_range(RelationId r) const {
        return {rel_offsets_[r], rel_offsets_[r + 1]};
    }

    friend TypedKb build_kb_named(
        const std::vector<std::pair<std::string, std::vector<std::string>>>& type_decls,
        const std::vector<std::tuple<std::string, std::string, std::string>>& relation_decls,
        const std::vector<std::tuple<std::string, std::string, std::string, double>>& triples);

private:
    std::vector<EntityType> types_;
    std::vector<Relation> relations_;
    std::vector<RelationGroup> groups_;
    std::vector<Triple> triples_;
    std::vector<std::size_t> rel_offsets_;  // relations_.size()+1 prefix sums
    std::vector<std::size_t> type_offsets_; // types_.size()+1 prefix sums
    std::size_t n_entities_ = 0;
    std::unordered_map<std::string, TypeId> type_by_name_;
    std::unordered_map<std::string, RelationId> rel_by_name_;
    std::unordered_map<std::string, EntityId> entity_by_name_;
};

// Full builder: explicit entity name tables per type.
inline TypedKb build_kb_named(
    const std::vector<std::pair<std::string, std::vector<std::string>>>& type_decls,
    const std::vector<std::tuple<std::string, std::string, std::string>>& relation_decls,
    const std::vector<std::tuple<std::string, std::string, std::string, double>>& triples) {
    TypedKb kb;

    for (const auto& [name, entity_names] : type_decls) {
        if (kb.type_by_name_.count(name)) throw DuplicateTriple("type declared twice: " + name);
        TypeId t = static_cast<TypeId>(kb.types_.size());
        kb.type_by_name_[name] = t;
        for (std::size_t i = 0; i < entity_names.size(); ++i) {
            const std::string& en = entity_names[i];
            if (kb.entity_by_name_.count(en))
                throw DuplicateTriple("entity declared twice: " + en);
            kb.entity_by_name_[en] = {t, static_cast<std::int32_t>(i)};
        }
        kb.types_.push_back({name, entity_names});
    }

    kb.type_offsets_.assign(kb.types_.size() + 1, 0);
    for (std::size_t t = 0; t < kb.types_.size(); ++t)
        kb.type_offsets_[t + 1] = kb.type_offsets_[t] + kb.types_[t].entity_names.size();
    kb.n_entities_ = kb.type_offsets_.back();

    std::unordered_map<std::string, GroupId> group_by_name;
    for (const auto& [rname, sname, oname] : relation_decls) {
        if (kb.rel_by_name_.count(rname))
            throw DuplicateTriple("relation declared twice: " + rname);
        TypeId st = kb.type_id(sname);
        TypeId ot = kb.type_id(oname);
        std::string gname = "rel:" + sname + "->" + oname;
        GroupId g;
        auto it = group_by_name.find(gname);
        if (it == group_by_name.end()) {
            g = static_cast<GroupId>(kb.groups_.size());
            group_by_name[gname] = g;
            kb.groups_.push_back({gname, st, ot, {}});
        } else {
            g = it->second;
        }
        RelationId r = static_cast<RelationId>(kb.relations_.size());
        kb.rel_by_name_[rname] = r;
        kb.relations_.push_back(
            {rname, st, ot, g, static_cast<std::int32_t>(kb.groups_[g].relations.size())});
        kb.groups_[g].relations.push_back(r);
    }

    // Resolve, validate, and canonicalize triples.
    struct Key {
        RelationId r;
        std::int32_t s;
        std::int32_t o;
        bool operator<(const Key& k) const {
            if (r != k.r) return r < k.r;
            if (s != k.s) return s < k.s;
            return o < k.o;
        }
        bool operator==(const Key& k) const { return r == k.r && s == k.s && o == k.o; }
    };
    std::vector<std::pair<Key, double>> keyed;
    keyed.reserve(triples.size());
    for (const auto& [sname, rname, oname, w] : triples) {
        RelationId r = kb.relation_id(rname);
        EntityId s = kb.entity(sname);
        EntityId o = kb.entity(oname);
        const Relation& rel = kb.relations_[r];
        if (s.type != rel.subj_type)
            throw TypeMismatch("triple subject " + sname + " violates signature of " + rname);
        if (o.type != rel.obj_type)
            throw TypeMismatch("triple object " + oname + " violates signature of " + rname);
        if (w <= 0.0) throw NegativeWeight("triple weight must be positive: " + rname);
        keyed.push_back({{r, s.index, o.index}, w});
    }
    std::sort(keyed.begin(), keyed.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    kb.rel_offsets_.assign(kb.relations_.size() + 1, 0);
    for (std::size_t i = 0; i < keyed.size(); ++i) {
        if (i > 0 && keyed[i].first == keyed[i - 1].first) {
            // equal-weight duplicates collapse; conflicting weights are an error
            if (keyed[i].second != keyed[i - 1].second)
                throw DuplicateTriple("conflicting weights for duplicate triple in relation " +
                                      kb.relations_[keyed[i].first.r].name);
            continue;
        }
        const Key& k = keyed[i].first;
        const Relation& rel = kb.relations_[k.r];
        kb.triples_.push_back({{rel.subj_type, k.s}, k.r, {rel.obj_type, k.o}, keyed[i].second});
    }
    for (const Triple& t : kb.triples_) kb.rel_offsets_[t.rel + 1]++;
    for (std::size_t r = 0; r < kb.relations_.size(); ++r)
        kb.rel_offsets_[r + 1] += kb.rel_offsets_[r];

    return kb;
}

// Convenience builder with auto-named entities "<type><i>".
inline TypedKb build_kb(
    const std::vector<std::pair<std::string, std::size_t>>& type_decls,
    const std::vector<std::tuple<std::string, std::string, std::string>>& relation_decls,
    const std::vector<std::tuple<std::string, std::string, std::string, double>>& triples) {
    std::vector<std::pair<std::string, std::vector<std::string>>> named;
    named.reserve(type_decls.size());
    for (const auto& [name, size] : type_decls) {
        std::vector<std::string> ents;
        ents.reserve(size);
        for (std::size_t i = 0; i < size; ++i) ents.push_back(name + std::to_string(i));
        named.push_back({name, std::move(ents)});
    }
    return build_kb_named(named, relation_decls, triples);
}

// Relation matrix M_r: shape N_subj_type x N_obj_type, entries are triple
// weights.
inline CooMatrix relation_matrix(const TypedKb& kb, RelationId r) {
    if (r < 0 || r >= static_cast<RelationId>(kb.num_relations()))
        throw UnknownName("invalid relation id");
    const Relation& rel = kb.relations()[r];
    std::vector<CooEntry> entries;
    auto [lo, hi] = kb.triple_range(r);
    entries.reserve(hi - lo);
    for (std::size_t i = lo; i < hi; ++i) {
        const Triple& t = kb.triples()[i];
        entries.push_back({static_cast<std::uint32_t>(t.subj.index),
                           static_cast<std::uint32_t>(t.obj.index), t.weight});
    }
    return CooMatrix::from_entries(kb.type_size(rel.subj_type), kb.type_size(rel.obj_type),
                                   std::move(entries));
}

inline EntitySetVec encode_set(const TypedKb& kb, TypeId type,
                               const std::vector<std::pair<std::string, double>>& members) {
    EntitySetVec v{type, std::vector<double>(kb.type_size(type), 0.0)};
    for (const auto& [name, w] : members) {
        EntityId e = kb.entity(name);
        if (e.type != type)
            throw TypeMismatch("entity " + name + " is not of type " + kb.types()[type].name);
        if (w < 0.0) throw NegativeWeight("negative set weight for " + name);
        v.values[e.index] = w;
    }
    return v;
}

inline RelSetVec encode_rel_set(const TypedKb& kb,
                                const std::vector<std::pair<std::string, double>>& members) {
    if (members.empty()) throw IncompatibleRelations("empty relation set has no group");
    GroupId g = kb.relations()[kb.relation_id(members.front().first)].group;
    RelSetVec v{g, std::vector<double>(kb.groups()[g].relations.size(), 0.0)};
    for (const auto& [name, w] : members) {
        const Relation& rel = kb.relations()[kb.relation_id(name)];
        if (rel.group != g)
            throw IncompatibleRelations("relation " + name + " is not type-compatible with " +
                                        members.front().first);
        if (w < 0.0) throw NegativeWeight("negative set weight for " + name);
        v.values[rel.group_index] = w;
    }
    return v;
}

// k largest-weight entities, ties broken by ascending entity index.
inline std::vector<std::pair<std::string, double>> decode_topk(const TypedKb& kb,
                                                               const EntitySetVec& v,
                                                               std::size_t k) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < v.values.size(); ++i)
        if (v.values[i] != 0.0) idx.push_back(i);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (v.values[a] != v.values[b]) return v.values[a] > v.values[b];
        return a < b;
    });
    if (idx.size() > k) idx.resize(k);
    std::vector<std::pair<std::string, double>> out;
    out.reserve(idx.size());
    for (std::size_t i : idx)
        out.push_back({kb.entity_name({v.type, static_cast<std::int32_t>(i)}), v.values[i]});
    return out;
}

// Same selection over a row in the global entity space.
inline std::vector<std::pair<std::string, double>> decode_topk_global(
    const TypedKb& kb, const std::vector<double>& row, std::size_t k) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < row.size(); ++i)
        if (row[i] != 0.0) idx.push_back(i);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (row[a] != row[b]) return row[a] > row[b];
        return a < b;
    });
    if (idx.size() > k) idx.resize(k);
    std::vector<std::pair<std::string, double>> out;
    out.reserve(idx.size());
    for (std::size_t i : idx) out.push_back({kb.entity_name(kb.entity_of_global(i)), row[i]});
    return out;
}

} // namespace kbhop
