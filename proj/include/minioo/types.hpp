#ifndef MINIOO_TYPES_HPP
#define MINIOO_TYPES_HPP

#include <algorithm>
#include <memory>
#include <set>
#include <string>
#include <vector>

namespace minioo {

using Label = std::string;

struct Type;
using TypePtr = std::shared_ptr<const Type>;

enum class TyTag {
    Var,
    Int,
    Float,
    Bool,
    String,
    Unit,
    Pair,      // args[0], args[1]
    List,      // args[0]
    Fun,       // args[0] -> args[1]
    Action,    // IO args[0]
    Ref,       // Ref args[0]
    Record,    // row
    Union,     // Either args[0] args[1]
    Nominal,   // N name args[0]
    NotFixed,  // NotFixed args[0]
    Named,     // name args...
    Dyn,       // view type of a dynamics-based upcast, args[0]
    LubSeed,   // the type of lubNil
    UnionSeed, // the type of unionNil
};

// Duplicate-free label/type sequence kept sorted by label (canonical order).
class Row {
  public:
    Row() = default;

    // Builds a row from possibly unsorted entries; the caller guarantees
    // label uniqueness (checked by row_extend and friends).
    static Row from_entries(std::vector<std::pair<Label, TypePtr>> entries) {
        std::sort(entries.begin(), entries.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        Row r;
        r.entries_ = std::move(entries);
        return r;
    }

    const std::vector<std::pair<Label, TypePtr>>& entries() const { return entries_; }
    size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }

    const TypePtr* find(const Label& l) const {
        auto it = std::lower_bound(entries_.begin(), entries_.end(), l,
                                   [](const auto& e, const Label& x) { return e.first < x; });
        if (it != entries_.end() && it->first == l) return &it->second;
        return nullptr;
    }
    bool has(const Label& l) const { return find(l) != nullptr; }

    std::set<Label> labels() const {
        std::set<Label> out;
        for (auto& [l, t] : entries_) out.insert(l);
        return out;
    }

  private:
    std::vector<std::pair<Label, TypePtr>> entries_;
};

struct Type {
    TyTag tag = TyTag::Int;
    int var = 0;           // Var
    std::string name;      // Nominal / Named
    std::vector<TypePtr> args;
    Row row;               // Record
};

namespace ty {

inline TypePtr make(TyTag tag) {
    auto t = std::make_shared<Type>();
    t->tag = tag;
    return t;
}

inline TypePtr var(int id) {
    auto t = std::make_shared<Type>();
    t->tag = TyTag::Var;
    t->var = id;
    return t;
}

inline const TypePtr& int_() { static TypePtr t = make(TyTag::Int); return t; }
inline const TypePtr& float_() { static TypePtr t = make(TyTag::Float); return t; }
inline const TypePtr& bool_() { static TypePtr t = make(TyTag::Bool); return t; }
inline const TypePtr& string_() { static TypePtr t = make(TyTag::String); return t; }
inline const TypePtr& unit() { static TypePtr t = make(TyTag::Unit); return t; }
inline const TypePtr& lub_seed() { static TypePtr t = make(TyTag::LubSeed); return t; }
inline const TypePtr& union_seed() { static TypePtr t = make(TyTag::UnionSeed); return t; }

inline TypePtr with_args(TyTag tag, std::vector<TypePtr> args) {
    auto t = std::make_shared<Type>();
    t->tag = tag;
    t->args = std::move(args);
    return t;
}

inline TypePtr pair(TypePtr a, TypePtr b) { return with_args(TyTag::Pair, {a, b}); }
inline TypePtr list(TypePtr a) { return with_args(TyTag::List, {a}); }
inline TypePtr fun(TypePtr a, TypePtr b) { return with_args(TyTag::Fun, {a, b}); }
inline TypePtr action(TypePtr a) { return with_args(TyTag::Action, {a}); }
inline TypePtr ref(TypePtr a) { return with_args(TyTag::Ref, {a}); }
inline TypePtr union_(TypePtr a, TypePtr b) { return with_args(TyTag::Union, {a, b}); }
inline TypePtr not_fixed(TypePtr a) { return with_args(TyTag::NotFixed, {a}); }
inline TypePtr dyn(TypePtr view) { return with_args(TyTag::Dyn, {view}); }

inline TypePtr record(Row row) {
    auto t = std::make_shared<Type>();
    t->tag = TyTag::Record;
    t->row = std::move(row);
    return t;
}

inline TypePtr nominal(std::string name, TypePtr payload) {
    auto t = std::make_shared<Type>();
    t->tag = TyTag::Nominal;
    t->name = std::move(name);
    t->args = {payload};
    return t;
}

inline TypePtr named(std::string name, std::vector<TypePtr> args) {
    auto t = std::make_shared<Type>();
    t->tag = TyTag::Named;
    t->name = std::move(name);
    t->args = std::move(args);
    return t;
}

}  // namespace ty

// Structural equality; type variables compare by id, Named and Nominal
// compare by name plus arguments.
inline bool equal_types(const TypePtr& a, const TypePtr& b) {
    if (a.get() == b.get()) return true;
    if (a->tag != b->tag) return false;
    switch (a->tag) {
        case TyTag::Var:
            return a->var == b->var;
        case TyTag::Int:
        case TyTag::Float:
        case TyTag::Bool:
        case TyTag::String:
        case TyTag::Unit:
        case TyTag::LubSeed:
        case TyTag::UnionSeed:
            return true;
        case TyTag::Record: {
            auto& ea = a->row.entries();
            auto& eb = b->row.entries();
            if (ea.size() != eb.size()) return false;
            for (size_t i = 0; i < ea.size(); ++i) {
                if (ea[i].first != eb[i].first) return false;
                if (!equal_types(ea[i].second, eb[i].second)) return false;
            }
            return true;
        }
        default: {
            if (a->name != b->name) return false;
            if (a->args.size() != b->args.size()) return false;
            for (size_t i = 0; i < a->args.size(); ++i)
                if (!equal_types(a->args[i], b->args[i])) return false;
            return true;
        }
    }
}

inline void collect_vars(const TypePtr& t, std::set<int>& out) {
    if (t->tag == TyTag::Var) {
        out.insert(t->var);
        return;
    }
    for (auto& a : t->args) collect_vars(a, out);
    if (t->tag == TyTag::Record)
        for (auto& [l, ft] : t->row.entries()) collect_vars(ft, out);
}

inline bool contains_var(const TypePtr& t, int v) {
    if (t->tag == TyTag::Var) return t->var == v;
    for (auto& a : t->args)
        if (contains_var(a, v)) return true;
    if (t->tag == TyTag::Record)
        for (auto& [l, ft] : t->row.entries())
            if (contains_var(ft, v)) return true;
    return false;
}

inline bool is_closed(const TypePtr& t) {
    std::set<int> vars;
    collect_vars(t, vars);
    return vars.empty();
}

}  // namespace minioo

#endif
