#ifndef MINIOO_ROWS_HPP
#define MINIOO_ROWS_HPP

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "minioo/types.hpp"

namespace minioo {

// Errors raised by the pure row algebra. The checker turns these into
// spanned diagnostics.
struct RowError : std::runtime_error {
    enum class Kind {
        DuplicateLabel,
        MissingLabel,
        FieldTypeClash,
        NotDeepSubtype,
        UnknownNomination,
    };
    Kind kind;
    Label label;       // offending label, when applicable
    std::string path;  // field path for NotDeepSubtype
    RowError(Kind k, std::string what, Label l = {}, std::string p = {})
        : std::runtime_error(std::move(what)), kind(k), label(std::move(l)), path(std::move(p)) {}
};

// ---------------------------------------------------------------------------
// Row operations
// ---------------------------------------------------------------------------

inline Row row_extend(const Row& row, const Label& l, const TypePtr& t) {
    if (row.has(l))
        throw RowError(RowError::Kind::DuplicateLabel, "duplicate label " + l, l);
    auto entries = row.entries();
    entries.emplace_back(l, t);
    return Row::from_entries(std::move(entries));
}

inline Row row_update(const Row& row, const Label& l, const TypePtr& t) {
    if (!row.has(l))
        throw RowError(RowError::Kind::MissingLabel, "missing label " + l, l);
    auto entries = row.entries();
    for (auto& e : entries)
        if (e.first == l) e.second = t;
    return Row::from_entries(std::move(entries));
}

// Left-biased union: labels of `a` win on collision.
inline Row row_union_left(const Row& a, const Row& b) {
    auto entries = a.entries();
    for (auto& [l, t] : b.entries())
        if (!a.has(l)) entries.emplace_back(l, t);
    return Row::from_entries(std::move(entries));
}

inline std::set<Label> row_intersect(const Row& a, const Row& b) {
    std::set<Label> out;
    for (auto& [l, t] : a.entries())
        if (b.has(l)) out.insert(l);
    return out;
}

inline Row row_project(const Row& row, const std::set<Label>& ls) {
    std::vector<std::pair<Label, TypePtr>> entries;
    for (auto& l : ls) {
        const TypePtr* t = row.find(l);
        if (!t) throw RowError(RowError::Kind::MissingLabel, "missing label " + l, l);
        entries.emplace_back(l, *t);
    }
    return Row::from_entries(std::move(entries));
}

// ---------------------------------------------------------------------------
// Subtyping
// ---------------------------------------------------------------------------

// Width: s <= t iff every field of t appears in s with an identical type.
inline bool width_subtype(const Row& s, const Row& t) {
    for (auto& [l, tt] : t.entries()) {
        const TypePtr* st = s.find(l);
        if (!st || !equal_types(*st, tt)) return false;
    }
    return true;
}

// Depth: structural, with contra-variant function arguments, co-variant
// function results and action payloads, invariant refs, and nominal
// comparison (plus invariant arguments) for Named types.
inline bool depth_subtype(const TypePtr& s, const TypePtr& t) {
    if (s->tag == TyTag::Record && t->tag == TyTag::Record) {
        for (auto& [l, ft] : t->row.entries()) {
            const TypePtr* fs = s->row.find(l);
            if (!fs || !depth_subtype(*fs, ft)) return false;
        }
        return true;
    }
    if (s->tag != t->tag) return false;
    switch (s->tag) {
        case TyTag::Fun:
            return depth_subtype(t->args[0], s->args[0]) &&  // contra
                   depth_subtype(s->args[1], t->args[1]);    // co
        case TyTag::Action:
            return depth_subtype(s->args[0], t->args[0]);
        case TyTag::List:
            return depth_subtype(s->args[0], t->args[0]);
        case TyTag::Pair:
            return depth_subtype(s->args[0], t->args[0]) &&
                   depth_subtype(s->args[1], t->args[1]);
        case TyTag::Ref:
            return equal_types(s->args[0], t->args[0]);  // invariant
        case TyTag::Named:
        case TyTag::Nominal: {
            if (s->name != t->name || s->args.size() != t->args.size()) return false;
            for (size_t i = 0; i < s->args.size(); ++i)
                if (!equal_types(s->args[i], t->args[i])) return false;  // invariant
            return true;
        }
        default:
            return equal_types(s, t);
    }
}

// Width-only least upper bound: the intersection of the label sets, with the
// requirement that shared labels carry identical types.
inline Row lub_row(const Row& a, const Row& b) {
    std::set<Label> shared = row_intersect(a, b);
    for (auto& l : shared) {
        if (!equal_types(*a.find(l), *b.find(l)))
            throw RowError(RowError::Kind::FieldTypeClash,
                           "field " + l + " has clashing types", l);
    }
    return row_project(a, shared);
}

// ---------------------------------------------------------------------------
// Coercion plans for deep narrowing
// ---------------------------------------------------------------------------

struct CoercionPlan;
using PlanPtr = std::shared_ptr<const CoercionPlan>;

struct CoercionPlan {
    enum class Kind { Identity, Project, WrapFun, WrapAction, PerField };
    Kind kind = Kind::Identity;
    std::set<Label> labels;                 // Project
    PlanPtr arg, result;                    // WrapFun (arg + result), WrapAction (result)
    std::map<Label, PlanPtr> field_plans;   // PerField
};

namespace plan {

inline PlanPtr identity() {
    static PlanPtr p = std::make_shared<CoercionPlan>();
    return p;
}
inline PlanPtr project(std::set<Label> ls) {
    auto p = std::make_shared<CoercionPlan>();
    p->kind = CoercionPlan::Kind::Project;
    p->labels = std::move(ls);
    return p;
}
inline PlanPtr wrap_fun(PlanPtr a, PlanPtr r) {
    auto p = std::make_shared<CoercionPlan>();
    p->kind = CoercionPlan::Kind::WrapFun;
    p->arg = std::move(a);
    p->result = std::move(r);
    return p;
}
inline PlanPtr wrap_action(PlanPtr r) {
    auto p = std::make_shared<CoercionPlan>();
    p->kind = CoercionPlan::Kind::WrapAction;
    p->result = std::move(r);
    return p;
}
inline PlanPtr per_field(std::map<Label, PlanPtr> fps) {
    auto p = std::make_shared<CoercionPlan>();
    p->kind = CoercionPlan::Kind::PerField;
    p->field_plans = std::move(fps);
    return p;
}
inline bool is_identity(const PlanPtr& p) { return p->kind == CoercionPlan::Kind::Identity; }

}  // namespace plan

// Builds the value coercion taking `s` to `t`; exists exactly when
// depth_subtype(s, t) holds. The thrown error names the first offending
// position.
inline PlanPtr derive_deep_narrow(const TypePtr& s, const TypePtr& t,
                                  const std::string& path = "") {
    auto bad = [&](const std::string& at) -> RowError {
        return RowError(RowError::Kind::NotDeepSubtype,
                        "not a deep subtype at " + (at.empty() ? std::string("top") : at), "",
                        at);
    };
    if (equal_types(s, t)) return plan::identity();

    if (s->tag == TyTag::Record && t->tag == TyTag::Record) {
        std::map<Label, PlanPtr> fps;
        bool all_identity = true;
        for (auto& [l, ft] : t->row.entries()) {
            const TypePtr* fs = s->row.find(l);
            if (!fs) throw bad(path.empty() ? l : path + "." + l);
            PlanPtr p = derive_deep_narrow(*fs, ft, path.empty() ? l : path + "." + l);
            if (!plan::is_identity(p)) all_identity = false;
            fps[l] = p;
        }
        if (all_identity) {
            // Same field types; only the label set shrinks.
            if (s->row.size() == t->row.size()) return plan::identity();
            return plan::project(t->row.labels());
        }
        // Field coercions plus an implicit projection to t's labels.
        return plan::per_field(std::move(fps));
    }
    if (s->tag != t->tag) throw bad(path);
    switch (s->tag) {
        case TyTag::Fun: {
            PlanPtr a = derive_deep_narrow(t->args[0], s->args[0], path + ".arg");  // contra
            PlanPtr r = derive_deep_narrow(s->args[1], t->args[1], path + ".result");
            if (plan::is_identity(a) && plan::is_identity(r)) return plan::identity();
            return plan::wrap_fun(a, r);
        }
        case TyTag::Action: {
            PlanPtr r = derive_deep_narrow(s->args[0], t->args[0], path + ".result");
            if (plan::is_identity(r)) return plan::identity();
            return plan::wrap_action(r);
        }
        case TyTag::List: {
            // Homogeneous element coercion is not needed by any narrowing the
            // checker emits; require equality.
            throw bad(path);
        }
        default:
            throw bad(path);
    }
}

// ---------------------------------------------------------------------------
// Nominal ancestry
// ---------------------------------------------------------------------------

class NominalGraph {
  public:
    // Parents must already be declared, which keeps the graph acyclic.
    void declare(const std::string& name, std::vector<std::string> parents) {
        for (auto& p : parents) require_known(p);
        parents_[name] = std::move(parents);
    }

    bool declared(const std::string& name) const { return parents_.count(name) > 0; }

    const std::vector<std::string>& parents_of(const std::string& name) const {
        require_known(name);
        return parents_.at(name);
    }

    // Reflexive, transitive closure of the parent relation.
    bool is_ancestor(const std::string& child, const std::string& anc) const {
        require_known(child);
        require_known(anc);
        if (child == anc) return true;
        for (auto& p : parents_.at(child))
            if (is_ancestor(p, anc)) return true;
        return false;
    }

  private:
    void require_known(const std::string& name) const {
        if (!parents_.count(name))
            throw RowError(RowError::Kind::UnknownNomination, "unknown nomination " + name,
                           name);
    }
    std::map<std::string, std::vector<std::string>> parents_;
};

}  // namespace minioo

#endif
