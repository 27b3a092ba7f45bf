#ifndef MINIOO_PRETTY_HPP
#define MINIOO_PRETTY_HPP

#include <cctype>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include "minioo/constraints.hpp"
#include "minioo/types.hpp"

namespace minioo {

// Types render in the record sugar the checker's messages use throughout:
//   Record ( GetX :=: IO Int :*: MoveX :=: (Int -> IO ()) :*: HNil )
// Labels are shown with their first letter capitalised.

inline std::string display_label(const Label& l) {
    if (l.empty()) return l;
    std::string out = l;
    out[0] = (char)std::toupper((unsigned char)out[0]);
    return out;
}

// Names type variables for display: plain variables become a, a1, a2, ...;
// variables that appear as the head of a HasField/Lacks constraint (i.e.
// still-open object rows) become r, r1, ...
class VarNamer {
  public:
    void mark_row_var(int v) { row_vars_.insert(v); }

    std::string name(int v) {
        auto it = names_.find(v);
        if (it != names_.end()) return it->second;
        std::string n;
        if (row_vars_.count(v)) {
            n = row_count_ == 0 ? "r" : "r" + std::to_string(row_count_);
            ++row_count_;
        } else {
            n = plain_count_ == 0 ? "a" : "a" + std::to_string(plain_count_);
            ++plain_count_;
        }
        names_[v] = n;
        return n;
    }

  private:
    std::map<int, std::string> names_;
    std::set<int> row_vars_;
    int plain_count_ = 0;
    int row_count_ = 0;
};

namespace detail {

std::string type_str(const TypePtr& t, VarNamer& nm);

inline std::string type_atom_str(const TypePtr& t, VarNamer& nm) {
    std::string s = type_str(t, nm);
    switch (t->tag) {
        case TyTag::Fun:
        case TyTag::Action:
        case TyTag::Ref:
        case TyTag::Union:
        case TyTag::Nominal:
        case TyTag::NotFixed:
        case TyTag::Dyn:
            return "(" + s + ")";
        case TyTag::Named:
            return t->args.empty() ? s : "(" + s + ")";
        default:
            return s;
    }
}

inline std::string type_str(const TypePtr& t, VarNamer& nm) {
    switch (t->tag) {
        case TyTag::Var: return nm.name(t->var);
        case TyTag::Int: return "Int";
        case TyTag::Float: return "Float";
        case TyTag::Bool: return "Bool";
        case TyTag::String: return "String";
        case TyTag::Unit: return "()";
        case TyTag::LubSeed: return "LubNil";
        case TyTag::UnionSeed: return "UnionNil";
        case TyTag::Pair:
            return "(" + type_str(t->args[0], nm) + ", " + type_str(t->args[1], nm) + ")";
        case TyTag::List: return "[" + type_str(t->args[0], nm) + "]";
        case TyTag::Fun: {
            std::string lhs = type_str(t->args[0], nm);
            if (t->args[0]->tag == TyTag::Fun) lhs = "(" + lhs + ")";
            return lhs + " -> " + type_str(t->args[1], nm);
        }
        case TyTag::Action: return "IO " + type_atom_str(t->args[0], nm);
        case TyTag::Ref: return "Ref " + type_atom_str(t->args[0], nm);
        case TyTag::Union:
            return "Either " + type_atom_str(t->args[0], nm) + " " +
                   type_atom_str(t->args[1], nm);
        case TyTag::Nominal:
            return "N " + t->name + " " + type_atom_str(t->args[0], nm);
        case TyTag::NotFixed: return "NotFixed " + type_atom_str(t->args[0], nm);
        case TyTag::Dyn: return "Dyn " + type_atom_str(t->args[0], nm);
        case TyTag::Named: {
            std::string out = t->name;
            for (auto& a : t->args) out += " " + type_atom_str(a, nm);
            return out;
        }
        case TyTag::Record: {
            std::string out = "Record ( ";
            for (auto& [l, ft] : t->row.entries()) {
                std::string fs = type_str(ft, nm);
                if (ft->tag == TyTag::Fun) fs = "(" + fs + ")";
                out += display_label(l) + " :=: " + fs + " :*: ";
            }
            out += "HNil )";
            return out;
        }
    }
    return "?";
}

}  // namespace detail

inline std::string pretty_type(const TypePtr& t, VarNamer& nm) {
    return detail::type_str(t, nm);
}

inline std::string pretty_type(const TypePtr& t) {
    VarNamer nm;
    return detail::type_str(t, nm);
}

inline std::string pretty_constraint(const Constraint& c, VarNamer& nm) {
    switch (c.kind) {
        case CKind::HasField:
            return "HasField " + display_label(c.label) + " " +
                   detail::type_atom_str(c.types[0], nm) + " " +
                   detail::type_atom_str(c.types[1], nm);
        case CKind::Lacks:
            return "Lacks " + display_label(c.label) + " " +
                   detail::type_atom_str(c.types[0], nm);
        case CKind::ClassNum: return "Num " + detail::type_atom_str(c.types[0], nm);
        case CKind::ClassShow: return "Show " + detail::type_atom_str(c.types[0], nm);
        case CKind::Narrowable:
            return "Narrow " + detail::type_atom_str(c.types[0], nm) + " " +
                   detail::type_atom_str(c.types[1], nm);
        case CKind::DeepNarrowable:
            return "DeepNarrow " + detail::type_atom_str(c.types[0], nm) + " " +
                   detail::type_atom_str(c.types[1], nm);
        case CKind::DownCastable:
            return "DownCast " + detail::type_atom_str(c.types[0], nm) + " " +
                   detail::type_atom_str(c.types[1], nm);
        case CKind::NUpCastTo:
            return "Ancestor _ " + c.name;
        case CKind::RowExtendTo:
            return "ExtendsTo " + display_label(c.label) + " " +
                   detail::type_atom_str(c.types[0], nm) + " " +
                   detail::type_atom_str(c.types[2], nm);
        case CKind::RowUnionTo:
            return "UnionTo " + detail::type_atom_str(c.types[0], nm) + " " +
                   detail::type_atom_str(c.types[1], nm) + " " +
                   detail::type_atom_str(c.types[2], nm);
        default:
            return "Defer " + detail::type_atom_str(c.types[0], nm);
    }
}

// Scheme display: constraints before `=>`, row types in the `:=:`/`:*:`
// sugar. Row-position variables are primed to take `r` names.
inline std::string pretty_scheme(const Scheme& s) {
    VarNamer nm;
    for (auto& c : s.constraints) {
        if ((c.kind == CKind::HasField || c.kind == CKind::Lacks) &&
            c.types[0]->tag == TyTag::Var)
            nm.mark_row_var(c.types[0]->var);
    }
    std::ostringstream o;
    if (!s.constraints.empty()) {
        if (s.constraints.size() > 1) o << "(";
        for (size_t i = 0; i < s.constraints.size(); ++i) {
            if (i) o << ", ";
            o << pretty_constraint(s.constraints[i], nm);
        }
        if (s.constraints.size() > 1) o << ")";
        o << " => ";
    }
    o << detail::type_str(s.body, nm);
    return o.str();
}

}  // namespace minioo

#endif
