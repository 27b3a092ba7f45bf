#ifndef MINIOO_INFER_HPP
#define MINIOO_INFER_HPP

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "minioo/ast.hpp"
#include "minioo/constraints.hpp"
#include "minioo/parser.hpp"
#include "minioo/pretty.hpp"
#include "minioo/rows.hpp"
#include "minioo/types.hpp"

namespace minioo {

// Facts the checker hands to the evaluator, keyed by expression node id.
struct NodeAnn {
    bool float_literal = false;
    std::optional<std::set<Label>> narrow_labels;   // narrow / self-view restriction
    PlanPtr plan;                                   // deepNarrow coercion
    std::optional<std::set<int>> down_branches;     // union branches matching the target
    int down_branch_count = 0;
    std::optional<std::set<Label>> dyn_view_labels; // dynUpCast view
    TypePtr dyn_source;                             // dynUpCast ground source type
    TypePtr dyn_target;                             // dynDownCast ground target type
    std::optional<std::set<Label>> lub_labels;      // lubCons projection
    bool lub_singleton = false;
    std::optional<std::set<Label>> row_labels;      // checker's row for record nodes
};

using AnnMap = std::map<int, NodeAnn>;

namespace detail {

struct TypeDeclInfo {
    std::vector<std::string> params;
    TypeExprPtr body;
    bool recursive = false;
};

inline bool mentions_type(const TypeExprPtr& t, const std::string& name) {
    if (!t) return false;
    if (t->kind == TyExprKind::Name && t->name == name) return true;
    for (auto& a : t->args)
        if (mentions_type(a, name)) return true;
    for (auto& [l, ft] : t->fields)
        if (mentions_type(ft, name)) return true;
    return false;
}

// Variables that occur anywhere inside a function type in `t`. Such
// variables stay polymorphic under Num defaulting; a generator's coordinate
// type is the archetypal case.
inline void vars_under_fun(const TypePtr& t, bool inside_fun, std::set<int>& out) {
    if (t->tag == TyTag::Var) {
        if (inside_fun) out.insert(t->var);
        return;
    }
    bool in = inside_fun || t->tag == TyTag::Fun;
    for (auto& a : t->args) vars_under_fun(a, in, out);
    if (t->tag == TyTag::Record)
        for (auto& [l, ft] : t->row.entries()) vars_under_fun(ft, in, out);
}

}  // namespace detail

struct InferOptions {
    bool num_defaulting = true;
};

class Inferencer {
  public:
    Inferencer(NameTable& names, AnnMap& anns, InferOptions opts = {})
        : names_(names), anns_(anns), opts_(opts) {}

    // ------------------------------------------------------------- programs

    // Infers every top-level binding in order. Throws TypeError on the first
    // failure; callers that want to keep going catch per binding via
    // infer_decl.
    std::vector<std::pair<std::string, Scheme>> infer_program(const Program& p) {
        std::vector<std::pair<std::string, Scheme>> out;
        for (auto& d : p.decls) {
            auto r = infer_decl(d);
            if (r) out.push_back(*r);
        }
        return out;
    }

    // Processes one declaration; returns a scheme for bindings.
    std::optional<std::pair<std::string, Scheme>> infer_decl(const Decl& d) {
        switch (d.kind) {
            case DeclKind::Label:
                return std::nullopt;
            case DeclKind::Nominal:
                try {
                    nominals_.declare(d.name, d.parents);
                } catch (const RowError& e) {
                    raise(ErrorKind::NotAncestor, d.span, e.what());
                }
                return std::nullopt;
            case DeclKind::TypeSyn: {
                detail::TypeDeclInfo info;
                info.params = d.params;
                info.body = d.type_body;
                info.recursive = detail::mentions_type(d.type_body, d.name);
                type_decls_[d.name] = info;
                // Trial elaboration catches arity and label mistakes early;
                // a failed declaration must not stay registered.
                try {
                    std::map<std::string, TypePtr> scope;
                    for (auto& p : d.params) scope[p] = fresh();
                    elaborate(d.type_body, scope);
                } catch (...) {
                    type_decls_.erase(d.name);
                    throw;
                }
                return std::nullopt;
            }
            case DeclKind::Binding: {
                Scheme s = infer_binding(d);
                env_[d.name] = s;
                return std::make_pair(d.name, s);
            }
        }
        return std::nullopt;
    }

    // Infers an expression in the current global environment (REPL use).
    // The returned scheme is finalized the same way a binding would be.
    Scheme infer_repl_expr(const ExprPtr& e) {
        pending_.clear();
        literal_vars_.clear();
        record_nodes_.clear();
        LocalEnv locals;
        TypePtr t = infer_expr(locals, e);
        return finalize(t, e->span);
    }

    const Scheme* lookup(const std::string& name) const {
        auto it = env_.find(name);
        return it == env_.end() ? nullptr : &it->second;
    }
    void bind_global(const std::string& name, Scheme s) { env_[name] = std::move(s); }
    const NominalGraph& nominals() const { return nominals_; }

    // Instantiation test: would `fix`/`new` of this generator typecheck?
    // True when every field demanded of self is provided by the produced
    // record. Collects all missing labels into one NotConcrete error.
    bool check_concrete(const Scheme& g) {
        auto saved_subst = subst_;
        auto saved_pending = pending_;
        bool ok = true;
        std::set<Label> missing;
        try {
            std::vector<Constraint> inst;
            TypePtr body = instantiate(g, SourceSpan{}, &inst);
            for (auto& c : inst) pending_.push_back(c);
            // Walk past leading constructor arguments to `self -> IO payload`.
            TypePtr t = resolve(body);
            while (t->tag == TyTag::Fun && resolve(t->args[1])->tag == TyTag::Fun)
                t = resolve(t->args[1]);
            if (t->tag != TyTag::Fun)
                throw TypeError({ErrorKind::NotConcrete, {}, "not an object generator type"});
            TypePtr self_ty = t->args[0];
            TypePtr payload = fresh();
            unify(t->args[1], ty::action(payload), SourceSpan{});
            unify(self_ty, payload, SourceSpan{});
            solve_fixpoint(&missing);
        } catch (const TypeError&) {
            ok = false;
        }
        if (!missing.empty()) ok = false;
        subst_ = std::move(saved_subst);
        pending_ = std::move(saved_pending);
        last_not_concrete_ = missing;
        return ok;
    }
    const std::set<Label>& last_not_concrete() const { return last_not_concrete_; }

    TypePtr apply_subst(const TypePtr& t) const { return deep_resolve(t); }

    // Elaborates a surface type expression in the declared type environment
    // (annotation variables become fresh unification variables).
    TypePtr elaborate_surface(const TypeExprPtr& t) {
        std::map<std::string, TypePtr> scope;
        return elaborate(t, scope);
    }

    // ------------------------------------------------------------ bindings

    Scheme infer_binding(const Decl& d) {
        pending_.clear();
        literal_vars_.clear();
        record_nodes_.clear();
        LocalEnv locals;
        // The binding may recurse into itself monomorphically.
        TypePtr self_ty = fresh();
        locals.push(d.name, self_ty);
        std::vector<TypePtr> param_tys;
        for (auto& p : d.params) {
            TypePtr pt = fresh();
            param_tys.push_back(pt);
            locals.push(p, pt);
        }
        TypePtr body_ty = infer_expr(locals, d.expr_body);
        TypePtr fn_ty = body_ty;
        for (auto it = param_tys.rbegin(); it != param_tys.rend(); ++it)
            fn_ty = ty::fun(*it, fn_ty);
        unify(self_ty, fn_ty, d.span);
        return finalize(fn_ty, d.span);
    }

    // ------------------------------------------------------------- unifier

    TypePtr resolve(TypePtr t) const {
        while (t->tag == TyTag::Var) {
            auto it = subst_.find(t->var);
            if (it == subst_.end()) break;
            t = it->second;
        }
        return t;
    }

    TypePtr deep_resolve(const TypePtr& t0) const {
        TypePtr t = resolve(t0);
        switch (t->tag) {
            case TyTag::Var:
                return t;
            case TyTag::Record: {
                std::vector<std::pair<Label, TypePtr>> entries;
                for (auto& [l, ft] : t->row.entries()) entries.emplace_back(l, deep_resolve(ft));
                return ty::record(Row::from_entries(std::move(entries)));
            }
            default: {
                if (t->args.empty()) return t;
                auto copy = std::make_shared<Type>(*t);
                for (auto& a : copy->args) a = deep_resolve(a);
                return copy;
            }
        }
    }

    void unify(TypePtr a, TypePtr b, const SourceSpan& span) {
        a = resolve(a);
        b = resolve(b);
        if (a->tag == TyTag::Var) {
            if (b->tag == TyTag::Var && a->var == b->var) return;
            occurs_check(a->var, b, span);
            subst_[a->var] = b;
            return;
        }
        if (b->tag == TyTag::Var) {
            occurs_check(b->var, a, span);
            subst_[b->var] = a;
            return;
        }
        if (a->tag != b->tag) mismatch(a, b, span);
        switch (a->tag) {
            case TyTag::Int:
            case TyTag::Float:
            case TyTag::Bool:
            case TyTag::String:
            case TyTag::Unit:
            case TyTag::LubSeed:
            case TyTag::UnionSeed:
                return;
            case TyTag::Record: {
                auto la = a->row.labels();
                auto lb = b->row.labels();
                if (la != lb) record_mismatch(a, b, span);
                for (auto& [l, ft] : a->row.entries()) unify(ft, *b->row.find(l), span);
                return;
            }
            case TyTag::Nominal:
            case TyTag::Named:
                if (a->name != b->name || a->args.size() != b->args.size())
                    mismatch(a, b, span);
                for (size_t i = 0; i < a->args.size(); ++i) unify(a->args[i], b->args[i], span);
                return;
            default:
                if (a->args.size() != b->args.size()) mismatch(a, b, span);
                for (size_t i = 0; i < a->args.size(); ++i) unify(a->args[i], b->args[i], span);
                return;
        }
    }

    TypePtr fresh() { return ty::var(next_var_++); }

  private:
    // ------------------------------------------------------------- plumbing

    struct LocalEnv {
        std::vector<std::pair<std::string, TypePtr>> frames;
        void push(const std::string& n, TypePtr t) { frames.emplace_back(n, std::move(t)); }
        void pop(size_t n) { frames.resize(n); }
        size_t mark() const { return frames.size(); }
        const TypePtr* find(const std::string& n) const {
            for (auto it = frames.rbegin(); it != frames.rend(); ++it)
                if (it->first == n) return &it->second;
            return nullptr;
        }
    };

    NameTable& names_;
    AnnMap& anns_;
    InferOptions opts_;
    std::map<std::string, Scheme> env_;
    std::map<std::string, detail::TypeDeclInfo> type_decls_;
    NominalGraph nominals_;
    std::unordered_map<int, TypePtr> subst_;
    std::vector<Constraint> pending_;
    std::map<int, TypePtr> literal_vars_;  // int literal node -> its type var
    std::map<int, TypePtr> record_nodes_;  // record-op node -> result type
    std::set<Label> last_not_concrete_;
    int next_var_ = 1;

    [[noreturn]] void raise(ErrorKind k, const SourceSpan& sp, const std::string& msg) const {
        throw TypeError({k, sp, msg});
    }

    void occurs_check(int v, const TypePtr& t, const SourceSpan& span) const {
        TypePtr full = deep_resolve(t);
        if (contains_var(full, v)) {
            VarNamer nm;
            raise(ErrorKind::InfiniteType, span,
                  "cannot construct the infinite type: " + nm.name(v) + " = " +
                      pretty_type(full, nm));
        }
    }

    [[noreturn]] void mismatch(const TypePtr& a, const TypePtr& b, const SourceSpan& span) const {
        VarNamer nm;
        raise(ErrorKind::Mismatch, span,
              "type mismatch: " + pretty_type(deep_resolve(a), nm) + " vs " +
                  pretty_type(deep_resolve(b), nm));
    }

    [[noreturn]] void record_mismatch(const TypePtr& a, const TypePtr& b,
                                      const SourceSpan& span) const {
        auto la = a->row.labels();
        auto lb = b->row.labels();
        std::string only_a, only_b;
        for (auto& l : la)
            if (!lb.count(l)) only_a += (only_a.empty() ? "" : ", ") + l;
        for (auto& l : lb)
            if (!la.count(l)) only_b += (only_b.empty() ? "" : ", ") + l;
        std::string msg = "record types do not match";
        if (!only_a.empty()) msg += "; missing method " + only_a;
        if (!only_b.empty()) msg += "; missing method " + only_b;
        VarNamer nm;
        msg += " (" + pretty_type(deep_resolve(a), nm) + " vs " +
               pretty_type(deep_resolve(b), nm) + ")";
        raise(ErrorKind::Mismatch, span, msg);
    }

    void emit(Constraint c) { pending_.push_back(std::move(c)); }

    Constraint make_c(CKind k, std::vector<TypePtr> ts, const SourceSpan& sp, int node = 0,
                      Label label = {}, std::string name = {}) {
        Constraint c;
        c.kind = k;
        c.types = std::move(ts);
        c.span = sp;
        c.node_id = node;
        c.label = std::move(label);
        c.name = std::move(name);
        return c;
    }

    // --------------------------------------------------------- elaboration

    TypePtr elaborate(const TypeExprPtr& t, std::map<std::string, TypePtr>& scope) {
        switch (t->kind) {
            case TyExprKind::Var: {
                auto it = scope.find(t->name);
                if (it != scope.end()) return it->second;
                TypePtr v = fresh();
                scope[t->name] = v;
                return v;
            }
            case TyExprKind::Unit:
                return ty::unit();
            case TyExprKind::Fun:
                return ty::fun(elaborate(t->args[0], scope), elaborate(t->args[1], scope));
            case TyExprKind::List:
                return ty::list(elaborate(t->args[0], scope));
            case TyExprKind::Nominal:
                return ty::nominal(t->name, elaborate(t->args[0], scope));
            case TyExprKind::Record: {
                std::vector<std::pair<Label, TypePtr>> entries;
                std::set<Label> seen;
                for (auto& [l, ft] : t->fields) {
                    if (!seen.insert(l).second)
                        raise(ErrorKind::DuplicateLabel, t->span,
                              "duplicate label " + l + " in record type");
                    entries.emplace_back(l, elaborate(ft, scope));
                }
                return ty::record(Row::from_entries(std::move(entries)));
            }
            case TyExprKind::Name: {
                auto arity_check = [&](size_t want) {
                    if (t->args.size() != want)
                        raise(ErrorKind::Mismatch, t->span,
                              "type " + t->name + " expects " + std::to_string(want) +
                                  " argument(s)");
                };
                if (t->name == "Int") { arity_check(0); return ty::int_(); }
                if (t->name == "Float") { arity_check(0); return ty::float_(); }
                if (t->name == "Bool") { arity_check(0); return ty::bool_(); }
                if (t->name == "String") { arity_check(0); return ty::string_(); }
                if (t->name == "IO") { arity_check(1); return ty::action(elaborate(t->args[0], scope)); }
                if (t->name == "Ref") { arity_check(1); return ty::ref(elaborate(t->args[0], scope)); }
                if (t->name == "Dyn") { arity_check(1); return ty::dyn(elaborate(t->args[0], scope)); }
                if (t->name == "Either") {
                    arity_check(2);
                    return ty::union_(elaborate(t->args[0], scope), elaborate(t->args[1], scope));
                }
                auto it = type_decls_.find(t->name);
                if (it == type_decls_.end())
                    raise(ErrorKind::UnboundName, t->span, "unknown type name " + t->name);
                const auto& info = it->second;
                arity_check(info.params.size());
                std::vector<TypePtr> args;
                for (auto& a : t->args) args.push_back(elaborate(a, scope));
                if (info.recursive) return ty::named(t->name, std::move(args));
                std::map<std::string, TypePtr> inner;
                for (size_t i = 0; i < info.params.size(); ++i) inner[info.params[i]] = args[i];
                return elaborate(info.body, inner);
            }
        }
        raise(ErrorKind::ParseError, t->span, "malformed type expression");
    }

    TypePtr elaborate_annotation(const TypeExprPtr& t) {
        std::map<std::string, TypePtr> scope;  // annotation variables are local
        return elaborate(t, scope);
    }

    // Unfolds one level of an iso-recursive named type.
    TypePtr unfold_named(const TypePtr& t) {
        const auto& info = type_decls_.at(t->name);
        std::map<std::string, TypePtr> scope;
        for (size_t i = 0; i < info.params.size(); ++i) scope[info.params[i]] = t->args[i];
        // Guard: while elaborating the body, the recursive occurrence stays
        // Named because info.recursive is true for this declaration.
        return elaborate(info.body, scope);
    }

    // Resolves through Named synonyms to expose a structural head.
    TypePtr normalize_head(TypePtr t) {
        t = resolve(t);
        int fuel = 32;
        while (t->tag == TyTag::Named && fuel-- > 0) t = resolve(unfold_named(t));
        return t;
    }

    // ------------------------------------------------------------ builtins

    TypePtr builtin_type(Builtin b, const SourceSpan& sp, int node_id) {
        auto v = [&] { return fresh(); };
        switch (b) {
            case Builtin::Return: {
                TypePtr a = v();
                return ty::fun(a, ty::action(a));
            }
            case Builtin::NewRef: {
                TypePtr a = v();
                return ty::fun(a, ty::action(ty::ref(a)));
            }
            case Builtin::ReadRef: {
                TypePtr a = v();
                return ty::fun(ty::ref(a), ty::action(a));
            }
            case Builtin::WriteRef: {
                TypePtr a = v();
                return ty::fun(ty::ref(a), ty::fun(a, ty::action(ty::unit())));
            }
            case Builtin::ModifyRef: {
                TypePtr a = v();
                return ty::fun(ty::ref(a), ty::fun(ty::fun(a, a), ty::action(ty::unit())));
            }
            case Builtin::Print:
            case Builtin::PutStr:
            case Builtin::PutStrLn: {
                TypePtr a = v();
                emit(make_c(CKind::ClassShow, {a}, sp));
                return ty::fun(a, ty::action(ty::unit()));
            }
            case Builtin::FailIO: {
                TypePtr a = v();
                return ty::fun(ty::string_(), ty::action(a));
            }
            case Builtin::Abs: {
                TypePtr a = v();
                emit(make_c(CKind::ClassNum, {a}, sp));
                return ty::fun(a, a);
            }
            case Builtin::Maybe: {
                TypePtr a = v(), b = v();
                return ty::fun(b, ty::fun(ty::fun(a, b),
                                          ty::fun(ty::union_(a, ty::unit()), b)));
            }
            case Builtin::MapM: {
                TypePtr a = v(), b = v();
                return ty::fun(ty::fun(a, ty::action(b)),
                               ty::fun(ty::list(a), ty::action(ty::unit())));
            }
            case Builtin::Fix: {
                TypePtr a = v();
                return ty::fun(ty::fun(a, ty::action(a)), ty::action(a));
            }
            case Builtin::New: {
                TypePtr a = v();
                return ty::fun(ty::fun(ty::not_fixed(a), ty::action(ty::not_fixed(a))),
                               ty::action(a));
            }
            case Builtin::Construct: {
                TypePtr a = v(), b = v();
                emit(make_c(CKind::RecordResult, {b}, sp));
                return ty::fun(ty::not_fixed(a),
                               ty::fun(ty::fun(a, b), ty::action(ty::not_fixed(b))));
            }
            case Builtin::LubNil:
                return ty::lub_seed();
            case Builtin::UnionNil:
                return ty::union_seed();
            case Builtin::LubCons: {
                TypePtr h = v(), t = v(), r = v();
                emit(make_c(CKind::LubConsTo, {h, t, r}, sp, node_id));
                return ty::fun(h, ty::fun(t, r));
            }
            case Builtin::UnionCons: {
                TypePtr h = v(), t = v(), r = v();
                emit(make_c(CKind::UnionConsTo, {h, t, r}, sp, node_id));
                return ty::fun(h, ty::fun(t, r));
            }
            case Builtin::Anonymize: {
                TypePtr a = v(), b = v();
                emit(make_c(CKind::AnonymizeTo, {a, b}, sp));
                return ty::fun(a, b);
            }
        }
        raise(ErrorKind::UnboundName, sp, "unknown builtin");
    }

    // ----------------------------------------------------------- inference

    TypePtr instantiate(const Scheme& s, const SourceSpan& sp,
                        std::vector<Constraint>* emit_to = nullptr) {
        std::unordered_map<int, TypePtr> fresh_map;
        for (int q : s.quantified) fresh_map[q] = fresh();
        TypePtr body = substitute(s.body, fresh_map);
        for (auto c : s.constraints) {
            for (auto& t : c.types) t = substitute(t, fresh_map);
            c.span = sp;
            c.node_id = 0;  // instantiated copies never feed annotations
            if (emit_to) emit_to->push_back(std::move(c));
            else pending_.push_back(std::move(c));
        }
        return body;
    }

    TypePtr substitute(const TypePtr& t, const std::unordered_map<int, TypePtr>& m) {
        switch (t->tag) {
            case TyTag::Var: {
                auto it = m.find(t->var);
                return it == m.end() ? t : it->second;
            }
            case TyTag::Record: {
                std::vector<std::pair<Label, TypePtr>> entries;
                for (auto& [l, ft] : t->row.entries()) entries.emplace_back(l, substitute(ft, m));
                return ty::record(Row::from_entries(std::move(entries)));
            }
            default: {
                if (t->args.empty()) return t;
                auto copy = std::make_shared<Type>(*t);
                for (auto& a : copy->args) a = substitute(a, m);
                return copy;
            }
        }
    }

    TypePtr infer_expr(LocalEnv& locals, const ExprPtr& e) {
        switch (e->kind) {
            case ExprKind::IntLit: {
                TypePtr a = fresh();
                emit(make_c(CKind::ClassNum, {a}, e->span));
                literal_vars_[e->node_id] = a;
                return a;
            }
            case ExprKind::FloatLit:
                return ty::float_();
            case ExprKind::BoolLit:
                return ty::bool_();
            case ExprKind::StringLit:
                return ty::string_();
            case ExprKind::UnitLit:
                return ty::unit();
            case ExprKind::PairLit:
                return ty::pair(infer_expr(locals, e->children[0]),
                                infer_expr(locals, e->children[1]));
            case ExprKind::ListLit: {
                TypePtr elem = fresh();
                for (auto& c : e->children) unify(infer_expr(locals, c), elem, c->span);
                return ty::list(elem);
            }
            case ExprKind::Var: {
                if (const TypePtr* t = locals.find(e->str_val)) return *t;
                if (const Scheme* s = lookup(e->str_val)) return instantiate(*s, e->span);
                raise(ErrorKind::UnboundName, e->span, "unbound name " + e->str_val);
            }
            case ExprKind::BuiltinRef:
                return builtin_type(e->builtin, e->span, e->node_id);
            case ExprKind::Lambda: {
                size_t m = locals.mark();
                std::vector<TypePtr> ps;
                for (auto& p : e->names) {
                    TypePtr pt = fresh();
                    ps.push_back(pt);
                    locals.push(p, pt);
                }
                TypePtr body = infer_expr(locals, e->children[0]);
                locals.pop(m);
                for (auto it = ps.rbegin(); it != ps.rend(); ++it) body = ty::fun(*it, body);
                return body;
            }
            case ExprKind::Apply: {
                TypePtr tf = infer_expr(locals, e->children[0]);
                TypePtr ta = infer_expr(locals, e->children[1]);
                TypePtr r = fresh();
                unify(tf, ty::fun(ta, r), e->span);
                return r;
            }
            case ExprKind::Do: {
                size_t m = locals.mark();
                TypePtr result = ty::unit();
                for (size_t i = 0; i < e->stmts.size(); ++i) {
                    const Stmt& st = e->stmts[i];
                    bool last = i + 1 == e->stmts.size();
                    switch (st.kind) {
                        case StmtKind::Bind: {
                            TypePtr te = infer_expr(locals, st.expr);
                            TypePtr v = fresh();
                            unify(te, ty::action(v), st.span);
                            if (st.name != "_") locals.push(st.name, v);
                            break;
                        }
                        case StmtKind::Let: {
                            TypePtr tv = infer_expr(locals, st.expr);
                            if (st.name != "_") locals.push(st.name, tv);
                            break;
                        }
                        case StmtKind::Expr: {
                            TypePtr te = infer_expr(locals, st.expr);
                            TypePtr v = fresh();
                            unify(te, ty::action(v), st.span);
                            if (last) result = v;
                            break;
                        }
                    }
                }
                locals.pop(m);
                return ty::action(result);
            }
            case ExprKind::If: {
                unify(infer_expr(locals, e->children[0]), ty::bool_(), e->children[0]->span);
                TypePtr t = infer_expr(locals, e->children[1]);
                unify(t, infer_expr(locals, e->children[2]), e->span);
                return t;
            }
            case ExprKind::FieldGet: {
                TypePtr t = infer_expr(locals, e->children[0]);
                TypePtr v = fresh();
                emit(make_c(CKind::HasField, {t, v}, e->span, e->node_id, e->label));
                return v;
            }
            case ExprKind::BinOp: {
                TypePtr a = infer_expr(locals, e->children[0]);
                TypePtr b = infer_expr(locals, e->children[1]);
                unify(a, b, e->span);
                if (e->label == "==") {
                    emit(make_c(CKind::ClassShow, {a}, e->span));
                    return ty::bool_();
                }
                emit(make_c(CKind::ClassNum, {a}, e->span));
                return a;
            }
            case ExprKind::RecordEmpty:
                return ty::record(Row{});
            case ExprKind::RecordExtend: {
                TypePtr tv = infer_expr(locals, e->children[0]);
                TypePtr tb = infer_expr(locals, e->children[1]);
                TypePtr r = fresh();
                emit(make_c(CKind::Lacks, {tb}, e->span, 0, e->label));
                emit(make_c(CKind::RowExtendTo, {tb, tv, r}, e->span, e->node_id, e->label));
                record_nodes_[e->node_id] = r;
                return r;
            }
            case ExprKind::RecordUpdate: {
                TypePtr tv = infer_expr(locals, e->children[0]);
                TypePtr tb = infer_expr(locals, e->children[1]);
                // Type-preserving: the new field type unifies with the old.
                emit(make_c(CKind::HasField, {tb, tv}, e->span, e->node_id, e->label));
                record_nodes_[e->node_id] = tb;
                return tb;
            }
            case ExprKind::RecordUnion: {
                TypePtr ta = infer_expr(locals, e->children[0]);
                TypePtr tb = infer_expr(locals, e->children[1]);
                TypePtr r = fresh();
                emit(make_c(CKind::RowUnionTo, {ta, tb, r}, e->span, e->node_id));
                record_nodes_[e->node_id] = r;
                return r;
            }
            case ExprKind::Narrow: {
                TypePtr ts = infer_expr(locals, e->children[0]);
                TypePtr tgt = elaborate_annotation(e->tyexpr);
                TypePtr tgt_head = normalize_head(tgt);
                if (tgt_head->tag != TyTag::Record)
                    raise(ErrorKind::NotNarrowable, e->span,
                          "narrow target must be a record type");
                anns_[e->node_id].narrow_labels = tgt_head->row.labels();
                emit(make_c(CKind::Narrowable, {ts, tgt}, e->span, e->node_id));
                return tgt;
            }
            case ExprKind::DeepNarrow: {
                TypePtr ts = infer_expr(locals, e->children[0]);
                TypePtr tgt = elaborate_annotation(e->tyexpr);
                emit(make_c(CKind::DeepNarrowable, {ts, tgt}, e->span, e->node_id));
                return tgt;
            }
            case ExprKind::DownCast: {
                TypePtr ts = infer_expr(locals, e->children[0]);
                TypePtr tgt = elaborate_annotation(e->tyexpr);
                emit(make_c(CKind::DownCastable, {ts, tgt}, e->span, e->node_id));
                return ty::union_(tgt, ty::unit());
            }
            case ExprKind::DynUpCast: {
                TypePtr ts = infer_expr(locals, e->children[0]);
                TypePtr tgt = elaborate_annotation(e->tyexpr);
                TypePtr tgt_head = normalize_head(tgt);
                if (tgt_head->tag != TyTag::Record)
                    raise(ErrorKind::NotNarrowable, e->span,
                          "dynUpCast view must be a record type");
                anns_[e->node_id].dyn_view_labels = tgt_head->row.labels();
                emit(make_c(CKind::DynUpCastable, {ts, tgt}, e->span, e->node_id));
                return ty::dyn(tgt);
            }
            case ExprKind::DynDownCast: {
                TypePtr ts = infer_expr(locals, e->children[0]);
                TypePtr tgt = elaborate_annotation(e->tyexpr);
                TypePtr view = fresh();
                unify(ts, ty::dyn(view), e->span);
                emit(make_c(CKind::DynDownTarget, {ts, tgt}, e->span, e->node_id));
                return ty::union_(tgt, ty::unit());
            }
            case ExprKind::NUpCast: {
                TypePtr ts = infer_expr(locals, e->children[0]);
                TypePtr r = fresh();
                emit(make_c(CKind::NUpCastTo, {ts, r}, e->span, e->node_id, {}, e->label));
                return r;
            }
            case ExprKind::Nominate: {
                TypePtr t = infer_expr(locals, e->children[0]);
                return ty::nominal(e->label, t);
            }
        }
        raise(ErrorKind::ParseError, e->span, "malformed expression");
    }

    // -------------------------------------------------------------- solver

    enum class Step { Solved, Keep };

    Step step(Constraint& c, std::vector<Constraint>& splits,
              std::set<Label>* collect_missing) {
        switch (c.kind) {
            case CKind::HasField: {
                TypePtr head = normalize_head(c.types[0]);
                switch (head->tag) {
                    case TyTag::Var:
                        return Step::Keep;
                    case TyTag::Record: {
                        const TypePtr* f = head->row.find(c.label);
                        if (!f) {
                            if (collect_missing) {
                                collect_missing->insert(c.label);
                                return Step::Solved;
                            }
                            VarNamer nm;
                            raise(ErrorKind::MissingField, c.span,
                                  "record " + pretty_type(deep_resolve(head), nm) +
                                      " has no field " + c.label + " of type " +
                                      pretty_type(deep_resolve(c.types[1]), nm));
                        }
                        unify(*f, c.types[1], c.span);
                        return Step::Solved;
                    }
                    case TyTag::Nominal:
                    case TyTag::Dyn: {
                        c.types[0] = head->args[0];
                        splits.push_back(c);
                        return Step::Solved;
                    }
                    case TyTag::Union: {
                        Constraint left = c, right = c;
                        left.types[0] = head->args[0];
                        right.types[0] = head->args[1];
                        splits.push_back(left);
                        splits.push_back(right);
                        return Step::Solved;
                    }
                    case TyTag::NotFixed:
                        raise(ErrorKind::AbstractUse, c.span,
                              "an object under construction (NotFixed) does not have the "
                              "method " + c.label);
                    default:
                        raise(ErrorKind::MissingField, c.span,
                              "type " + pretty_type(deep_resolve(head)) +
                                  " has no field " + c.label);
                }
            }
            case CKind::Lacks: {
                TypePtr head = normalize_head(c.types[0]);
                if (head->tag == TyTag::Var) return Step::Keep;
                if (head->tag == TyTag::Record && head->row.has(c.label))
                    raise(ErrorKind::DuplicateLabel, c.span,
                          "duplicate label " + c.label + " in record extension");
                return Step::Solved;
            }
            case CKind::ClassNum: {
                TypePtr t = resolve(c.types[0]);
                if (t->tag == TyTag::Var) return Step::Keep;
                if (t->tag == TyTag::Int || t->tag == TyTag::Float) return Step::Solved;
                raise(ErrorKind::ClassError, c.span,
                      "type " + pretty_type(deep_resolve(t)) + " is not a Num type");
            }
            case CKind::ClassShow: {
                TypePtr t = resolve(c.types[0]);
                switch (t->tag) {
                    case TyTag::Var:
                        return Step::Keep;
                    case TyTag::Int:
                    case TyTag::Float:
                    case TyTag::Bool:
                    case TyTag::String:
                    case TyTag::Unit:
                        return Step::Solved;
                    case TyTag::Pair: {
                        Constraint l = c, r = c;
                        l.types = {t->args[0]};
                        r.types = {t->args[1]};
                        splits.push_back(l);
                        splits.push_back(r);
                        return Step::Solved;
                    }
                    default:
                        raise(ErrorKind::ClassError, c.span,
                              "type " + pretty_type(deep_resolve(t)) + " is not showable");
                }
            }
            case CKind::RowExtendTo: {
                TypePtr base = normalize_head(c.types[0]);
                if (base->tag == TyTag::Var) return Step::Keep;
                if (base->tag != TyTag::Record)
                    raise(ErrorKind::Mismatch, c.span,
                          "cannot extend non-record type " + pretty_type(deep_resolve(base)));
                if (base->row.has(c.label))
                    raise(ErrorKind::DuplicateLabel, c.span,
                          "duplicate label " + c.label + " in record extension");
                unify(c.types[2], ty::record(row_extend(base->row, c.label, c.types[1])),
                      c.span);
                return Step::Solved;
            }
            case CKind::RowUnionTo: {
                TypePtr a = normalize_head(c.types[0]);
                TypePtr b = normalize_head(c.types[1]);
                if (a->tag == TyTag::Var || b->tag == TyTag::Var) return Step::Keep;
                if (a->tag != TyTag::Record || b->tag != TyTag::Record)
                    raise(ErrorKind::Mismatch, c.span,
                          "record union requires two records");
                unify(c.types[2], ty::record(row_union_left(a->row, b->row)), c.span);
                return Step::Solved;
            }
            case CKind::LubConsTo: {
                TypePtr h = normalize_head(c.types[0]);
                TypePtr t = normalize_head(c.types[1]);
                if (t->tag == TyTag::Var) return Step::Keep;
                if (t->tag == TyTag::LubSeed) {
                    unify(c.types[2], ty::list(c.types[0]), c.span);
                    if (c.node_id) anns_[c.node_id].lub_singleton = true;
                    return Step::Solved;
                }
                if (t->tag != TyTag::List)
                    raise(ErrorKind::Mismatch, c.span, "lubCons tail must be a lub list");
                TypePtr elem = normalize_head(t->args[0]);
                if (h->tag == TyTag::Var || elem->tag == TyTag::Var) return Step::Keep;
                if (h->tag != TyTag::Record || elem->tag != TyTag::Record)
                    raise(ErrorKind::Mismatch, c.span, "lubCons expects record elements");
                // Both projections must land at the common type, so shared
                // labels unify rather than merely compare.
                for (auto& l : row_intersect(h->row, elem->row)) {
                    try {
                        unify(*h->row.find(l), *elem->row.find(l), c.span);
                    } catch (const TypeError& e) {
                        raise(ErrorKind::Mismatch, c.span,
                              "field " + l + " has clashing types in lub narrowing (" +
                                  e.diag.message + ")");
                    }
                }
                Row lub = lub_row(resolve_row(h->row), resolve_row(elem->row));
                unify(c.types[2], ty::list(ty::record(lub)), c.span);
                if (c.node_id) anns_[c.node_id].lub_labels = lub.labels();
                return Step::Solved;
            }
            case CKind::UnionConsTo: {
                TypePtr t = normalize_head(c.types[1]);
                if (t->tag == TyTag::Var) return Step::Keep;
                if (t->tag == TyTag::UnionSeed) {
                    unify(c.types[2], ty::list(c.types[0]), c.span);
                    return Step::Solved;
                }
                if (t->tag != TyTag::List)
                    raise(ErrorKind::Mismatch, c.span, "unionCons tail must be a union list");
                unify(c.types[2], ty::list(ty::union_(c.types[0], t->args[0])), c.span);
                return Step::Solved;
            }
            case CKind::Narrowable: {
                TypePtr s = normalize_head(c.types[0]);
                if (s->tag == TyTag::Var) return Step::Keep;
                TypePtr tgt = normalize_head(c.types[1]);
                if (s->tag == TyTag::NotFixed)
                    raise(ErrorKind::NotNarrowable, c.span,
                          "cannot narrow an object under construction (NotFixed)");
                if (s->tag != TyTag::Record || tgt->tag != TyTag::Record)
                    raise(ErrorKind::NotNarrowable, c.span,
                          "narrowing requires record types");
                std::string missing;
                for (auto& [l, ft] : tgt->row.entries())
                    if (!s->row.has(l)) missing += (missing.empty() ? "" : ", ") + l;
                if (!missing.empty())
                    raise(ErrorKind::NotNarrowable, c.span,
                          "cannot narrow " + pretty_type(deep_resolve(s)) + ": missing " +
                              missing);
                for (auto& [l, ft] : tgt->row.entries())
                    unify(*s->row.find(l), ft, c.span);
                return Step::Solved;
            }
            case CKind::DeepNarrowable: {
                TypePtr s = deep_resolve(c.types[0]);
                TypePtr tgt = deep_resolve(c.types[1]);
                if (resolve(c.types[0])->tag == TyTag::Var) return Step::Keep;
                if (!is_closed(s) || !is_closed(tgt)) return Step::Keep;
                try {
                    PlanPtr p = derive_deep_narrow(s, tgt);
                    if (c.node_id) anns_[c.node_id].plan = p;
                } catch (const RowError& re) {
                    raise(ErrorKind::NotDeepSubtype, c.span,
                          "deep narrowing failed: " + std::string(re.what()) + " (" +
                              pretty_type(s) + " to " + pretty_type(tgt) + ")");
                }
                return Step::Solved;
            }
            case CKind::DownCastable: {
                TypePtr u = deep_resolve(c.types[0]);
                TypePtr tgt = deep_resolve(c.types[1]);
                if (resolve(c.types[0])->tag == TyTag::Var) return Step::Keep;
                if (!is_closed(u) || !is_closed(tgt)) return Step::Keep;
                if (u->tag != TyTag::Union)
                    raise(ErrorKind::Mismatch, c.span,
                          "downCast expects a union-typed value");
                std::vector<TypePtr> branches;
                TypePtr cur = u;
                while (cur->tag == TyTag::Union) {
                    branches.push_back(cur->args[0]);
                    cur = cur->args[1];
                }
                branches.push_back(cur);
                std::set<int> matching;
                for (size_t i = 0; i < branches.size(); ++i)
                    if (equal_types(branches[i], tgt)) matching.insert((int)i);
                if (matching.empty())
                    raise(ErrorKind::StupidCast, c.span,
                          "stupid cast: " + pretty_type(tgt) +
                              " is not a branch of the union " + pretty_type(u));
                if (c.node_id) {
                    anns_[c.node_id].down_branches = matching;
                    anns_[c.node_id].down_branch_count = (int)branches.size();
                }
                return Step::Solved;
            }
            case CKind::DynUpCastable: {
                TypePtr s = normalize_head(c.types[0]);
                if (s->tag == TyTag::Var) return Step::Keep;
                TypePtr tgt = normalize_head(c.types[1]);
                if (s->tag != TyTag::Record || tgt->tag != TyTag::Record)
                    raise(ErrorKind::NotNarrowable, c.span,
                          "dynUpCast requires record types");
                std::string missing;
                for (auto& [l, ft] : tgt->row.entries())
                    if (!s->row.has(l)) missing += (missing.empty() ? "" : ", ") + l;
                if (!missing.empty())
                    raise(ErrorKind::NotNarrowable, c.span,
                          "cannot dynUpCast: view needs " + missing);
                for (auto& [l, ft] : tgt->row.entries())
                    unify(*s->row.find(l), ft, c.span);
                TypePtr full = deep_resolve(c.types[0]);
                if (!is_closed(full)) return Step::Keep;
                if (c.node_id) anns_[c.node_id].dyn_source = full;
                return Step::Solved;
            }
            case CKind::DynDownTarget: {
                TypePtr tgt = deep_resolve(c.types[1]);
                if (!is_closed(tgt)) return Step::Keep;
                if (c.node_id) anns_[c.node_id].dyn_target = tgt;
                return Step::Solved;
            }
            case CKind::NUpCastTo: {
                TypePtr s = resolve(c.types[0]);
                if (s->tag == TyTag::Var) return Step::Keep;
                if (s->tag != TyTag::Nominal)
                    raise(ErrorKind::Mismatch, c.span,
                          "nUpCast expects a nominal object (N f x)");
                try {
                    if (!nominals_.is_ancestor(s->name, c.name))
                        raise(ErrorKind::NotAncestor, c.span,
                              c.name + " is not an ancestor of " + s->name);
                } catch (const RowError& re) {
                    raise(ErrorKind::NotAncestor, c.span, re.what());
                }
                unify(c.types[1], ty::nominal(c.name, s->args[0]), c.span);
                return Step::Solved;
            }
            case CKind::AnonymizeTo: {
                TypePtr s = resolve(c.types[0]);
                if (s->tag == TyTag::Var) return Step::Keep;
                if (s->tag != TyTag::Nominal)
                    raise(ErrorKind::Mismatch, c.span,
                          "anonymize expects a nominal object (N f x)");
                unify(c.types[1], s->args[0], c.span);
                return Step::Solved;
            }
            case CKind::RecordResult: {
                TypePtr t = normalize_head(c.types[0]);
                if (t->tag == TyTag::Var) return Step::Keep;
                if (t->tag == TyTag::Record) return Step::Solved;
                if (t->tag == TyTag::Action)
                    raise(ErrorKind::Mismatch, c.span,
                          "construct's function must be action-free and return a record");
                raise(ErrorKind::Mismatch, c.span,
                      "construct's function must return a record, got " +
                          pretty_type(deep_resolve(t)));
            }
        }
        return Step::Keep;
    }

    Row resolve_row(const Row& r) {
        std::vector<std::pair<Label, TypePtr>> entries;
        for (auto& [l, ft] : r.entries()) entries.emplace_back(l, deep_resolve(ft));
        return Row::from_entries(std::move(entries));
    }

    void solve_fixpoint(std::set<Label>* collect_missing = nullptr) {
        bool progress = true;
        while (progress) {
            progress = false;
            std::vector<Constraint> still;
            std::vector<Constraint> splits;
            for (auto& c : pending_) {
                Step s = step(c, splits, collect_missing);
                if (s == Step::Solved) progress = true;
                else still.push_back(c);
            }
            if (!splits.empty()) progress = true;
            for (auto& c : splits) still.push_back(c);
            pending_ = std::move(still);
        }
    }

    // --------------------------------------------------------- finalization

    Scheme finalize(TypePtr body_ty, const SourceSpan& span) {
        solve_fixpoint();
        if (opts_.num_defaulting) run_defaulting(body_ty);

        // Operations that must compute on concrete rows may not stay open.
        for (auto& c : pending_) {
            switch (c.kind) {
                case CKind::RowUnionTo:
                    raise(ErrorKind::AmbiguousRow, c.span,
                          "the rows of this record union never become ground");
                case CKind::LubConsTo:
                    raise(ErrorKind::AmbiguousRow, c.span,
                          "the rows of this lub list never become ground");
                case CKind::DownCastable:
                    raise(ErrorKind::AmbiguousRow, c.span,
                          "the union of this downCast never becomes ground");
                case CKind::DynUpCastable:
                    raise(ErrorKind::AmbiguousRow, c.span,
                          "the source of this dynUpCast never becomes ground");
                case CKind::DynDownTarget:
                    raise(ErrorKind::AmbiguousRow, c.span,
                          "the target of this dynDownCast never becomes ground");
                case CKind::DeepNarrowable:
                    raise(ErrorKind::AmbiguousRow, c.span,
                          "the rows of this deep narrowing never become ground");
                default:
                    break;
            }
        }

        // Literal nodes whose type ends up Float evaluate to float values.
        for (auto& [node, var] : literal_vars_) {
            if (resolve(var)->tag == TyTag::Float) anns_[node].float_literal = true;
        }
        // Rows the checker assigned to record operations, for the debug-mode
        // value/row agreement assertion.
        for (auto& [node, t] : record_nodes_) {
            TypePtr r = resolve(t);
            if (r->tag == TyTag::Record) anns_[node].row_labels = r->row.labels();
        }

        TypePtr body = deep_resolve(body_ty);
        Scheme s;
        s.body = body;
        std::set<int> qvars;
        collect_vars(body, qvars);
        auto same_constraint = [](const Constraint& a, const Constraint& b) {
            if (a.kind != b.kind || a.label != b.label || a.name != b.name) return false;
            if (a.types.size() != b.types.size()) return false;
            for (size_t i = 0; i < a.types.size(); ++i)
                if (!equal_types(a.types[i], b.types[i])) return false;
            return true;
        };
        for (auto& c : pending_) {
            Constraint rc = c;
            for (auto& t : rc.types) {
                t = deep_resolve(t);
                collect_vars(t, qvars);
            }
            bool dup = false;
            for (auto& prev : s.constraints) dup = dup || same_constraint(prev, rc);
            if (!dup) s.constraints.push_back(std::move(rc));
        }
        pending_.clear();
        s.quantified.assign(qvars.begin(), qvars.end());

        // Display order: Num, HasField, Show, everything else.
        std::stable_sort(s.constraints.begin(), s.constraints.end(),
                         [](const Constraint& a, const Constraint& b) {
                             auto rank = [](const Constraint& c) {
                                 switch (c.kind) {
                                     case CKind::ClassNum: return 0;
                                     case CKind::HasField: return 1;
                                     case CKind::ClassShow: return 2;
                                     default: return 3;
                                 }
                             };
                             return rank(a) < rank(b);
                         });
        (void)span;  // spans travel with the constraints themselves
        return s;
    }

    static bool generalizable_kind(CKind k) {
        switch (k) {
            case CKind::HasField:
            case CKind::Lacks:
            case CKind::ClassNum:
            case CKind::ClassShow:
            case CKind::RowExtendTo:
            case CKind::Narrowable:
            case CKind::NUpCastTo:
            case CKind::AnonymizeTo:
            case CKind::RecordResult:
            case CKind::UnionConsTo:
                return true;
            default:
                return false;
        }
    }

    // A Num-only variable defaults to Int unless it sits under a function
    // arrow in the scheme body or in a constraint that will stay residual;
    // those stay polymorphic (a generator's coordinate type, for example).
    void run_defaulting(const TypePtr& body_ty) {
        for (;;) {
            TypePtr body = deep_resolve(body_ty);
            std::set<int> protected_vars;
            detail::vars_under_fun(body, false, protected_vars);
            for (auto& c : pending_) {
                if (!generalizable_kind(c.kind)) continue;
                for (auto& t : c.types)
                    detail::vars_under_fun(deep_resolve(t), false, protected_vars);
            }

            std::set<int> num_vars;
            for (auto& c : pending_) {
                if (c.kind != CKind::ClassNum) continue;
                TypePtr t = resolve(c.types[0]);
                if (t->tag == TyTag::Var) num_vars.insert(t->var);
            }
            bool any = false;
            for (int v : num_vars) {
                if (protected_vars.count(v)) continue;
                subst_[v] = ty::int_();
                any = true;
            }
            if (!any) return;
            solve_fixpoint();
        }
    }
};

}  // namespace minioo

#endif
