#ifndef MINIOO_EVAL_HPP
#define MINIOO_EVAL_HPP

#include <charconv>
#include <cstdio>
#include <string>

#include "minioo/infer.hpp"
#include "minioo/value.hpp"

namespace minioo {

// show: ints bare, floats with a mandatory fractional digit, strings quoted.
inline std::string show_value(const ValuePtr& v) {
    switch (v->k) {
        case VK::Int:
            return std::to_string(v->i);
        case VK::Float: {
            char buf[64];
            auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v->f);
            std::string s(buf, p);
            if (s.find('.') == std::string::npos && s.find('e') == std::string::npos &&
                s.find("inf") == std::string::npos && s.find("nan") == std::string::npos)
                s += ".0";
            return s;
        }
        case VK::Bool:
            return v->b ? "true" : "false";
        case VK::String: {
            std::string out = "\"";
            for (char c : v->s) {
                if (c == '"') out += "\\\"";
                else if (c == '\\') out += "\\\\";
                else if (c == '\n') out += "\\n";
                else out += c;
            }
            return out + "\"";
        }
        case VK::Unit:
            return "()";
        case VK::Pair:
            return "(" + show_value(v->items[0]) + "," + show_value(v->items[1]) + ")";
        default:
            throw std::logic_error("show_value: value is not showable");
    }
}

// putStr / putStrLn emit raw text: strings unquoted, everything else as shown.
inline std::string raw_text(const ValuePtr& v) {
    return v->k == VK::String ? v->s : show_value(v);
}

struct EvalOptions {
    bool validate_rows = false;  // debug: check record values against checker rows
};

class Evaluator {
  public:
    Evaluator(Store& store, const AnnMap& anns, EvalOptions opts = {})
        : store_(store), anns_(anns), opts_(opts) {
        globals_ = std::make_shared<Env>();
    }

    EnvPtr globals() { return globals_; }

    void define_global(const std::string& name, ValuePtr v) {
        globals_->vars[name] = std::move(v);
    }

    // Evaluates one top-level binding body in the global environment.
    ValuePtr eval_binding(const Decl& d) {
        ExprPtr body = d.expr_body;
        ValuePtr v;
        if (d.params.empty()) {
            v = eval(globals_, body);
        } else {
            auto c = val::mk(VK::Closure);
            c->params = d.params;
            c->body = body.get();
            c->env = globals_;
            keep_alive_.push_back(body);
            v = c;
        }
        keep_alive_.push_back(body);
        define_global(d.name, v);
        return v;
    }

    // ----------------------------------------------------------- evaluation

    ValuePtr eval(const EnvPtr& env, const ExprPtr& e) { return eval(env, e.get()); }

    ValuePtr eval(const EnvPtr& env, const Expr* e) {
        switch (e->kind) {
            case ExprKind::IntLit: {
                auto it = anns_.find(e->node_id);
                if (it != anns_.end() && it->second.float_literal)
                    return val::float_((double)e->int_val);
                return val::int_(e->int_val);
            }
            case ExprKind::FloatLit:
                return val::float_(e->float_val);
            case ExprKind::BoolLit:
                return val::bool_(e->bool_val);
            case ExprKind::StringLit:
                return val::string_(e->str_val);
            case ExprKind::UnitLit:
                return val::unit();
            case ExprKind::PairLit:
                return val::pair(eval(env, e->children[0]), eval(env, e->children[1]));
            case ExprKind::ListLit: {
                std::vector<ValuePtr> xs;
                for (auto& c : e->children) xs.push_back(eval(env, c));
                return val::list(std::move(xs));
            }
            case ExprKind::Var: {
                if (const ValuePtr* v = env->find(e->str_val)) return *v;
                throw std::logic_error("internal: unbound name " + e->str_val);
            }
            case ExprKind::BuiltinRef: {
                if (e->builtin == Builtin::LubNil || e->builtin == Builtin::UnionNil)
                    return val::list({});
                auto v = val::mk(VK::Builtin);
                v->bi = e->builtin;
                v->origin = e;
                v->span = e->span;
                return v;
            }
            case ExprKind::Lambda: {
                auto c = val::mk(VK::Closure);
                c->params = e->names;
                c->body = e->children[0].get();
                c->env = env;
                return c;
            }
            case ExprKind::Apply: {
                ValuePtr f = eval(env, e->children[0]);
                ValuePtr a = eval(env, e->children[1]);
                return apply(f, a, e->span);
            }
            case ExprKind::Do: {
                auto v = val::mk(VK::Action);
                v->ak = ActionK::Do;
                v->body = e;
                v->env = env;
                return v;
            }
            case ExprKind::If: {
                ValuePtr c = eval(env, e->children[0]);
                return eval(env, c->b ? e->children[1] : e->children[2]);
            }
            case ExprKind::FieldGet:
                return field_get(eval(env, e->children[0]), e->label, e->span);
            case ExprKind::BinOp:
                return binop(e, env);
            case ExprKind::RecordEmpty:
                return val::mk(VK::Record);
            case ExprKind::RecordExtend: {
                ValuePtr v = eval(env, e->children[0]);
                ValuePtr base = record_of(eval(env, e->children[1]), e->span);
                auto r = val::mk(VK::Record);
                r->fields = base->fields;
                r->fields[e->label] = v;
                validate_row(e, r);
                return r;
            }
            case ExprKind::RecordUpdate: {
                ValuePtr v = eval(env, e->children[0]);
                ValuePtr base = record_of(eval(env, e->children[1]), e->span);
                auto r = val::mk(VK::Record);
                r->fields = base->fields;
                r->fields[e->label] = v;
                validate_row(e, r);
                return r;
            }
            case ExprKind::RecordUnion: {
                ValuePtr a = record_of(eval(env, e->children[0]), e->span);
                ValuePtr b = record_of(eval(env, e->children[1]), e->span);
                auto r = val::mk(VK::Record);
                r->fields = a->fields;
                for (auto& [l, v] : b->fields)
                    if (!r->fields.count(l)) r->fields[l] = v;
                validate_row(e, r);
                return r;
            }
            case ExprKind::Narrow: {
                ValuePtr v = eval(env, e->children[0]);
                return narrow_value(v, *ann(e).narrow_labels, e->span);
            }
            case ExprKind::DeepNarrow: {
                ValuePtr v = eval(env, e->children[0]);
                return plan_apply(ann(e).plan, v, e->span);
            }
            case ExprKind::DownCast: {
                ValuePtr v = eval(env, e->children[0]);
                int rights = 0;
                for (bool t : v->path) rights += t ? 1 : 0;
                const NodeAnn& a = ann(e);
                if (a.down_branches->count(rights)) return some(v->payload);
                return none();
            }
            case ExprKind::DynUpCast: {
                ValuePtr v = eval(env, e->children[0]);
                const NodeAnn& a = ann(e);
                auto d = val::mk(VK::Dyn);
                d->full = v;
                d->dyn_type = a.dyn_source;
                d->payload = narrow_value(v, *a.dyn_view_labels, e->span);
                return d;
            }
            case ExprKind::DynDownCast: {
                ValuePtr v = eval(env, e->children[0]);
                const NodeAnn& a = ann(e);
                if (equal_types(v->dyn_type, a.dyn_target)) return some(v->full);
                return none();
            }
            case ExprKind::NUpCast: {
                ValuePtr v = eval(env, e->children[0]);
                auto r = val::mk(VK::Nominal);
                r->nom = e->label;
                r->payload = v->payload;
                return r;
            }
            case ExprKind::Nominate: {
                auto r = val::mk(VK::Nominal);
                r->nom = e->label;
                r->payload = eval(env, e->children[0]);
                return r;
            }
        }
        throw std::logic_error("internal: malformed expression");
    }

    // ------------------------------------------------------------- actions

    ValuePtr run_action(const ValuePtr& a) {
        switch (a->ak) {
            case ActionK::Pure:
                return a->payload;
            case ActionK::Wrapped: {
                ValuePtr r = run_action(a->payload);
                return plan_apply(a->plan_res, r, a->span);
            }
            case ActionK::Do: {
                EnvPtr scope = Env::child_of(a->env);
                ValuePtr result = val::unit();
                const Expr* node = a->body;
                for (size_t i = 0; i < node->stmts.size(); ++i) {
                    const Stmt& st = node->stmts[i];
                    switch (st.kind) {
                        case StmtKind::Bind: {
                            ValuePtr act = eval(scope, st.expr);
                            ValuePtr v = run_action(act);
                            if (st.name != "_") scope->vars[st.name] = v;
                            break;
                        }
                        case StmtKind::Let: {
                            ValuePtr v = eval(scope, st.expr);
                            if (st.name != "_") scope->vars[st.name] = v;
                            break;
                        }
                        case StmtKind::Expr: {
                            ValuePtr act = eval(scope, st.expr);
                            ValuePtr v = run_action(act);
                            if (i + 1 == node->stmts.size()) result = v;
                            break;
                        }
                    }
                }
                return result;
            }
            case ActionK::Prim:
                return run_prim(a);
        }
        throw std::logic_error("internal: malformed action");
    }

    // Fix-style or staged object construction: allocate a self cell, run the
    // generator applied to it, then patch the cell with the produced record.
    ValuePtr construct_object(const ValuePtr& generator, const SourceSpan& span) {
        size_t cell = store_.new_cell();
        auto selfv = val::mk(VK::SelfCell);
        selfv->id = cell;
        ValuePtr action = apply(generator, selfv, span);
        ValuePtr result = run_action(action);
        store_.patch_cell(cell, result);
        return result;
    }

    ValuePtr apply(const ValuePtr& f, const ValuePtr& arg, const SourceSpan& span) {
        switch (f->k) {
            case VK::Closure: {
                EnvPtr scope = Env::child_of(f->env);
                scope->vars[f->params[0]] = arg;
                if (f->params.size() > 1) {
                    auto c = val::mk(VK::Closure);
                    c->params.assign(f->params.begin() + 1, f->params.end());
                    c->body = f->body;
                    c->env = scope;
                    return c;
                }
                return eval(scope, f->body);
            }
            case VK::Builtin: {
                auto g = std::make_shared<Value>(*f);
                g->items.push_back(arg);
                if ((int)g->items.size() == builtin_arity(g->bi)) return exec_builtin(g, span);
                return g;
            }
            case VK::WrappedFn: {
                ValuePtr carg = plan_apply(f->plan_arg, arg, span);
                ValuePtr r = apply(f->payload, carg, span);
                return plan_apply(f->plan_res, r, span);
            }
            default:
                throw std::logic_error("internal: applying a non-function");
        }
    }

    // ---------------------------------------------------------- value ops

    ValuePtr field_get(const ValuePtr& v, const Label& l, const SourceSpan& span) {
        switch (v->k) {
            case VK::Record: {
                auto it = v->fields.find(l);
                if (it == v->fields.end())
                    throw std::logic_error("internal: record has no field " + l);
                return it->second;
            }
            case VK::SelfCell: {
                if (!store_.cell_set(v->id)) {
                    store_.note_unset_read();
                    throw RuntimeFault({ErrorKind::PrematureSelfAccess, span,
                                        "field " + l +
                                            " demanded from an object still under construction"});
                }
                if (v->view && !v->view->count(l))
                    throw std::logic_error("internal: field outside self view " + l);
                return field_get(store_.read_cell(v->id), l, span);
            }
            case VK::Union:
            case VK::Nominal:
            case VK::Dyn:
                return field_get(v->payload, l, span);
            default:
                throw std::logic_error("internal: field access on a non-object");
        }
    }

    ValuePtr narrow_value(const ValuePtr& v, const std::set<Label>& labels,
                          const SourceSpan& span) {
        switch (v->k) {
            case VK::Record: {
                auto r = val::mk(VK::Record);
                for (auto& l : labels) r->fields[l] = field_get(v, l, span);
                return r;
            }
            case VK::SelfCell: {
                // Projection of a not-yet-patched self stays lazy: remember
                // the restricted view instead of reading the cell.
                auto r = std::make_shared<Value>(*v);
                if (r->view) {
                    std::set<Label> inter;
                    for (auto& l : labels)
                        if (r->view->count(l)) inter.insert(l);
                    r->view = inter;
                } else {
                    r->view = labels;
                }
                return r;
            }
            case VK::Nominal:
            case VK::Dyn:
            case VK::Union:
                return narrow_value(v->payload, labels, span);
            default:
                throw std::logic_error("internal: narrowing a non-record");
        }
    }

    ValuePtr plan_apply(const PlanPtr& p, const ValuePtr& v, const SourceSpan& span) {
        switch (p->kind) {
            case CoercionPlan::Kind::Identity:
                return v;
            case CoercionPlan::Kind::Project:
                return narrow_value(v, p->labels, span);
            case CoercionPlan::Kind::PerField: {
                auto r = val::mk(VK::Record);
                for (auto& [l, fp] : p->field_plans)
                    r->fields[l] = plan_apply(fp, field_get(v, l, span), span);
                return r;
            }
            case CoercionPlan::Kind::WrapFun: {
                auto w = val::mk(VK::WrappedFn);
                w->payload = v;
                w->plan_arg = p->arg;
                w->plan_res = p->result;
                w->span = span;
                return w;
            }
            case CoercionPlan::Kind::WrapAction: {
                auto w = val::mk(VK::Action);
                w->ak = ActionK::Wrapped;
                w->payload = v;
                w->plan_res = p->result;
                w->span = span;
                return w;
            }
        }
        throw std::logic_error("internal: malformed plan");
    }

  private:
    Store& store_;
    const AnnMap& anns_;
    EvalOptions opts_;
    EnvPtr globals_;
    std::vector<ExprPtr> keep_alive_;

    const NodeAnn& ann(const Expr* e) const {
        auto it = anns_.find(e->node_id);
        if (it == anns_.end()) throw std::logic_error("internal: missing annotation");
        return it->second;
    }

    static int builtin_arity(Builtin b) {
        switch (b) {
            case Builtin::Fix:
            case Builtin::New:
            case Builtin::Return:
            case Builtin::NewRef:
            case Builtin::ReadRef:
            case Builtin::Print:
            case Builtin::PutStr:
            case Builtin::PutStrLn:
            case Builtin::FailIO:
            case Builtin::Abs:
            case Builtin::Anonymize:
                return 1;
            case Builtin::Construct:
            case Builtin::WriteRef:
            case Builtin::ModifyRef:
            case Builtin::MapM:
            case Builtin::LubCons:
            case Builtin::UnionCons:
                return 2;
            case Builtin::Maybe:
                return 3;
            default:
                return 0;  // lubNil / unionNil never get here
        }
    }

    ValuePtr some(ValuePtr payload) {
        auto v = val::mk(VK::Union);
        v->path = {false};
        v->payload = std::move(payload);
        return v;
    }
    ValuePtr none() {
        auto v = val::mk(VK::Union);
        v->path = {true};
        v->payload = val::unit();
        return v;
    }

    ValuePtr record_of(const ValuePtr& v, const SourceSpan& span) {
        switch (v->k) {
            case VK::Record:
                return v;
            case VK::SelfCell: {
                if (!store_.cell_set(v->id)) {
                    store_.note_unset_read();
                    throw RuntimeFault({ErrorKind::PrematureSelfAccess, span,
                                        "record operation on an object still under construction"});
                }
                return record_of(store_.read_cell(v->id), span);
            }
            case VK::Nominal:
            case VK::Dyn:
                return record_of(v->payload, span);
            default:
                throw std::logic_error("internal: expected a record value");
        }
    }

    void validate_row(const Expr* e, const ValuePtr& r) {
        if (!opts_.validate_rows) return;
        auto it = anns_.find(e->node_id);
        if (it == anns_.end() || !it->second.row_labels) return;
        std::set<Label> have;
        for (auto& [l, v] : r->fields) have.insert(l);
        if (have != *it->second.row_labels)
            throw std::logic_error("internal: record value labels disagree with checked row");
    }

    ValuePtr binop(const Expr* e, const EnvPtr& env) {
        ValuePtr a = eval(env, e->children[0]);
        ValuePtr b = eval(env, e->children[1]);
        const std::string& op = e->label;
        if (op == "==") return val::bool_(value_equal(a, b));
        bool as_float = a->k == VK::Float || b->k == VK::Float;
        if (as_float) {
            double x = a->k == VK::Float ? a->f : (double)a->i;
            double y = b->k == VK::Float ? b->f : (double)b->i;
            if (op == "+") return val::float_(x + y);
            if (op == "-") return val::float_(x - y);
            if (op == "*") return val::float_(x * y);
            if (y == 0)
                throw RuntimeFault({ErrorKind::DivisionByZero, e->span, "division by zero"});
            return val::float_(x / y);
        }
        long long x = a->i, y = b->i;
        if (op == "+") return val::int_(x + y);
        if (op == "-") return val::int_(x - y);
        if (op == "*") return val::int_(x * y);
        if (y == 0)
            throw RuntimeFault({ErrorKind::DivisionByZero, e->span, "division by zero"});
        // Truncating division, like the corpus expects from `div`-style use.
        return val::int_(x / y);
    }

    static bool value_equal(const ValuePtr& a, const ValuePtr& b) {
        if (a->k != b->k) {
            if ((a->k == VK::Int && b->k == VK::Float) || (a->k == VK::Float && b->k == VK::Int)) {
                double x = a->k == VK::Float ? a->f : (double)a->i;
                double y = b->k == VK::Float ? b->f : (double)b->i;
                return x == y;
            }
            return false;
        }
        switch (a->k) {
            case VK::Int: return a->i == b->i;
            case VK::Float: return a->f == b->f;
            case VK::Bool: return a->b == b->b;
            case VK::String: return a->s == b->s;
            case VK::Unit: return true;
            case VK::Pair:
                return value_equal(a->items[0], b->items[0]) &&
                       value_equal(a->items[1], b->items[1]);
            default:
                return false;
        }
    }

    ValuePtr run_prim(const ValuePtr& a) {
        const auto& args = a->items;
        switch (a->bi) {
            case Builtin::NewRef: {
                auto r = val::mk(VK::Ref);
                r->id = store_.alloc(args[0]);
                return r;
            }
            case Builtin::ReadRef:
                return store_.read(args[0]->id);
            case Builtin::WriteRef:
                store_.write(args[0]->id, args[1]);
                return val::unit();
            case Builtin::ModifyRef: {
                ValuePtr cur = store_.read(args[0]->id);
                store_.write(args[0]->id, apply(args[1], cur, a->span));
                return val::unit();
            }
            case Builtin::Print:
                store_.emit(show_value(args[0]) + "\n");
                return val::unit();
            case Builtin::PutStr:
                store_.emit(raw_text(args[0]));
                return val::unit();
            case Builtin::PutStrLn:
                store_.emit(raw_text(args[0]) + "\n");
                return val::unit();
            case Builtin::FailIO:
                throw RuntimeFault({ErrorKind::UserFail, a->span, args[0]->s});
            case Builtin::MapM: {
                for (auto& x : args[1]->items) run_action(apply(args[0], x, a->span));
                return val::unit();
            }
            case Builtin::Fix:
            case Builtin::New:
                return construct_object(args[0], a->span);
            case Builtin::Construct:
                // Applies the (action-free) constructor function to the
                // still lazily routed self record.
                return apply(args[1], args[0], a->span);
            default:
                throw std::logic_error("internal: not a primitive action");
        }
    }

    ValuePtr exec_builtin(const ValuePtr& f, const SourceSpan& span) {
        const auto& args = f->items;
        switch (f->bi) {
            case Builtin::Abs: {
                if (args[0]->k == VK::Float) return val::float_(std::abs(args[0]->f));
                return val::int_(args[0]->i < 0 ? -args[0]->i : args[0]->i);
            }
            case Builtin::Maybe: {
                const ValuePtr& opt = args[2];
                if (!opt->path.empty() && !opt->path[0]) return apply(args[1], opt->payload, span);
                return args[0];
            }
            case Builtin::Return:
                return val::pure_action(args[0]);
            case Builtin::Anonymize:
                return args[0]->payload;
            case Builtin::UnionCons: {
                // Left h : map Right t. The head becomes the new left branch
                // wholesale; tail elements extend their existing tag paths.
                std::vector<ValuePtr> out;
                auto head = val::mk(VK::Union);
                head->path = {false};
                head->payload = args[0];
                out.push_back(head);
                for (auto& e : args[1]->items) out.push_back(wrap_union(e, true));
                return val::list(std::move(out));
            }
            case Builtin::LubCons: {
                const NodeAnn& a = ann(f->origin);
                if (a.lub_singleton) return val::list({args[0]});
                std::vector<ValuePtr> out;
                out.push_back(narrow_value(args[0], *a.lub_labels, span));
                for (auto& e : args[1]->items)
                    out.push_back(narrow_value(e, *a.lub_labels, span));
                return val::list(std::move(out));
            }
            // The remaining builtins suspend into primitive actions.
            default: {
                auto act = val::mk(VK::Action);
                act->ak = ActionK::Prim;
                act->bi = f->bi;
                act->items = args;
                act->span = span;
                return act;
            }
        }
    }

    ValuePtr wrap_union(const ValuePtr& v, bool right) {
        auto u = val::mk(VK::Union);
        if (v->k == VK::Union) {
            u->path = v->path;
            u->payload = v->payload;
        } else {
            u->payload = v;
        }
        u->path.insert(u->path.begin(), right);
        return u;
    }
};

}  // namespace minioo

#endif
