#ifndef MINIOO_AST_PRINT_HPP
#define MINIOO_AST_PRINT_HPP

#include <sstream>
#include <string>

#include "minioo/ast.hpp"

namespace minioo {

// Re-emits a parsed program as concrete syntax. Output is fully parenthesised
// where it matters; reparsing yields a structurally identical tree.

std::string type_expr_to_source(const TypeExprPtr& t);

namespace detail {

inline std::string ty_atom(const TypeExprPtr& t) {
    std::string s = type_expr_to_source(t);
    bool atomic = t->kind == TyExprKind::Var || t->kind == TyExprKind::Unit ||
                  t->kind == TyExprKind::Record || t->kind == TyExprKind::List ||
                  (t->kind == TyExprKind::Name && t->args.empty());
    return atomic ? s : "(" + s + ")";
}

}  // namespace detail

inline std::string type_expr_to_source(const TypeExprPtr& t) {
    std::ostringstream o;
    switch (t->kind) {
        case TyExprKind::Var:
            o << t->name;
            break;
        case TyExprKind::Unit:
            o << "()";
            break;
        case TyExprKind::Fun:
            o << detail::ty_atom(t->args[0]) << " -> " << type_expr_to_source(t->args[1]);
            break;
        case TyExprKind::List:
            o << "[" << type_expr_to_source(t->args[0]) << "]";
            break;
        case TyExprKind::Nominal:
            o << "N " << t->name << " " << detail::ty_atom(t->args[0]);
            break;
        case TyExprKind::Name:
            o << t->name;
            for (auto& a : t->args) o << " " << detail::ty_atom(a);
            break;
        case TyExprKind::Record: {
            o << "{";
            bool first = true;
            for (auto& [l, ft] : t->fields) {
                if (!first) o << ", ";
                first = false;
                o << l << ": " << type_expr_to_source(ft);
            }
            o << "}";
            break;
        }
    }
    return o.str();
}

std::string expr_to_source(const ExprPtr& e);

namespace detail {

inline std::string quote_string(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\\\"";
        else if (c == '\\') out += "\\\\";
        else if (c == '\n') out += "\\n";
        else out += c;
    }
    out += "\"";
    return out;
}

inline bool expr_atomic(const ExprPtr& e) {
    switch (e->kind) {
        case ExprKind::IntLit:
        case ExprKind::FloatLit:
        case ExprKind::BoolLit:
        case ExprKind::StringLit:
        case ExprKind::UnitLit:
        case ExprKind::PairLit:
        case ExprKind::ListLit:
        case ExprKind::Var:
        case ExprKind::BuiltinRef:
        case ExprKind::RecordEmpty:
        case ExprKind::Do:
            return true;
        default:
            return false;
    }
}

inline std::string expr_atom(const ExprPtr& e) {
    std::string s = expr_to_source(e);
    return expr_atomic(e) ? s : "(" + s + ")";
}

}  // namespace detail

inline std::string expr_to_source(const ExprPtr& e) {
    std::ostringstream o;
    switch (e->kind) {
        case ExprKind::IntLit:
            o << e->int_val;
            break;
        case ExprKind::FloatLit: {
            std::ostringstream f;
            f << e->float_val;
            std::string s = f.str();
            if (s.find('.') == std::string::npos && s.find('e') == std::string::npos) s += ".0";
            o << s;
            break;
        }
        case ExprKind::BoolLit:
            o << (e->bool_val ? "true" : "false");
            break;
        case ExprKind::StringLit:
            o << detail::quote_string(e->str_val);
            break;
        case ExprKind::UnitLit:
            o << "()";
            break;
        case ExprKind::PairLit:
            o << "(" << expr_to_source(e->children[0]) << ", " << expr_to_source(e->children[1])
              << ")";
            break;
        case ExprKind::ListLit: {
            o << "[";
            for (size_t i = 0; i < e->children.size(); ++i) {
                if (i) o << ", ";
                o << expr_to_source(e->children[i]);
            }
            o << "]";
            break;
        }
        case ExprKind::Var:
            o << e->str_val;
            break;
        case ExprKind::BuiltinRef:
            o << builtin_name(e->builtin);
            break;
        case ExprKind::Lambda: {
            o << "\\";
            for (auto& p : e->names) o << p << " ";
            o << "-> " << expr_to_source(e->children[0]);
            break;
        }
        case ExprKind::Apply:
            o << detail::expr_atom(e->children[0]) << " " << detail::expr_atom(e->children[1]);
            break;
        case ExprKind::If:
            o << "if " << expr_to_source(e->children[0]) << " then "
              << expr_to_source(e->children[1]) << " else " << expr_to_source(e->children[2]);
            break;
        case ExprKind::FieldGet:
            o << detail::expr_atom(e->children[0]) << " # " << e->label;
            break;
        case ExprKind::BinOp:
            o << detail::expr_atom(e->children[0]) << " " << e->label << " "
              << detail::expr_atom(e->children[1]);
            break;
        case ExprKind::RecordEmpty:
            o << "emptyRecord";
            break;
        case ExprKind::RecordExtend:
            o << "(" << e->label << " = " << expr_to_source(e->children[0]) << ") .*. "
              << expr_to_source(e->children[1]);
            break;
        case ExprKind::RecordUpdate:
            o << "(" << e->label << " = " << expr_to_source(e->children[0]) << ") .<. "
              << expr_to_source(e->children[1]);
            break;
        case ExprKind::RecordUnion:
            o << detail::expr_atom(e->children[0]) << " .<++. " << expr_to_source(e->children[1]);
            break;
        case ExprKind::Narrow:
            o << "narrow " << detail::expr_atom(e->children[0]) << " : "
              << type_expr_to_source(e->tyexpr);
            break;
        case ExprKind::DeepNarrow:
            o << "deepNarrow " << detail::expr_atom(e->children[0]) << " : "
              << type_expr_to_source(e->tyexpr);
            break;
        case ExprKind::DownCast:
            o << "downCast " << detail::expr_atom(e->children[0]) << " : "
              << type_expr_to_source(e->tyexpr);
            break;
        case ExprKind::DynUpCast:
            o << "dynUpCast " << detail::expr_atom(e->children[0]) << " : "
              << type_expr_to_source(e->tyexpr);
            break;
        case ExprKind::DynDownCast:
            o << "dynDownCast " << detail::expr_atom(e->children[0]) << " : "
              << type_expr_to_source(e->tyexpr);
            break;
        case ExprKind::NUpCast:
            o << "nUpCast " << detail::expr_atom(e->children[0]) << " : " << e->label;
            break;
        case ExprKind::Nominate:
            o << "nominate " << e->label << " " << detail::expr_atom(e->children[0]);
            break;
        case ExprKind::Do: {
            o << "do { ";
            for (size_t i = 0; i < e->stmts.size(); ++i) {
                if (i) o << "; ";
                const Stmt& st = e->stmts[i];
                if (st.kind == StmtKind::Bind) o << st.name << " <- ";
                else if (st.kind == StmtKind::Let) o << "let " << st.name << " = ";
                o << expr_to_source(st.expr);
            }
            o << " }";
            break;
        }
    }
    return o.str();
}

inline std::string decl_to_source(const Decl& d) {
    std::ostringstream o;
    switch (d.kind) {
        case DeclKind::Label:
            o << "label " << d.name;
            break;
        case DeclKind::Nominal: {
            o << "nominal " << d.name << " extends {";
            for (size_t i = 0; i < d.parents.size(); ++i) {
                if (i) o << ", ";
                o << d.parents[i];
            }
            o << "}";
            break;
        }
        case DeclKind::TypeSyn: {
            o << "type " << d.name;
            for (auto& p : d.params) o << " " << p;
            o << " = " << type_expr_to_source(d.type_body);
            break;
        }
        case DeclKind::Binding: {
            o << "let " << d.name;
            for (auto& p : d.params) o << " " << p;
            o << " = " << expr_to_source(d.expr_body);
            break;
        }
    }
    return o.str();
}

inline std::string program_to_source(const Program& p) {
    std::ostringstream o;
    for (auto& d : p.decls) o << decl_to_source(d) << "\n";
    return o.str();
}

}  // namespace minioo

#endif
