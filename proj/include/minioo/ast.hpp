#ifndef MINIOO_AST_HPP
#define MINIOO_AST_HPP

#include <memory>
#include <string>
#include <vector>

#include "minioo/diag.hpp"

namespace minioo {

// ---------------------------------------------------------------------------
// Type expressions (surface syntax for annotations and `type` declarations)
// ---------------------------------------------------------------------------

struct TypeExpr;
using TypeExprPtr = std::shared_ptr<TypeExpr>;

enum class TyExprKind {
    Name,    // capitalized head applied to arguments: Int, IO t, Ref t, Either a b,
             // Dyn t, user-declared names
    Var,     // lowercase type variable
    Fun,     // a -> b
    Record,  // { l : t, ... } and {}
    Unit,    // ()
    List,    // [t]
    Nominal, // N F t
};

struct TypeExpr {
    TyExprKind kind;
    std::string name;  // Name head / Var name / Nominal nomination
    std::vector<TypeExprPtr> args;
    std::vector<std::pair<std::string, TypeExprPtr>> fields;  // Record
    SourceSpan span;
};

// ---------------------------------------------------------------------------
// Expressions
// ---------------------------------------------------------------------------

enum class Builtin {
    Fix,
    New,
    Construct,
    Return,
    NewRef,
    ReadRef,
    WriteRef,
    ModifyRef,
    Print,
    PutStr,
    PutStrLn,
    FailIO,
    Abs,
    Maybe,
    MapM,
    LubNil,
    LubCons,
    UnionNil,
    UnionCons,
    Anonymize,
};

inline const char* builtin_name(Builtin b) {
    switch (b) {
        case Builtin::Fix: return "fix";
        case Builtin::New: return "new";
        case Builtin::Construct: return "construct";
        case Builtin::Return: return "return";
        case Builtin::NewRef: return "newRef";
        case Builtin::ReadRef: return "readRef";
        case Builtin::WriteRef: return "writeRef";
        case Builtin::ModifyRef: return "modifyRef";
        case Builtin::Print: return "print";
        case Builtin::PutStr: return "putStr";
        case Builtin::PutStrLn: return "putStrLn";
        case Builtin::FailIO: return "failIO";
        case Builtin::Abs: return "abs";
        case Builtin::Maybe: return "maybe";
        case Builtin::MapM: return "mapM_";
        case Builtin::LubNil: return "lubNil";
        case Builtin::LubCons: return "lubCons";
        case Builtin::UnionNil: return "unionNil";
        case Builtin::UnionCons: return "unionCons";
        case Builtin::Anonymize: return "anonymize";
    }
    return "?";
}

enum class ExprKind {
    IntLit,
    FloatLit,
    BoolLit,
    StringLit,
    UnitLit,
    PairLit,   // (a, b)
    ListLit,   // [a, b, ...]
    Var,
    BuiltinRef,
    Lambda,        // params in `names`, body in children[0]
    Apply,         // children[0] applied to children[1]
    Do,            // statement sequence
    If,            // children: cond, then, else
    FieldGet,      // children[0] # label
    BinOp,         // op in `label` (one of + - * / ==), children[0/1]
    RecordEmpty,
    RecordExtend,  // (label = children[0]) .*. children[1]
    RecordUpdate,  // (label = children[0]) .<. children[1]
    RecordUnion,   // children[0] .<++. children[1]
    Narrow,        // narrow children[0] : tyexpr
    DeepNarrow,
    DownCast,
    DynUpCast,
    DynDownCast,
    NUpCast,       // nUpCast children[0] : nomination in `label`
    Nominate,      // nominate <nomination in `label`> children[0]
};

struct Expr;
using ExprPtr = std::shared_ptr<Expr>;

enum class StmtKind { Bind, Let, Expr };

struct Stmt {
    StmtKind kind;
    std::string name;  // Bind / Let
    ExprPtr expr;
    SourceSpan span;
};

struct Expr {
    ExprKind kind;
    SourceSpan span;
    int node_id = 0;

    long long int_val = 0;
    double float_val = 0;
    bool bool_val = false;
    std::string str_val;   // string literal / variable name
    std::string label;     // field label, record op label, nomination, binop symbol
    Builtin builtin = Builtin::Fix;

    std::vector<std::string> names;  // lambda params
    std::vector<ExprPtr> children;
    std::vector<Stmt> stmts;  // Do
    TypeExprPtr tyexpr;       // annotated casts
};

// ---------------------------------------------------------------------------
// Declarations and programs
// ---------------------------------------------------------------------------

enum class DeclKind { Label, Nominal, TypeSyn, Binding };

struct Decl {
    DeclKind kind;
    std::string name;
    std::vector<std::string> parents;  // Nominal
    std::vector<std::string> params;   // TypeSyn type params / Binding value params
    TypeExprPtr type_body;             // TypeSyn
    ExprPtr expr_body;                 // Binding
    SourceSpan span;
};

struct Program {
    std::vector<Decl> decls;
};

// ---------------------------------------------------------------------------
// Structural (span-insensitive) equality, used by the round-trip tests
// ---------------------------------------------------------------------------

inline bool same_structure(const TypeExprPtr& a, const TypeExprPtr& b) {
    if (!a || !b) return !a && !b;
    if (a->kind != b->kind || a->name != b->name) return false;
    if (a->args.size() != b->args.size() || a->fields.size() != b->fields.size()) return false;
    for (size_t i = 0; i < a->args.size(); ++i)
        if (!same_structure(a->args[i], b->args[i])) return false;
    for (size_t i = 0; i < a->fields.size(); ++i) {
        if (a->fields[i].first != b->fields[i].first) return false;
        if (!same_structure(a->fields[i].second, b->fields[i].second)) return false;
    }
    return true;
}

inline bool same_structure(const ExprPtr& a, const ExprPtr& b) {
    if (!a || !b) return !a && !b;
    if (a->kind != b->kind) return false;
    if (a->int_val != b->int_val || a->float_val != b->float_val || a->bool_val != b->bool_val)
        return false;
    if (a->str_val != b->str_val || a->label != b->label) return false;
    if (a->kind == ExprKind::BuiltinRef && a->builtin != b->builtin) return false;
    if (a->names != b->names) return false;
    if (a->children.size() != b->children.size() || a->stmts.size() != b->stmts.size())
        return false;
    for (size_t i = 0; i < a->children.size(); ++i)
        if (!same_structure(a->children[i], b->children[i])) return false;
    for (size_t i = 0; i < a->stmts.size(); ++i) {
        if (a->stmts[i].kind != b->stmts[i].kind || a->stmts[i].name != b->stmts[i].name)
            return false;
        if (!same_structure(a->stmts[i].expr, b->stmts[i].expr)) return false;
    }
    return same_structure(a->tyexpr, b->tyexpr);
}

inline bool same_structure(const Decl& a, const Decl& b) {
    if (a.kind != b.kind || a.name != b.name) return false;
    if (a.parents != b.parents || a.params != b.params) return false;
    return same_structure(a.type_body, b.type_body) && same_structure(a.expr_body, b.expr_body);
}

inline bool same_structure(const Program& a, const Program& b) {
    if (a.decls.size() != b.decls.size()) return false;
    for (size_t i = 0; i < a.decls.size(); ++i)
        if (!same_structure(a.decls[i], b.decls[i])) return false;
    return true;
}

}  // namespace minioo

#endif
