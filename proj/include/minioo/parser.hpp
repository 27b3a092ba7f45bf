#ifndef MINIOO_PARSER_HPP
#define MINIOO_PARSER_HPP

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "minioo/ast.hpp"
#include "minioo/lexer.hpp"

namespace minioo {

// Name tables shared between parses (the REPL keeps one session alive).
struct NameTable {
    std::set<std::string> labels;
    std::set<std::string> nominations;
    std::map<std::string, int> type_names;  // name -> parameter count
    std::set<std::string> bindings;
    int next_node_id = 1;
};

struct ReplInput {
    enum class Kind { Declaration, Bind, Expression } kind;
    Decl decl;            // Declaration
    std::string name;     // Bind
    ExprPtr expr;         // Bind / Expression
};

namespace detail {

inline const std::map<std::string, Builtin>& builtin_table() {
    static const std::map<std::string, Builtin> table = {
        {"fix", Builtin::Fix},           {"new", Builtin::New},
        {"construct", Builtin::Construct}, {"return", Builtin::Return},
        {"newRef", Builtin::NewRef},     {"readRef", Builtin::ReadRef},
        {"writeRef", Builtin::WriteRef}, {"modifyRef", Builtin::ModifyRef},
        {"print", Builtin::Print},       {"putStr", Builtin::PutStr},
        {"putStrLn", Builtin::PutStrLn}, {"failIO", Builtin::FailIO},
        {"abs", Builtin::Abs},           {"maybe", Builtin::Maybe},
        {"mapM_", Builtin::MapM},        {"lubNil", Builtin::LubNil},
        {"lubCons", Builtin::LubCons},   {"unionNil", Builtin::UnionNil},
        {"unionCons", Builtin::UnionCons}, {"anonymize", Builtin::Anonymize},
    };
    return table;
}

inline bool is_reserved_name(const std::string& s) {
    return builtin_table().count(s) > 0 || s == "nominate";
}

inline const std::set<std::string>& builtin_type_names() {
    static const std::set<std::string> names = {"Int", "Float", "Bool", "String",
                                                "IO", "Ref", "Either", "Dyn"};
    return names;
}

}  // namespace detail

class Parser {
  public:
    // `allow_rebinding` relaxes the duplicate-binding check; the REPL uses
    // it so a name can be redefined at the prompt.
    Parser(std::vector<Token> tokens, NameTable& names, bool allow_rebinding = false)
        : toks_(std::move(tokens)), names_(names), allow_rebinding_(allow_rebinding) {}

    Program parse_program() {
        Program p;
        while (!at(Tok::Eof)) p.decls.push_back(parse_decl());
        return p;
    }

    ReplInput parse_repl_input() {
        ReplInput r;
        if (at(Tok::KwLabel) || at(Tok::KwNominal) || at(Tok::KwType) || at(Tok::KwLet)) {
            r.kind = ReplInput::Kind::Declaration;
            r.decl = parse_decl();
        } else if (at(Tok::Ident) && peek(1).kind == Tok::BindArrow) {
            r.kind = ReplInput::Kind::Bind;
            r.name = cur().text;
            check_binder(r.name, cur().span);
            next();
            next();
            r.expr = parse_expr();
        } else {
            r.kind = ReplInput::Kind::Expression;
            r.expr = parse_expr();
        }
        expect(Tok::Eof);
        return r;
    }

    // Exposed for tests that want a bare expression.
    ExprPtr parse_expression_only() {
        ExprPtr e = parse_expr();
        expect(Tok::Eof);
        return e;
    }

  private:
    std::vector<Token> toks_;
    NameTable& names_;
    bool allow_rebinding_ = false;
    size_t pos_ = 0;

    const Token& cur() const { return toks_[pos_]; }
    const Token& peek(size_t n) const {
        size_t i = pos_ + n;
        return toks_[i < toks_.size() ? i : toks_.size() - 1];
    }
    bool at(Tok k) const { return cur().kind == k; }
    const Token& next() { return toks_[pos_++]; }

    [[noreturn]] void fail(const std::string& msg, const SourceSpan& sp) const {
        throw SyntaxError({ErrorKind::ParseError, sp, msg});
    }
    const Token& expect(Tok k) {
        if (!at(k))
            fail(std::string("expected ") + token_desc(k) + ", found " + token_desc(cur().kind),
                 cur().span);
        return next();
    }
    std::string expect_ident(const char* what) {
        if (!at(Tok::Ident)) fail(std::string("expected ") + what, cur().span);
        return next().text;
    }

    void check_binder(const std::string& name, const SourceSpan& sp) const {
        if (detail::is_reserved_name(name))
            fail("'" + name + "' is a reserved builtin name", sp);
    }
    void check_label(const std::string& name, const SourceSpan& sp) const {
        if (!names_.labels.count(name)) fail("undeclared label '" + name + "'", sp);
    }
    void check_nomination(const std::string& name, const SourceSpan& sp) const {
        if (!names_.nominations.count(name)) fail("undeclared nomination '" + name + "'", sp);
    }

    ExprPtr mk(ExprKind k, SourceSpan sp) {
        auto e = std::make_shared<Expr>();
        e->kind = k;
        e->span = sp;
        e->node_id = names_.next_node_id++;
        return e;
    }

    // ---------------------------------------------------------------- decls

    Decl parse_decl() {
        Decl d;
        d.span = cur().span;
        if (at(Tok::KwLabel)) {
            next();
            d.kind = DeclKind::Label;
            d.name = expect_ident("label name");
            if (names_.labels.count(d.name))
                fail("label '" + d.name + "' already declared", d.span);
            names_.labels.insert(d.name);
            return d;
        }
        if (at(Tok::KwNominal)) {
            next();
            d.kind = DeclKind::Nominal;
            d.name = expect_ident("nomination name");
            expect(Tok::KwExtends);
            expect(Tok::LBrace);
            if (!at(Tok::RBrace)) {
                for (;;) {
                    SourceSpan psp = cur().span;
                    std::string parent = expect_ident("parent nomination");
                    check_nomination(parent, psp);
                    d.parents.push_back(parent);
                    if (at(Tok::Comma)) { next(); continue; }
                    break;
                }
            }
            expect(Tok::RBrace);
            if (names_.nominations.count(d.name))
                fail("nomination '" + d.name + "' already declared", d.span);
            names_.nominations.insert(d.name);
            return d;
        }
        if (at(Tok::KwType)) {
            next();
            d.kind = DeclKind::TypeSyn;
            d.name = expect_ident("type name");
            if (names_.type_names.count(d.name) || detail::builtin_type_names().count(d.name))
                fail("type '" + d.name + "' already declared", d.span);
            while (at(Tok::Ident)) d.params.push_back(next().text);
            expect(Tok::Equals);
            // The body may mention the type being declared (iso-recursion).
            names_.type_names[d.name] = (int)d.params.size();
            d.type_body = parse_type();
            return d;
        }
        if (at(Tok::KwLet)) {
            next();
            d.kind = DeclKind::Binding;
            SourceSpan nsp = cur().span;
            d.name = expect_ident("binding name");
            check_binder(d.name, nsp);
            if (!allow_rebinding_ && names_.bindings.count(d.name))
                fail("duplicate top-level binding '" + d.name + "'", nsp);
            while (at(Tok::Ident)) {
                check_binder(cur().text, cur().span);
                d.params.push_back(next().text);
            }
            expect(Tok::Equals);
            names_.bindings.insert(d.name);
            d.expr_body = parse_expr();
            return d;
        }
        fail("expected a declaration (label, nominal, type, let)", cur().span);
    }

    // ----------------------------------------------------------------- expr
    //
    // Precedence, loosest to tightest:
    //   lambda / if / annotated casts
    //   record operators  .*.  .<.  .<++.   (right-associative)
    //   ==
    //   + -
    //   * /
    //   # field invocation
    //   application
    //   atoms

    ExprPtr parse_expr() {
        if (at(Tok::Backslash)) return parse_lambda();
        if (at(Tok::KwIf)) return parse_if();
        if (at(Tok::KwNarrow) || at(Tok::KwDeepNarrow) || at(Tok::KwDownCast) ||
            at(Tok::KwDynUpCast) || at(Tok::KwDynDownCast))
            return parse_annotated_cast();
        if (at(Tok::KwNUpCast)) return parse_n_up_cast();
        return parse_record_ops();
    }

    ExprPtr parse_lambda() {
        SourceSpan sp = cur().span;
        expect(Tok::Backslash);
        std::vector<std::string> params;
        while (at(Tok::Ident)) {
            check_binder(cur().text, cur().span);
            params.push_back(next().text);
        }
        if (params.empty()) fail("lambda needs at least one parameter", cur().span);
        expect(Tok::Arrow);
        ExprPtr body = parse_expr();
        auto e = mk(ExprKind::Lambda, sp);
        e->names = std::move(params);
        e->children.push_back(body);
        return e;
    }

    ExprPtr parse_if() {
        SourceSpan sp = cur().span;
        expect(Tok::KwIf);
        ExprPtr c = parse_expr();
        expect(Tok::KwThen);
        ExprPtr t = parse_expr();
        expect(Tok::KwElse);
        ExprPtr f = parse_expr();
        auto e = mk(ExprKind::If, sp);
        e->children = {c, t, f};
        return e;
    }

    ExprPtr parse_annotated_cast() {
        SourceSpan sp = cur().span;
        Tok k = next().kind;
        ExprPtr scrutinee = parse_field_level();
        expect(Tok::Colon);
        TypeExprPtr ty = parse_type();
        ExprKind ek;
        switch (k) {
            case Tok::KwNarrow: ek = ExprKind::Narrow; break;
            case Tok::KwDeepNarrow: ek = ExprKind::DeepNarrow; break;
            case Tok::KwDownCast: ek = ExprKind::DownCast; break;
            case Tok::KwDynUpCast: ek = ExprKind::DynUpCast; break;
            default: ek = ExprKind::DynDownCast; break;
        }
        auto e = mk(ek, sp);
        e->children.push_back(scrutinee);
        e->tyexpr = ty;
        return e;
    }

    ExprPtr parse_n_up_cast() {
        SourceSpan sp = cur().span;
        expect(Tok::KwNUpCast);
        ExprPtr scrutinee = parse_field_level();
        expect(Tok::Colon);
        SourceSpan nsp = cur().span;
        std::string nom = expect_ident("nomination name");
        check_nomination(nom, nsp);
        auto e = mk(ExprKind::NUpCast, sp);
        e->children.push_back(scrutinee);
        e->label = nom;
        return e;
    }

    bool at_record_pair() const {
        // `(` IDENT `=` ... but not `==`
        return at(Tok::LParen) && peek(1).kind == Tok::Ident && peek(2).kind == Tok::Equals;
    }

    ExprPtr parse_record_ops() {
        if (at_record_pair()) {
            SourceSpan sp = cur().span;
            next();  // (
            SourceSpan lsp = cur().span;
            std::string label = expect_ident("label");
            check_label(label, lsp);
            expect(Tok::Equals);
            ExprPtr value = parse_expr();
            expect(Tok::RParen);
            ExprKind k;
            if (at(Tok::OpExtend)) k = ExprKind::RecordExtend;
            else if (at(Tok::OpUpdate)) k = ExprKind::RecordUpdate;
            else {
                fail("record pair must be followed by '.*.' or '.<.'", cur().span);
            }
            next();
            ExprPtr base = parse_record_ops();  // right-associative
            auto e = mk(k, sp);
            e->label = label;
            e->children = {value, base};
            return e;
        }
        ExprPtr lhs = parse_binop_level();
        if (at(Tok::OpUnion)) {
            SourceSpan sp = cur().span;
            next();
            ExprPtr rhs = parse_record_ops();  // right-associative
            auto e = mk(ExprKind::RecordUnion, sp);
            e->children = {lhs, rhs};
            return e;
        }
        if (at(Tok::OpExtend) || at(Tok::OpUpdate))
            fail("left operand of record extension/update must be '(label = expr)'", cur().span);
        return lhs;
    }

    ExprPtr parse_binop_level() { return parse_compare(); }

    ExprPtr parse_compare() {
        ExprPtr lhs = parse_additive();
        if (at(Tok::EqEq)) {
            SourceSpan sp = cur().span;
            next();
            ExprPtr rhs = parse_additive();
            auto e = mk(ExprKind::BinOp, sp);
            e->label = "==";
            e->children = {lhs, rhs};
            return e;
        }
        return lhs;
    }

    ExprPtr parse_additive() {
        ExprPtr lhs = parse_multiplicative();
        while (at(Tok::Plus) || at(Tok::Minus)) {
            SourceSpan sp = cur().span;
            std::string op = next().text;
            ExprPtr rhs = parse_multiplicative();
            auto e = mk(ExprKind::BinOp, sp);
            e->label = op;
            e->children = {lhs, rhs};
            lhs = e;
        }
        return lhs;
    }

    ExprPtr parse_multiplicative() {
        ExprPtr lhs = parse_field_level();
        while (at(Tok::Star) || at(Tok::Slash)) {
            SourceSpan sp = cur().span;
            std::string op = next().text;
            ExprPtr rhs = parse_field_level();
            auto e = mk(ExprKind::BinOp, sp);
            e->label = op;
            e->children = {lhs, rhs};
            lhs = e;
        }
        return lhs;
    }

    ExprPtr parse_field_level() {
        ExprPtr lhs = parse_application();
        while (at(Tok::Hash)) {
            SourceSpan sp = cur().span;
            next();
            SourceSpan lsp = cur().span;
            std::string label = expect_ident("field label after '#'");
            check_label(label, lsp);
            auto e = mk(ExprKind::FieldGet, sp);
            e->label = label;
            e->children = {lhs};
            lhs = e;
        }
        return lhs;
    }

    bool at_atom_start() const {
        switch (cur().kind) {
            case Tok::Ident:
            case Tok::IntLit:
            case Tok::FloatLit:
            case Tok::StringLit:
            case Tok::KwTrue:
            case Tok::KwFalse:
            case Tok::KwEmptyRecord:
            case Tok::KwDo:
            case Tok::LParen:
            case Tok::LBrace:
            case Tok::LBracket:
                return true;
            default:
                return false;
        }
    }

    ExprPtr parse_application() {
        if (at(Tok::Ident) && cur().text == "nominate") {
            SourceSpan sp = cur().span;
            next();
            SourceSpan nsp = cur().span;
            std::string nom = expect_ident("nomination name");
            check_nomination(nom, nsp);
            ExprPtr arg = parse_atom();
            auto e = mk(ExprKind::Nominate, sp);
            e->label = nom;
            e->children = {arg};
            ExprPtr out = e;
            while (at_atom_start()) {
                auto app = mk(ExprKind::Apply, cur().span);
                app->children = {out, parse_atom()};
                out = app;
            }
            return out;
        }
        ExprPtr fn = parse_atom();
        while (at_atom_start()) {
            // A record pair `(l = e)` terminates the application chain; it
            // belongs to the enclosing record operator.
            if (at_record_pair()) break;
            auto app = mk(ExprKind::Apply, cur().span);
            app->children = {fn, parse_atom()};
            fn = app;
        }
        return fn;
    }

    ExprPtr parse_atom() {
        SourceSpan sp = cur().span;
        switch (cur().kind) {
            case Tok::IntLit: {
                auto e = mk(ExprKind::IntLit, sp);
                e->int_val = next().int_val;
                return e;
            }
            case Tok::FloatLit: {
                auto e = mk(ExprKind::FloatLit, sp);
                e->float_val = next().float_val;
                return e;
            }
            case Tok::StringLit: {
                auto e = mk(ExprKind::StringLit, sp);
                e->str_val = next().text;
                return e;
            }
            case Tok::KwTrue:
            case Tok::KwFalse: {
                auto e = mk(ExprKind::BoolLit, sp);
                e->bool_val = at(Tok::KwTrue);
                next();
                return e;
            }
            case Tok::KwEmptyRecord: {
                next();
                return mk(ExprKind::RecordEmpty, sp);
            }
            case Tok::KwDo:
                return parse_do();
            case Tok::Ident: {
                std::string name = next().text;
                auto it = detail::builtin_table().find(name);
                if (it != detail::builtin_table().end()) {
                    auto e = mk(ExprKind::BuiltinRef, sp);
                    e->builtin = it->second;
                    return e;
                }
                auto e = mk(ExprKind::Var, sp);
                e->str_val = name;
                return e;
            }
            case Tok::LParen: {
                next();
                if (at(Tok::RParen)) {
                    next();
                    return mk(ExprKind::UnitLit, sp);
                }
                ExprPtr inner = parse_expr();
                if (at(Tok::Comma)) {
                    next();
                    ExprPtr second = parse_expr();
                    expect(Tok::RParen);
                    auto e = mk(ExprKind::PairLit, sp);
                    e->children = {inner, second};
                    return e;
                }
                expect(Tok::RParen);
                return inner;
            }
            case Tok::LBracket: {
                next();
                auto e = mk(ExprKind::ListLit, sp);
                if (!at(Tok::RBracket)) {
                    for (;;) {
                        e->children.push_back(parse_expr());
                        if (at(Tok::Comma)) { next(); continue; }
                        break;
                    }
                }
                expect(Tok::RBracket);
                return e;
            }
            case Tok::LBrace: {
                // `{ l = e, ... }` sugars to extensions over the empty record.
                next();
                std::vector<std::pair<std::string, ExprPtr>> fields;
                if (!at(Tok::RBrace)) {
                    for (;;) {
                        SourceSpan lsp = cur().span;
                        std::string label = expect_ident("label");
                        check_label(label, lsp);
                        expect(Tok::Equals);
                        fields.emplace_back(label, parse_expr());
                        if (at(Tok::Comma)) { next(); continue; }
                        break;
                    }
                }
                expect(Tok::RBrace);
                ExprPtr acc = mk(ExprKind::RecordEmpty, sp);
                for (auto it = fields.rbegin(); it != fields.rend(); ++it) {
                    auto e = mk(ExprKind::RecordExtend, sp);
                    e->label = it->first;
                    e->children = {it->second, acc};
                    acc = e;
                }
                return acc;
            }
            default:
                fail(std::string("expected an expression, found ") + token_desc(cur().kind), sp);
        }
    }

    ExprPtr parse_do() {
        SourceSpan sp = cur().span;
        expect(Tok::KwDo);
        expect(Tok::LBrace);
        auto e = mk(ExprKind::Do, sp);
        for (;;) {
            Stmt st;
            st.span = cur().span;
            if (at(Tok::KwLet)) {
                next();
                st.kind = StmtKind::Let;
                SourceSpan nsp = cur().span;
                st.name = expect_ident("binder");
                if (st.name != "_") check_binder(st.name, nsp);
                expect(Tok::Equals);
                st.expr = parse_expr();
            } else if (at(Tok::Ident) && peek(1).kind == Tok::BindArrow) {
                st.kind = StmtKind::Bind;
                st.name = cur().text;
                if (st.name != "_") check_binder(st.name, cur().span);
                next();
                next();
                st.expr = parse_expr();
            } else {
                st.kind = StmtKind::Expr;
                st.expr = parse_expr();
            }
            e->stmts.push_back(std::move(st));
            if (at(Tok::Semi)) { next(); continue; }
            break;
        }
        expect(Tok::RBrace);
        if (e->stmts.back().kind != StmtKind::Expr)
            fail("the last statement of a do block must be an expression", e->stmts.back().span);
        return e;
    }

    // ----------------------------------------------------------------- types

    TypeExprPtr parse_type() {
        TypeExprPtr lhs = parse_type_app();
        if (at(Tok::Arrow)) {
            SourceSpan sp = cur().span;
            next();
            TypeExprPtr rhs = parse_type();  // right-associative
            auto t = std::make_shared<TypeExpr>();
            t->kind = TyExprKind::Fun;
            t->span = sp;
            t->args = {lhs, rhs};
            return t;
        }
        return lhs;
    }

    bool at_type_atom_start() const {
        switch (cur().kind) {
            case Tok::Ident:
            case Tok::LParen:
            case Tok::LBrace:
            case Tok::LBracket:
                return true;
            default:
                return false;
        }
    }

    TypeExprPtr parse_type_app() {
        if (at(Tok::Ident) && std::isupper((unsigned char)cur().text[0])) {
            SourceSpan sp = cur().span;
            std::string head = next().text;
            if (head == "N") {
                SourceSpan nsp = cur().span;
                std::string nom = expect_ident("nomination name");
                check_nomination(nom, nsp);
                TypeExprPtr payload = parse_type_atom();
                auto t = std::make_shared<TypeExpr>();
                t->kind = TyExprKind::Nominal;
                t->name = nom;
                t->span = sp;
                t->args = {payload};
                return t;
            }
            if (!detail::builtin_type_names().count(head) && !names_.type_names.count(head))
                fail("unknown type name '" + head + "'", sp);
            auto t = std::make_shared<TypeExpr>();
            t->kind = TyExprKind::Name;
            t->name = head;
            t->span = sp;
            while (at_type_atom_start()) t->args.push_back(parse_type_atom());
            return t;
        }
        return parse_type_atom();
    }

    TypeExprPtr parse_type_atom() {
        SourceSpan sp = cur().span;
        switch (cur().kind) {
            case Tok::Ident: {
                std::string name = next().text;
                auto t = std::make_shared<TypeExpr>();
                t->span = sp;
                if (std::isupper((unsigned char)name[0])) {
                    if (name == "N") fail("'N' requires a nomination and a payload type", sp);
                    if (!detail::builtin_type_names().count(name) &&
                        !names_.type_names.count(name))
                        fail("unknown type name '" + name + "'", sp);
                    t->kind = TyExprKind::Name;
                    t->name = name;
                } else {
                    t->kind = TyExprKind::Var;
                    t->name = name;
                }
                return t;
            }
            case Tok::LParen: {
                next();
                if (at(Tok::RParen)) {
                    next();
                    auto t = std::make_shared<TypeExpr>();
                    t->kind = TyExprKind::Unit;
                    t->span = sp;
                    return t;
                }
                TypeExprPtr inner = parse_type();
                expect(Tok::RParen);
                return inner;
            }
            case Tok::LBracket: {
                next();
                TypeExprPtr elem = parse_type();
                expect(Tok::RBracket);
                auto t = std::make_shared<TypeExpr>();
                t->kind = TyExprKind::List;
                t->span = sp;
                t->args = {elem};
                return t;
            }
            case Tok::LBrace: {
                next();
                auto t = std::make_shared<TypeExpr>();
                t->kind = TyExprKind::Record;
                t->span = sp;
                if (!at(Tok::RBrace)) {
                    for (;;) {
                        SourceSpan lsp = cur().span;
                        std::string label = expect_ident("label");
                        check_label(label, lsp);
                        expect(Tok::Colon);
                        t->fields.emplace_back(label, parse_type());
                        if (at(Tok::Comma)) { next(); continue; }
                        break;
                    }
                }
                expect(Tok::RBrace);
                return t;
            }
            default:
                fail(std::string("expected a type, found ") + token_desc(cur().kind), sp);
        }
    }
};

inline Program parse_program(const std::string& source, const std::string& file,
                             NameTable& names) {
    Parser p(tokenize(source, file), names);
    return p.parse_program();
}

inline ReplInput parse_repl_input(const std::string& line, const std::string& file,
                                  NameTable& names) {
    Parser p(tokenize(line, file), names, /*allow_rebinding=*/true);
    return p.parse_repl_input();
}

}  // namespace minioo

#endif
