#ifndef MINIOO_DRIVER_HPP
#define MINIOO_DRIVER_HPP

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "minioo/ast_print.hpp"
#include "minioo/eval.hpp"
#include "minioo/infer.hpp"
#include "minioo/parser.hpp"
#include "minioo/pretty.hpp"

namespace minioo {

struct DriverOptions {
    bool color = false;
    int max_errors = 20;
};

inline std::string render_diag(const Diagnostic& d, bool runtime, bool color) {
    const char* red = color ? "\033[31m" : "";
    const char* reset = color ? "\033[0m" : "";
    std::string loc = d.span.file.empty() ? "<input>" : d.span.where();
    std::string channel = runtime ? "runtime fault" : "error";
    return loc + ": " + red + channel + "[" + error_kind_name(d.kind) + "]" + reset + ": " +
           d.message;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// A parsed and checked program, ready to evaluate.
struct CheckedProgram {
    Program program;
    std::shared_ptr<NameTable> names;
    std::shared_ptr<AnnMap> anns;
    std::shared_ptr<Inferencer> inferencer;
    std::vector<std::pair<std::string, Scheme>> schemes;  // bindings in source order
    std::vector<Diagnostic> errors;

    bool ok() const { return errors.empty(); }
    const Scheme* scheme_of(const std::string& name) const {
        for (auto& [n, s] : schemes)
            if (n == name) return &s;
        return nullptr;
    }
};

// Checks a program given as a string (no prelude lookup).
inline CheckedProgram check_source(const std::string& source, const std::string& name,
                                   const DriverOptions& opts = {},
                                   const InferOptions& iopts = {}) {
    CheckedProgram cp;
    cp.names = std::make_shared<NameTable>();
    cp.anns = std::make_shared<AnnMap>();
    try {
        cp.program = parse_program(source, name, *cp.names);
    } catch (const SyntaxError& e) {
        cp.errors.push_back(e.diag);
        return cp;
    }
    cp.inferencer = std::make_shared<Inferencer>(*cp.names, *cp.anns, iopts);
    for (auto& d : cp.program.decls) {
        try {
            auto r = cp.inferencer->infer_decl(d);
            if (r) cp.schemes.push_back(*r);
        } catch (const TypeError& e) {
            cp.errors.push_back(e.diag);
            if (d.kind == DeclKind::Binding) {
                Scheme s;
                s.quantified = {-1};
                s.body = ty::var(-1);
                cp.inferencer->bind_global(d.name, s);
            }
            if ((int)cp.errors.size() >= opts.max_errors) break;
        }
    }
    return cp;
}

// Parses `path`, auto-including a sibling prelude.moo (shared label set)
// when present, and runs inference with per-binding error collection.
inline CheckedProgram load_and_check(const std::string& path, const DriverOptions& opts = {},
                                     const InferOptions& iopts = {}) {
    CheckedProgram cp;
    cp.names = std::make_shared<NameTable>();
    cp.anns = std::make_shared<AnnMap>();
    try {
        namespace fs = std::filesystem;
        fs::path p(path);
        fs::path prelude = p.parent_path() / "prelude.moo";
        if (p.filename() != "prelude.moo" && fs::exists(prelude)) {
            Program pre = parse_program(read_file(prelude.string()), prelude.string(),
                                        *cp.names);
            for (auto& d : pre.decls) cp.program.decls.push_back(std::move(d));
        }
        Program main = parse_program(read_file(path), path, *cp.names);
        for (auto& d : main.decls) cp.program.decls.push_back(std::move(d));
    } catch (const SyntaxError& e) {
        cp.errors.push_back(e.diag);
        return cp;
    }

    cp.inferencer = std::make_shared<Inferencer>(*cp.names, *cp.anns, iopts);
    for (auto& d : cp.program.decls) {
        try {
            auto r = cp.inferencer->infer_decl(d);
            if (r) cp.schemes.push_back(*r);
        } catch (const TypeError& e) {
            cp.errors.push_back(e.diag);
            if (d.kind == DeclKind::Binding) {
                // Poison the binding so later uses do not cascade.
                Scheme s;
                s.quantified = {-1};
                s.body = ty::var(-1);
                cp.inferencer->bind_global(d.name, s);
            }
            if ((int)cp.errors.size() >= opts.max_errors) break;
        }
    }
    return cp;
}

// Evaluates all bindings and runs `main`. Output goes through `store`.
// Returns the spec's exit contract: 0 ok, 1 type error, 2 runtime fault.
inline int run_checked(const CheckedProgram& cp, Store& store, std::ostream& err,
                       const DriverOptions& opts = {}) {
    if (!cp.ok()) {
        for (auto& d : cp.errors) err << render_diag(d, false, opts.color) << "\n";
        return 1;
    }
    const Scheme* main_scheme = cp.scheme_of("main");
    if (!main_scheme) {
        Diagnostic d{ErrorKind::UnboundName, {}, "program has no binding named main"};
        err << render_diag(d, false, opts.color) << "\n";
        return 1;
    }
    Evaluator ev(store, *cp.anns);
    try {
        for (auto& d : cp.program.decls)
            if (d.kind == DeclKind::Binding) ev.eval_binding(d);
        const ValuePtr* mainv = ev.globals()->find("main");
        if (!mainv || (*mainv)->k != VK::Action) {
            Diagnostic d{ErrorKind::Mismatch, {}, "main must be an action (IO type)"};
            err << render_diag(d, false, opts.color) << "\n";
            return 1;
        }
        ev.run_action(*mainv);
    } catch (const RuntimeFault& f) {
        err << render_diag(f.diag, true, opts.color) << "\n";
        return 2;
    }
    return 0;
}

struct RunResult {
    int exit_code = 0;
    std::string output;
    std::string diagnostics;
    size_t unset_reads = 0;
    std::vector<Diagnostic> errors;
};

// Checks and runs a program given as a string, capturing all channels.
inline RunResult run_source(const std::string& source, const std::string& name = "<test>",
                            const InferOptions& iopts = {}) {
    RunResult r;
    CheckedProgram cp = check_source(source, name, {}, iopts);
    Store store;
    std::ostringstream err;
    r.exit_code = run_checked(cp, store, err);
    r.output = store.output();
    r.diagnostics = err.str();
    r.unset_reads = store.unset_reads();
    r.errors = cp.errors;
    return r;
}

inline int cmd_run(const std::string& path, std::ostream& out, std::ostream& err,
                   const DriverOptions& opts = {}) {
    CheckedProgram cp = load_and_check(path, opts);
    Store store(&out);
    return run_checked(cp, store, err, opts);
}

// `check`: one line per binding, `name :: scheme`.
inline int cmd_check(const std::string& path, const std::string& binding_filter,
                     std::ostream& out, std::ostream& err, const DriverOptions& opts = {}) {
    CheckedProgram cp = load_and_check(path, opts);
    for (auto& [name, scheme] : cp.schemes) {
        if (!binding_filter.empty() && name != binding_filter) continue;
        out << name << " :: " << pretty_scheme(scheme) << "\n";
    }
    if (!cp.ok()) {
        for (auto& d : cp.errors) err << render_diag(d, false, opts.color) << "\n";
        return 1;
    }
    if (!binding_filter.empty() && !cp.scheme_of(binding_filter)) {
        Diagnostic d{ErrorKind::UnboundName, {}, "no binding named " + binding_filter};
        err << render_diag(d, false, opts.color) << "\n";
        return 1;
    }
    return 0;
}

// ---------------------------------------------------------------------------
// Golden-corpus runner
// ---------------------------------------------------------------------------

struct GoldenCase {
    std::string moo;       // program path
    std::string expected;  // .out or .err path
    bool is_err = false;
};

inline std::vector<GoldenCase> collect_golden_cases(const std::string& dir) {
    namespace fs = std::filesystem;
    std::vector<GoldenCase> cases;
    if (!fs::exists(dir)) return cases;
    std::vector<fs::path> moos;
    for (auto& e : fs::directory_iterator(dir))
        if (e.path().extension() == ".moo" && e.path().filename() != "prelude.moo")
            moos.push_back(e.path());
    std::sort(moos.begin(), moos.end());
    for (auto& m : moos) {
        fs::path out = m, errf = m;
        out.replace_extension(".out");
        errf.replace_extension(".err");
        GoldenCase g;
        g.moo = m.string();
        if (fs::exists(out)) {
            g.expected = out.string();
            g.is_err = false;
            cases.push_back(g);
        } else if (fs::exists(errf)) {
            g.expected = errf.string();
            g.is_err = true;
            cases.push_back(g);
        }
    }
    return cases;
}

// Byte-exact comparison modulo one trailing newline.
inline bool golden_equal(const std::string& expected, const std::string& actual) {
    if (expected == actual) return true;
    if (expected + "\n" == actual || expected == actual + "\n") return true;
    return false;
}

inline std::string simple_diff(const std::string& expected, const std::string& actual) {
    std::ostringstream o;
    std::istringstream ie(expected), ia(actual);
    std::vector<std::string> le, la;
    std::string line;
    while (std::getline(ie, line)) le.push_back(line);
    while (std::getline(ia, line)) la.push_back(line);
    size_t n = std::max(le.size(), la.size());
    for (size_t i = 0; i < n; ++i) {
        const std::string* e = i < le.size() ? &le[i] : nullptr;
        const std::string* a = i < la.size() ? &la[i] : nullptr;
        if (e && a && *e == *a) continue;
        if (e) o << "  - " << *e << "\n";
        if (a) o << "  + " << *a << "\n";
    }
    return o.str();
}

struct GoldenOutcome {
    std::string name;
    bool passed = false;
    std::string detail;
};

inline GoldenOutcome run_golden_case(const GoldenCase& g) {
    GoldenOutcome r;
    r.name = std::filesystem::path(g.moo).filename().string();
    std::string expected;
    try {
        expected = read_file(g.expected);
    } catch (const std::exception& e) {
        r.detail = e.what();
        return r;
    }
    DriverOptions opts;
    CheckedProgram cp = load_and_check(g.moo, opts);
    Store store;
    std::ostringstream errs;
    int code = run_checked(cp, store, errs, opts);

    if (!g.is_err) {
        if (code != 0) {
            r.detail = "expected success, exit " + std::to_string(code) + "\n" + errs.str();
            return r;
        }
        if (!golden_equal(expected, store.output())) {
            r.detail = "output mismatch:\n" + simple_diff(expected, store.output());
            return r;
        }
        r.passed = true;
        return r;
    }

    // .err cases: first line is the error kind, the rest is a substring of
    // the diagnostic.
    std::istringstream spec(expected);
    std::string kind, substr, ln;
    std::getline(spec, kind);
    std::ostringstream rest;
    bool first = true;
    while (std::getline(spec, ln)) {
        if (!first) rest << "\n";
        rest << ln;
        first = false;
    }
    substr = rest.str();
    while (!substr.empty() && (substr.back() == '\n' || substr.back() == '\r'))
        substr.pop_back();

    if (code == 0) {
        r.detail = "expected a " + kind + " diagnostic, but the program succeeded";
        return r;
    }
    std::string diags = errs.str();
    bool kind_ok = diags.find("[" + kind + "]") != std::string::npos;
    bool substr_ok = substr.empty() || diags.find(substr) != std::string::npos;
    if (!kind_ok || !substr_ok) {
        r.detail = "diagnostic mismatch; wanted kind " + kind + " with \"" + substr +
                   "\", got:\n" + diags;
        return r;
    }
    r.passed = true;
    return r;
}

inline int cmd_test(const std::string& dir, std::ostream& out, const DriverOptions& opts = {}) {
    const char* green = opts.color ? "\033[32m" : "";
    const char* red = opts.color ? "\033[31m" : "";
    const char* reset = opts.color ? "\033[0m" : "";
    auto cases = collect_golden_cases(dir);
    int passed = 0;
    for (auto& g : cases) {
        GoldenOutcome r = run_golden_case(g);
        if (r.passed) {
            ++passed;
            out << green << "PASS" << reset << " " << r.name << "\n";
        } else {
            out << red << "FAIL" << reset << " " << r.name << "\n" << r.detail << "\n";
        }
    }
    out << passed << "/" << cases.size() << " cases passed (" << cases.size() << " cases)\n";
    return passed == (int)cases.size() ? 0 : 1;
}

// ---------------------------------------------------------------------------
// REPL
// ---------------------------------------------------------------------------

class ReplSession {
  public:
    // Program output (print and friends) goes to `live`; defaults to `out`.
    explicit ReplSession(std::ostream& out, std::ostream& err, bool color = false,
                         std::ostream* live = nullptr)
        : out_(out), err_(err), color_(color), store_(live ? live : &out) {
        names_ = std::make_shared<NameTable>();
        anns_ = std::make_shared<AnnMap>();
        inferencer_ = std::make_shared<Inferencer>(*names_, *anns_);
        evaluator_ = std::make_shared<Evaluator>(store_, *anns_);
    }

    Store& store() { return store_; }

    // Feeds one line. Returns false when the session should end (:quit).
    bool feed(const std::string& line) {
        std::string trimmed = trim(line);
        if (trimmed.empty()) return true;
        if (trimmed == ":quit" || trimmed == ":q") return false;
        try {
            if (trimmed.rfind(":t ", 0) == 0) {
                Parser p(tokenize(trimmed.substr(3), "<repl>"), *names_);
                ExprPtr e = p.parse_expression_only();
                keep_.push_back(e);
                Scheme s = inferencer_->infer_repl_expr(e);
                out_ << pretty_scheme(s) << "\n";
                return true;
            }
            ReplInput in = parse_repl_input(trimmed, "<repl>", *names_);
            switch (in.kind) {
                case ReplInput::Kind::Declaration:
                    handle_decl(in.decl);
                    break;
                case ReplInput::Kind::Bind:
                    handle_bind(in.name, in.expr);
                    break;
                case ReplInput::Kind::Expression:
                    handle_expr(in.expr);
                    break;
            }
        } catch (const SyntaxError& e) {
            err_ << render_diag(e.diag, false, color_) << "\n";
        } catch (const TypeError& e) {
            err_ << render_diag(e.diag, false, color_) << "\n";
        } catch (const RuntimeFault& e) {
            err_ << render_diag(e.diag, true, color_) << "\n";
        }
        return true;
    }

  private:
    static std::string trim(const std::string& s) {
        size_t a = s.find_first_not_of(" \t\r\n");
        if (a == std::string::npos) return "";
        size_t b = s.find_last_not_of(" \t\r\n");
        return s.substr(a, b - a + 1);
    }

    void handle_decl(const Decl& d) {
        decls_.push_back(d);
        inferencer_->infer_decl(decls_.back());
        if (d.kind == DeclKind::Binding) evaluator_->eval_binding(decls_.back());
    }

    void handle_bind(const std::string& name, const ExprPtr& e) {
        keep_.push_back(e);
        Scheme s = inferencer_->infer_repl_expr(e);
        TypePtr body = inferencer_->apply_subst(s.body);
        if (body->tag != TyTag::Action)
            throw TypeError({ErrorKind::Mismatch, e->span,
                             "the right-hand side of <- must be an action (IO type)"});
        Scheme bound;
        bound.body = body->args[0];
        bound.quantified = s.quantified;
        bound.constraints = s.constraints;
        inferencer_->bind_global(name, bound);
        ValuePtr v = evaluator_->eval(evaluator_->globals(), e);
        ValuePtr r = evaluator_->run_action(v);
        evaluator_->define_global(name, r);
    }

    static bool showable(const ValuePtr& v) {
        switch (v->k) {
            case VK::Int:
            case VK::Float:
            case VK::Bool:
            case VK::String:
                return true;
            case VK::Pair:
                return showable(v->items[0]) && showable(v->items[1]);
            default:
                return false;
        }
    }

    void handle_expr(const ExprPtr& e) {
        keep_.push_back(e);
        Scheme s = inferencer_->infer_repl_expr(e);
        TypePtr body = inferencer_->apply_subst(s.body);
        ValuePtr v = evaluator_->eval(evaluator_->globals(), e);
        if (body->tag == TyTag::Action) v = evaluator_->run_action(v);
        // Unit results and objects print nothing.
        if (showable(v)) out_ << show_value(v) << "\n";
    }

    std::ostream& out_;
    std::ostream& err_;
    bool color_;
    Store store_;
    std::shared_ptr<NameTable> names_;
    std::shared_ptr<AnnMap> anns_;
    std::shared_ptr<Inferencer> inferencer_;
    std::shared_ptr<Evaluator> evaluator_;
    std::vector<Decl> decls_;
    std::vector<ExprPtr> keep_;
};

inline int repl_loop(std::istream& in, std::ostream& out, std::ostream& err,
                     bool interactive, bool color) {
    ReplSession session(out, err, color, &out);
    if (interactive) out << "MiniOO repl. :t EXPR shows a type, :quit exits.\n";
    std::string line;
    for (;;) {
        if (interactive) out << "minioo> " << std::flush;
        if (!std::getline(in, line)) break;
        if (!session.feed(line)) break;
    }
    return 0;
}

}  // namespace minioo

#endif
