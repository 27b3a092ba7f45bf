#ifndef MINIOO_VALUE_HPP
#define MINIOO_VALUE_HPP

#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "minioo/ast.hpp"
#include "minioo/rows.hpp"
#include "minioo/types.hpp"

namespace minioo {

struct Value;
using ValuePtr = std::shared_ptr<Value>;

struct Env;
using EnvPtr = std::shared_ptr<Env>;

struct Env {
    std::unordered_map<std::string, ValuePtr> vars;
    EnvPtr parent;

    static EnvPtr child_of(EnvPtr p) {
        auto e = std::make_shared<Env>();
        e->parent = std::move(p);
        return e;
    }
    const ValuePtr* find(const std::string& n) const {
        for (const Env* e = this; e; e = e->parent.get()) {
            auto it = e->vars.find(n);
            if (it != e->vars.end()) return &it->second;
        }
        return nullptr;
    }
};

enum class VK {
    Int,
    Float,
    Bool,
    String,
    Unit,
    Pair,
    List,
    Closure,
    Record,
    Ref,
    Action,
    Union,     // tagged branch of a right-nested Either
    Nominal,
    Dyn,       // dynamics-based upcast: narrowed view + embedded original
    SelfCell,  // lazily routed self reference used during staged construction
    Builtin,   // possibly partially applied builtin
    WrappedFn, // function coerced by a deep-narrow plan
};

enum class ActionK { Do, Prim, Pure, Wrapped };

struct Value {
    VK k = VK::Unit;

    long long i = 0;
    double f = 0;
    bool b = false;
    std::string s;

    std::vector<ValuePtr> items;          // pair / list / collected builtin args
    std::vector<std::string> params;      // closure
    const Expr* body = nullptr;           // closure body / Do node
    EnvPtr env;
    std::map<Label, ValuePtr> fields;     // record, canonical label order
    size_t id = 0;                        // ref / self cell
    std::optional<std::set<Label>> view;  // self-cell restriction
    std::vector<bool> path;               // union tags, true = Right
    ValuePtr payload;                     // union / nominal / dyn view / pure action / wrapped inner
    std::string nom;                      // nominal name
    ValuePtr full;                        // dyn: the embedded original record
    TypePtr dyn_type;                     // dyn: ground type of the original
    Builtin bi = Builtin::Fix;
    const Expr* origin = nullptr;         // builtin's source node (annotation key)
    ActionK ak = ActionK::Pure;
    PlanPtr plan_arg, plan_res;           // WrappedFn / Wrapped action
    SourceSpan span;                      // prim action provenance
};

namespace val {

inline ValuePtr mk(VK k) {
    auto v = std::make_shared<Value>();
    v->k = k;
    return v;
}
inline ValuePtr int_(long long i) { auto v = mk(VK::Int); v->i = i; return v; }
inline ValuePtr float_(double f) { auto v = mk(VK::Float); v->f = f; return v; }
inline ValuePtr bool_(bool b) { auto v = mk(VK::Bool); v->b = b; return v; }
inline ValuePtr string_(std::string s) { auto v = mk(VK::String); v->s = std::move(s); return v; }
inline ValuePtr unit() { auto v = mk(VK::Unit); return v; }
inline ValuePtr pair(ValuePtr a, ValuePtr b) {
    auto v = mk(VK::Pair);
    v->items = {std::move(a), std::move(b)};
    return v;
}
inline ValuePtr list(std::vector<ValuePtr> xs) {
    auto v = mk(VK::List);
    v->items = std::move(xs);
    return v;
}
inline ValuePtr pure_action(ValuePtr x) {
    auto v = mk(VK::Action);
    v->ak = ActionK::Pure;
    v->payload = std::move(x);
    return v;
}

}  // namespace val

// Mutable-reference heap, the self-cell table for staged construction, and
// the program's output sink.
class Store {
  public:
    explicit Store(std::ostream* live = nullptr) : live_(live) {}

    size_t alloc(ValuePtr v) {
        refs_.push_back(std::move(v));
        return refs_.size() - 1;
    }
    const ValuePtr& read(size_t id) const { return refs_.at(id); }
    void write(size_t id, ValuePtr v) { refs_.at(id) = std::move(v); }
    size_t ref_count() const { return refs_.size(); }

    size_t new_cell() {
        cells_.emplace_back(std::nullopt);
        return cells_.size() - 1;
    }
    bool cell_set(size_t id) const { return cells_.at(id).has_value(); }
    const ValuePtr& read_cell(size_t id) const { return *cells_.at(id); }
    void patch_cell(size_t id, ValuePtr v) { cells_.at(id) = std::move(v); }
    void note_unset_read() { ++unset_reads_; }
    size_t unset_reads() const { return unset_reads_; }

    void emit(const std::string& text) {
        buffer_ += text;
        if (live_) (*live_) << text << std::flush;
    }
    const std::string& output() const { return buffer_; }

  private:
    std::vector<ValuePtr> refs_;
    std::vector<std::optional<ValuePtr>> cells_;
    size_t unset_reads_ = 0;
    std::string buffer_;
    std::ostream* live_;
};

}  // namespace minioo

#endif
