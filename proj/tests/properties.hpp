// Shared property suites: exercised by the unit tests and re-run verbatim by
// the acceptance binary. Exact agreement is required everywhere.
#ifndef MINIOO_TESTS_PROPERTIES_HPP
#define MINIOO_TESTS_PROPERTIES_HPP

#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "minioo/eval.hpp"
#include "minioo/rows.hpp"
#include "minioo/types.hpp"
#include "minioo/value.hpp"

namespace minioo::props {

struct PropResult {
    bool ok = true;
    std::string detail;
};

// All rows drawn from 4 labels x 2 base types (each label absent, Int, or
// Bool): 81 rows per side, exhaustive.
inline std::vector<Row> small_row_space() {
    const std::vector<Label> labels = {"a", "b", "c", "d"};
    std::vector<Row> rows;
    for (int mask = 0; mask < 81; ++mask) {
        int m = mask;
        std::vector<std::pair<Label, TypePtr>> entries;
        for (auto& l : labels) {
            int choice = m % 3;
            m /= 3;
            if (choice == 1) entries.emplace_back(l, ty::int_());
            else if (choice == 2) entries.emplace_back(l, ty::bool_());
        }
        rows.push_back(Row::from_entries(std::move(entries)));
    }
    return rows;
}

inline bool rows_equal(const Row& a, const Row& b) {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i) {
        if (a.entries()[i].first != b.entries()[i].first) return false;
        if (!equal_types(a.entries()[i].second, b.entries()[i].second)) return false;
    }
    return true;
}

// width_subtype is a partial order: reflexive, antisymmetric, transitive.
inline PropResult width_partial_order() {
    auto rows = small_row_space();
    for (auto& r : rows)
        if (!width_subtype(r, r)) return {false, "width_subtype not reflexive"};
    for (auto& s : rows)
        for (auto& t : rows)
            if (width_subtype(s, t) && width_subtype(t, s) && !rows_equal(s, t))
                return {false, "width_subtype not antisymmetric"};
    for (auto& a : rows)
        for (auto& b : rows) {
            if (!width_subtype(a, b)) continue;
            for (auto& c : rows)
                if (width_subtype(b, c) && !width_subtype(a, c))
                    return {false, "width_subtype not transitive"};
        }
    return {};
}

// Width is a special case of depth.
inline PropResult width_implies_depth() {
    auto rows = small_row_space();
    for (auto& s : rows)
        for (auto& t : rows)
            if (width_subtype(s, t) && !depth_subtype(ty::record(s), ty::record(t)))
                return {false, "width_subtype without depth_subtype"};
    return {};
}

// lub_row against the brute-force lattice oracle.
inline PropResult lub_oracle() {
    auto rows = small_row_space();
    for (auto& a : rows) {
        for (auto& b : rows) {
            bool clash = false;
            for (auto& l : row_intersect(a, b))
                if (!equal_types(*a.find(l), *b.find(l))) clash = true;
            Row lub;
            bool defined = true;
            try {
                lub = lub_row(a, b);
            } catch (const RowError&) {
                defined = false;
            }
            if (defined == clash)
                return {false, "lub_row defined-ness disagrees with the clash condition"};
            if (!defined) continue;
            if (!rows_equal(lub, lub_row(b, a))) return {false, "lub_row not commutative"};
            if (!width_subtype(a, lub) || !width_subtype(b, lub))
                return {false, "lub_row is not an upper bound"};
            for (auto& c : rows)
                if (width_subtype(a, c) && width_subtype(b, c) && !width_subtype(lub, c))
                    return {false, "lub_row is not the least upper bound"};
        }
    }
    return {};
}

// Random structural types of depth <= 3 over two bases.
inline TypePtr random_type(std::mt19937_64& rng, int depth) {
    auto pick = [&](int n) { return (int)(rng() % n); };
    if (depth == 0) return pick(2) ? ty::int_() : ty::bool_();
    switch (pick(6)) {
        case 0: return ty::int_();
        case 1: return ty::bool_();
        case 2: return ty::fun(random_type(rng, depth - 1), random_type(rng, depth - 1));
        case 3: return ty::action(random_type(rng, depth - 1));
        case 4: return ty::ref(random_type(rng, depth - 1));
        default: {
            const std::vector<Label> labels = {"a", "b", "c", "d"};
            int n = 1 + pick(3);
            std::vector<std::pair<Label, TypePtr>> entries;
            for (int i = 0; i < n; ++i) {
                Label l = labels[pick((int)labels.size())];
                bool dup = false;
                for (auto& [el, et] : entries) dup = dup || el == l;
                if (!dup) entries.emplace_back(l, random_type(rng, depth - 1));
            }
            return ty::record(Row::from_entries(std::move(entries)));
        }
    }
}

// Derives a supertype of t by dropping record fields and recursing
// co/contra-variantly, so true cases are well represented.
inline TypePtr weaken(std::mt19937_64& rng, const TypePtr& t) {
    auto pick = [&](int n) { return (int)(rng() % n); };
    switch (t->tag) {
        case TyTag::Record: {
            std::vector<std::pair<Label, TypePtr>> entries;
            for (auto& [l, ft] : t->row.entries())
                if (pick(3)) entries.emplace_back(l, weaken(rng, ft));
            return ty::record(Row::from_entries(std::move(entries)));
        }
        case TyTag::Action:
            return ty::action(weaken(rng, t->args[0]));
        case TyTag::Fun:
            // Keep the argument (strengthening needs a dual walk); weaken
            // the result.
            return ty::fun(t->args[0], weaken(rng, t->args[1]));
        default:
            return t;
    }
}

// derive_deep_narrow succeeds exactly when depth_subtype holds.
inline PropResult deep_narrow_agreement(int pairs = 1000) {
    std::mt19937_64 rng(12345);
    for (int i = 0; i < pairs; ++i) {
        TypePtr s = random_type(rng, 3);
        TypePtr t;
        switch (rng() % 3) {
            case 0: t = random_type(rng, 3); break;
            case 1: t = s; break;
            default: t = weaken(rng, s); break;
        }
        bool subtype = depth_subtype(s, t);
        bool derivable = true;
        try {
            derive_deep_narrow(s, t);
        } catch (const RowError&) {
            derivable = false;
        }
        if (subtype != derivable) {
            std::ostringstream o;
            o << "disagreement at pair " << i << ": depth_subtype=" << subtype
              << " derive=" << derivable;
            return {false, o.str()};
        }
    }
    return {};
}

// is_ancestor against a brute-force transitive closure on random DAGs.
inline PropResult ancestor_oracle(int graphs = 200) {
    std::mt19937_64 rng(67890);
    for (int g = 0; g < graphs; ++g) {
        int n = 2 + (int)(rng() % 7);  // up to 8 nominations
        NominalGraph graph;
        std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
        for (int i = 0; i < n; ++i) {
            std::vector<std::string> parents;
            reach[i][i] = true;
            for (int j = 0; j < i; ++j) {
                if (rng() % 3 == 0) {
                    parents.push_back("N" + std::to_string(j));
                    for (int k = 0; k < n; ++k)
                        if (reach[j][k]) reach[i][k] = true;
                }
            }
            graph.declare("N" + std::to_string(i), parents);
        }
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                bool got = graph.is_ancestor("N" + std::to_string(i), "N" + std::to_string(j));
                if (got != reach[i][j])
                    return {false, "is_ancestor disagrees with the closure oracle"};
            }
    }
    return {};
}

// Invoking a field on a narrowed record behaves exactly like invoking it on
// the original: same result, same output.
inline PropResult narrow_commutation(int trials = 500) {
    std::mt19937_64 rng(24680);
    AnnMap anns;
    const std::vector<Label> labels = {"a", "b", "c", "d", "e"};
    for (int trial = 0; trial < trials; ++trial) {
        int n = 1 + (int)(rng() % labels.size());
        auto rec = val::mk(VK::Record);
        for (int i = 0; i < n; ++i) {
            auto act = val::mk(VK::Action);
            act->ak = ActionK::Prim;
            act->bi = Builtin::Print;
            act->items = {val::int_((long long)(rng() % 1000))};
            rec->fields[labels[i]] = act;
        }
        std::set<Label> target;
        for (int i = 0; i < n; ++i)
            if (rng() % 2) target.insert(labels[i]);
        if (target.empty()) target.insert(labels[0]);
        Label probe = *std::next(target.begin(), (long)(rng() % target.size()));

        Store s1, s2;
        Evaluator e1(s1, anns), e2(s2, anns);
        ValuePtr direct = e1.run_action(e1.field_get(rec, probe, {}));
        ValuePtr narrowed = e2.run_action(
            e2.field_get(e2.narrow_value(rec, target, {}), probe, {}));
        if (s1.output() != s2.output())
            return {false, "output differs between narrowed and direct invocation"};
        if (show_value(direct) != show_value(narrowed))
            return {false, "result differs between narrowed and direct invocation"};
    }
    return {};
}

}  // namespace minioo::props

#endif
