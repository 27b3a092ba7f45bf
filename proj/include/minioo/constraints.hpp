#ifndef MINIOO_CONSTRAINTS_HPP
#define MINIOO_CONSTRAINTS_HPP

#include <string>
#include <vector>

#include "minioo/diag.hpp"
#include "minioo/types.hpp"

namespace minioo {

// Deferred typing obligations. Constraints on heads that are still type
// variables stay pending; the solver revisits them until a fixpoint.
enum class CKind {
    HasField,       // HasField(label, record type, field type)
    Lacks,          // Lacks(label, record type)
    ClassNum,       // types[0] is Int or Float
    ClassShow,      // types[0] is showable
    RowExtendTo,    // types[0] + (label : types[1]) = types[2]
    RowUnionTo,     // left-biased union of types[0], types[1] = types[2]
    LubConsTo,      // lub list cons: head types[0], tail types[1], list types[2]
    UnionConsTo,    // union list cons: head types[0], tail types[1], list types[2]
    Narrowable,     // width-narrow types[0] to types[1]
    DeepNarrowable, // deep-narrow types[0] to types[1]
    DownCastable,   // union types[0] down to branch types[1]
    DynUpCastable,  // dyn-upcast source types[0] to view types[1]
    DynDownTarget,  // dyn-downcast of types[0] (a Dyn) to ground target types[1]
    NUpCastTo,      // types[0] is N f x; ancestor name in `name`; result types[1] = N name x
    AnonymizeTo,    // types[0] is N f x; result types[1] = x
    RecordResult,   // types[0] must resolve to a plain record (construct's function)
};

struct Constraint {
    CKind kind;
    Label label;               // HasField / Lacks / RowExtendTo
    std::string name;          // NUpCastTo target nomination
    std::vector<TypePtr> types;
    SourceSpan span;
    int node_id = 0;           // expression the constraint annotates, if any
};

struct Scheme {
    std::vector<int> quantified;
    std::vector<Constraint> constraints;
    TypePtr body;
};

}  // namespace minioo

#endif
