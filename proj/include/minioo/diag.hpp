#ifndef MINIOO_DIAG_HPP
#define MINIOO_DIAG_HPP

#include <stdexcept>
#include <string>

namespace minioo {

// Half-open source region: `length` counts characters from (line, column).
struct SourceSpan {
    std::string file;
    int line = 1;    // 1-based
    int column = 1;  // 1-based
    int length = 0;

    std::string where() const {
        return file + ":" + std::to_string(line) + ":" + std::to_string(column);
    }
};

enum class ErrorKind {
    // syntax
    LexError,
    ParseError,
    // static
    UnboundName,
    Mismatch,
    InfiniteType,
    MissingField,
    DuplicateLabel,
    StupidCast,
    NotNarrowable,
    NotDeepSubtype,
    NotAncestor,
    NotConcrete,
    AbstractUse,
    PrematureSelfAccess,
    AmbiguousRow,
    ClassError,
    // runtime
    UserFail,
    DivisionByZero,
};

inline const char* error_kind_name(ErrorKind k) {
    switch (k) {
        case ErrorKind::LexError: return "LexError";
        case ErrorKind::ParseError: return "ParseError";
        case ErrorKind::UnboundName: return "UnboundName";
        case ErrorKind::Mismatch: return "Mismatch";
        case ErrorKind::InfiniteType: return "InfiniteType";
        case ErrorKind::MissingField: return "MissingField";
        case ErrorKind::DuplicateLabel: return "DuplicateLabel";
        case ErrorKind::StupidCast: return "StupidCast";
        case ErrorKind::NotNarrowable: return "NotNarrowable";
        case ErrorKind::NotDeepSubtype: return "NotDeepSubtype";
        case ErrorKind::NotAncestor: return "NotAncestor";
        case ErrorKind::NotConcrete: return "NotConcrete";
        case ErrorKind::AbstractUse: return "AbstractUse";
        case ErrorKind::PrematureSelfAccess: return "PrematureSelfAccess";
        case ErrorKind::AmbiguousRow: return "AmbiguousRow";
        case ErrorKind::ClassError: return "ClassError";
        case ErrorKind::UserFail: return "UserFail";
        case ErrorKind::DivisionByZero: return "DivisionByZero";
    }
    return "?";
}

struct Diagnostic {
    ErrorKind kind = ErrorKind::ParseError;
    SourceSpan span;
    std::string message;
};

// Lex/parse failures.
struct SyntaxError : std::runtime_error {
    Diagnostic diag;
    explicit SyntaxError(Diagnostic d) : std::runtime_error(d.message), diag(std::move(d)) {}
};

// Raised by the checker; one per binding, collected by the driver.
struct TypeError : std::runtime_error {
    Diagnostic diag;
    explicit TypeError(Diagnostic d) : std::runtime_error(d.message), diag(std::move(d)) {}
};

// Raised by the evaluator (UserFail, DivisionByZero, PrematureSelfAccess).
struct RuntimeFault : std::runtime_error {
    Diagnostic diag;
    explicit RuntimeFault(Diagnostic d) : std::runtime_error(d.message), diag(std::move(d)) {}
};

}  // namespace minioo

#endif
