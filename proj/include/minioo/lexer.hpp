#ifndef MINIOO_LEXER_HPP
#define MINIOO_LEXER_HPP

#include <cctype>
#include <string>
#include <vector>

#include "minioo/diag.hpp"

namespace minioo {

enum class Tok {
    Ident,
    IntLit,
    FloatLit,
    StringLit,
    // keywords
    KwLabel,
    KwNominal,
    KwExtends,
    KwType,
    KwLet,
    KwDo,
    KwIf,
    KwThen,
    KwElse,
    KwTrue,
    KwFalse,
    KwNarrow,
    KwDeepNarrow,
    KwDownCast,
    KwDynUpCast,
    KwDynDownCast,
    KwNUpCast,
    KwEmptyRecord,
    // punctuation / operators
    Backslash,
    Arrow,      // ->
    BindArrow,  // <-
    Equals,     // =
    EqEq,       // ==
    Semi,
    Comma,
    Colon,
    Hash,
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Plus,
    Minus,
    Star,
    Slash,
    OpExtend,  // .*.
    OpUpdate,  // .<.
    OpUnion,   // .<++.
    Eof,
};

struct Token {
    Tok kind;
    std::string text;
    SourceSpan span;
    long long int_val = 0;
    double float_val = 0;
};

inline const char* token_desc(Tok k) {
    switch (k) {
        case Tok::Ident: return "identifier";
        case Tok::IntLit: return "integer literal";
        case Tok::FloatLit: return "float literal";
        case Tok::StringLit: return "string literal";
        case Tok::KwLabel: return "'label'";
        case Tok::KwNominal: return "'nominal'";
        case Tok::KwExtends: return "'extends'";
        case Tok::KwType: return "'type'";
        case Tok::KwLet: return "'let'";
        case Tok::KwDo: return "'do'";
        case Tok::KwIf: return "'if'";
        case Tok::KwThen: return "'then'";
        case Tok::KwElse: return "'else'";
        case Tok::KwTrue: return "'true'";
        case Tok::KwFalse: return "'false'";
        case Tok::KwNarrow: return "'narrow'";
        case Tok::KwDeepNarrow: return "'deepNarrow'";
        case Tok::KwDownCast: return "'downCast'";
        case Tok::KwDynUpCast: return "'dynUpCast'";
        case Tok::KwDynDownCast: return "'dynDownCast'";
        case Tok::KwNUpCast: return "'nUpCast'";
        case Tok::KwEmptyRecord: return "'emptyRecord'";
        case Tok::Backslash: return "'\\'";
        case Tok::Arrow: return "'->'";
        case Tok::BindArrow: return "'<-'";
        case Tok::Equals: return "'='";
        case Tok::EqEq: return "'=='";
        case Tok::Semi: return "';'";
        case Tok::Comma: return "','";
        case Tok::Colon: return "':'";
        case Tok::Hash: return "'#'";
        case Tok::LParen: return "'('";
        case Tok::RParen: return "')'";
        case Tok::LBrace: return "'{'";
        case Tok::RBrace: return "'}'";
        case Tok::LBracket: return "'['";
        case Tok::RBracket: return "']'";
        case Tok::Plus: return "'+'";
        case Tok::Minus: return "'-'";
        case Tok::Star: return "'*'";
        case Tok::Slash: return "'/'";
        case Tok::OpExtend: return "'.*.'";
        case Tok::OpUpdate: return "'.<.'";
        case Tok::OpUnion: return "'.<++.'";
        case Tok::Eof: return "end of input";
    }
    return "?";
}

namespace detail {

inline bool ident_start(char c) { return std::isalpha((unsigned char)c) || c == '_'; }
inline bool ident_char(char c) { return std::isalnum((unsigned char)c) || c == '_' || c == '\''; }

}  // namespace detail

// Comments run from `--` to end of line; whitespace is discarded.
inline std::vector<Token> tokenize(const std::string& source, const std::string& file) {
    std::vector<Token> out;
    size_t i = 0;
    int line = 1, col = 1;

    auto span_here = [&](int len) {
        SourceSpan s;
        s.file = file;
        s.line = line;
        s.column = col;
        s.length = len;
        return s;
    };
    auto advance = [&](size_t n) {
        for (size_t k = 0; k < n && i < source.size(); ++k, ++i) {
            if (source[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    };
    auto push = [&](Tok k, const std::string& text, SourceSpan sp) {
        Token t;
        t.kind = k;
        t.text = text;
        t.span = sp;
        out.push_back(std::move(t));
    };
    auto fail = [&](const std::string& msg, SourceSpan sp) -> void {
        throw SyntaxError({ErrorKind::LexError, sp, msg});
    };

    while (i < source.size()) {
        char c = source[i];
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            advance(1);
            continue;
        }
        if (c == '-' && i + 1 < source.size() && source[i + 1] == '-') {
            while (i < source.size() && source[i] != '\n') advance(1);
            continue;
        }
        if (detail::ident_start(c)) {
            size_t j = i;
            while (j < source.size() && detail::ident_char(source[j])) ++j;
            std::string word = source.substr(i, j - i);
            SourceSpan sp = span_here((int)word.size());
            Tok k = Tok::Ident;
            if (word == "label") k = Tok::KwLabel;
            else if (word == "nominal") k = Tok::KwNominal;
            else if (word == "extends") k = Tok::KwExtends;
            else if (word == "type") k = Tok::KwType;
            else if (word == "let") k = Tok::KwLet;
            else if (word == "do") k = Tok::KwDo;
            else if (word == "if") k = Tok::KwIf;
            else if (word == "then") k = Tok::KwThen;
            else if (word == "else") k = Tok::KwElse;
            else if (word == "true") k = Tok::KwTrue;
            else if (word == "false") k = Tok::KwFalse;
            else if (word == "narrow") k = Tok::KwNarrow;
            else if (word == "deepNarrow") k = Tok::KwDeepNarrow;
            else if (word == "downCast") k = Tok::KwDownCast;
            else if (word == "dynUpCast") k = Tok::KwDynUpCast;
            else if (word == "dynDownCast") k = Tok::KwDynDownCast;
            else if (word == "nUpCast") k = Tok::KwNUpCast;
            else if (word == "emptyRecord") k = Tok::KwEmptyRecord;
            push(k, word, sp);
            advance(word.size());
            continue;
        }
        if (std::isdigit((unsigned char)c)) {
            size_t j = i;
            while (j < source.size() && std::isdigit((unsigned char)source[j])) ++j;
            bool is_float = false;
            if (j + 1 < source.size() && source[j] == '.' && std::isdigit((unsigned char)source[j + 1])) {
                is_float = true;
                ++j;
                while (j < source.size() && std::isdigit((unsigned char)source[j])) ++j;
            }
            std::string num = source.substr(i, j - i);
            SourceSpan sp = span_here((int)num.size());
            Token t;
            t.kind = is_float ? Tok::FloatLit : Tok::IntLit;
            t.text = num;
            t.span = sp;
            if (is_float) t.float_val = std::stod(num);
            else t.int_val = std::stoll(num);
            out.push_back(std::move(t));
            advance(num.size());
            continue;
        }
        if (c == '"') {
            SourceSpan sp = span_here(0);
            size_t j = i + 1;
            std::string value;
            bool closed = false;
            while (j < source.size()) {
                char d = source[j];
                if (d == '"') {
                    closed = true;
                    ++j;
                    break;
                }
                if (d == '\n') break;
                if (d == '\\') {
                    if (j + 1 >= source.size()) break;
                    char e = source[j + 1];
                    if (e == '"') value += '"';
                    else if (e == '\\') value += '\\';
                    else if (e == 'n') value += '\n';
                    else fail(std::string("unknown escape '\\") + e + "' in string literal", sp);
                    j += 2;
                    continue;
                }
                value += d;
                ++j;
            }
            if (!closed) fail("unterminated string literal", sp);
            sp.length = (int)(j - i);
            Token t;
            t.kind = Tok::StringLit;
            t.text = value;
            t.span = sp;
            out.push_back(std::move(t));
            advance(j - i);
            continue;
        }

        auto two = source.substr(i, 2);
        auto three = source.substr(i, 3);
        auto five = source.substr(i, 5);
        if (five == ".<++.") { push(Tok::OpUnion, five, span_here(5)); advance(5); continue; }
        if (three == ".*.") { push(Tok::OpExtend, three, span_here(3)); advance(3); continue; }
        if (three == ".<.") { push(Tok::OpUpdate, three, span_here(3)); advance(3); continue; }
        if (two == "->") { push(Tok::Arrow, two, span_here(2)); advance(2); continue; }
        if (two == "<-") { push(Tok::BindArrow, two, span_here(2)); advance(2); continue; }
        if (two == "==") { push(Tok::EqEq, two, span_here(2)); advance(2); continue; }

        Tok k;
        switch (c) {
            case '\\': k = Tok::Backslash; break;
            case '=': k = Tok::Equals; break;
            case ';': k = Tok::Semi; break;
            case ',': k = Tok::Comma; break;
            case ':': k = Tok::Colon; break;
            case '#': k = Tok::Hash; break;
            case '(': k = Tok::LParen; break;
            case ')': k = Tok::RParen; break;
            case '{': k = Tok::LBrace; break;
            case '}': k = Tok::RBrace; break;
            case '[': k = Tok::LBracket; break;
            case ']': k = Tok::RBracket; break;
            case '+': k = Tok::Plus; break;
            case '-': k = Tok::Minus; break;
            case '*': k = Tok::Star; break;
            case '/': k = Tok::Slash; break;
            default:
                fail(std::string("illegal character '") + c + "'", span_here(1));
                return out;  // unreachable
        }
        push(k, std::string(1, c), span_here(1));
        advance(1);
    }

    Token eof;
    eof.kind = Tok::Eof;
    eof.span = span_here(0);
    out.push_back(std::move(eof));
    return out;
}

}  // namespace minioo

#endif
