#pragma once

// Recursive-descent parser for the formula grammar in formula.hpp.
// Reports syntax errors with line/column; dialect violations are raised
// separately by validate_dialect so callers can tell the two apart.

#include "gamut/formula.hpp"

#include <cctype>
#include <string>
#include <vector>

namespace gamut {

namespace detail {

struct FTok {
    enum Kind { Ident, LDouble, RDouble, LParen, RParen, Comma, Amp, Bar, Bang, End };
    Kind kind;
    std::string text;
    int line, col;
};

inline std::vector<FTok> flex(const std::string& src) {
    std::vector<FTok> toks;
    int line = 1, col = 1;
    size_t i = 0;
    auto push = [&](FTok::Kind k, std::string t) {
        toks.push_back({k, std::move(t), line, col});
    };
    while (i < src.size()) {
        char c = src[i];
        if (c == '\n') { ++line; col = 1; ++i; continue; }
        if (std::isspace(static_cast<unsigned char>(c))) { ++col; ++i; continue; }
        if (c == '<' && i + 1 < src.size() && src[i + 1] == '<') {
            push(FTok::LDouble, "<<"); i += 2; col += 2; continue;
        }
        if (c == '>' && i + 1 < src.size() && src[i + 1] == '>') {
            push(FTok::RDouble, ">>"); i += 2; col += 2; continue;
        }
        switch (c) {
        case '(': push(FTok::LParen, "("); ++i; ++col; continue;
        case ')': push(FTok::RParen, ")"); ++i; ++col; continue;
        case ',': push(FTok::Comma, ","); ++i; ++col; continue;
        case '&': push(FTok::Amp, "&"); ++i; ++col; continue;
        case '|': push(FTok::Bar, "|"); ++i; ++col; continue;
        case '!': push(FTok::Bang, "!"); ++i; ++col; continue;
        default: break;
        }
        if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
            size_t j = i;
            while (j < src.size() &&
                   (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_' ||
                    src[j] == '.' || src[j] == '@'))
                ++j;
            push(FTok::Ident, src.substr(i, j - i));
            col += static_cast<int>(j - i);
            i = j;
            continue;
        }
        throw Error(ErrorKind::Syntax, std::string("unexpected character '") + c + "'",
                    line, col);
    }
    toks.push_back({FTok::End, "", line, col});
    return toks;
}

class FormulaParser {
public:
    explicit FormulaParser(const std::string& src) : toks_(flex(src)) {}

    FormulaPtr parse() {
        FormulaPtr f = state_or();
        expect(FTok::End, "end of input");
        return f;
    }

private:
    const FTok& cur() const { return toks_[pos_]; }
    bool is_ident(const char* kw) const {
        return cur().kind == FTok::Ident && cur().text == kw;
    }
    void advance() { ++pos_; }
    [[noreturn]] void fail(const std::string& what) {
        throw Error(ErrorKind::Syntax,
                    "expected " + what + ", got '" +
                        (cur().kind == FTok::End ? "<end>" : cur().text) + "'",
                    cur().line, cur().col);
    }
    void expect(FTok::Kind k, const char* what) {
        if (cur().kind != k) fail(what);
        if (k != FTok::End) advance();
    }

    bool is_temporal_kw() const {
        return is_ident("X") || is_ident("G") || is_ident("F") || is_ident("U");
    }

    // state := and ('|' and)*      left-assoc
    FormulaPtr state_or() {
        FormulaPtr f = state_and();
        while (cur().kind == FTok::Bar) {
            advance();
            f = f_or(f, state_and());
        }
        return f;
    }

    FormulaPtr state_and() {
        FormulaPtr f = state_unary();
        while (cur().kind == FTok::Amp) {
            advance();
            f = f_and(f, state_unary());
        }
        return f;
    }

    FormulaPtr state_unary() {
        if (cur().kind == FTok::Bang) {
            advance();
            return f_not(state_unary());
        }
        if (cur().kind == FTok::LParen) {
            advance();
            FormulaPtr f = state_or();
            expect(FTok::RParen, "')'");
            return f;
        }
        if (cur().kind == FTok::LDouble) {
            advance();
            std::vector<std::string> agents;
            if (cur().kind != FTok::RDouble) {
                for (;;) {
                    if (cur().kind != FTok::Ident) fail("agent name");
                    agents.push_back(cur().text);
                    advance();
                    if (cur().kind != FTok::Comma) break;
                    advance();
                }
            }
            expect(FTok::RDouble, "'>>'");
            return f_coalition(std::move(agents), path());
        }
        if (cur().kind == FTok::Ident) {
            if (is_temporal_kw())
                throw Error(ErrorKind::Dialect,
                            "path operator '" + cur().text +
                                "' outside a coalition modality",
                            cur().line, cur().col);
            std::string name = cur().text;
            advance();
            if (name == "true" || name == "T") return f_const(true);
            if (name == "false") return f_const(false);
            return f_atom(std::move(name));
        }
        fail("formula");
    }

    // path := pathUnary ('U' path)?     U right-assoc
    FormulaPtr path() {
        FormulaPtr f = path_unary();
        if (is_ident("U")) {
            advance();
            f = f_u(f, path());
        }
        return f;
    }

    FormulaPtr path_unary() {
        if (is_ident("X")) { advance(); return f_x(path_unary()); }
        if (is_ident("G")) { advance(); return f_g(path_unary()); }
        if (is_ident("F")) { advance(); return f_f(path_unary()); }
        return path_base();
    }

    // A parenthesised unit at path level may hold either a full state
    // formula or a nested path formula; try the state reading first.
    FormulaPtr path_base() {
        if (cur().kind == FTok::LParen) {
            size_t save = pos_;
            try {
                return state_unary();
            } catch (const Error&) {
                pos_ = save;
            }
            advance();
            FormulaPtr f = path();
            expect(FTok::RParen, "')'");
            return f;
        }
        return state_unary();
    }

    std::vector<FTok> toks_;
    size_t pos_ = 0;
};

// Rewrite every F node into true U body (ATL reading of F).
inline FormulaPtr desugar_f(const FormulaPtr& f) {
    FormulaPtr l = f->lhs ? desugar_f(f->lhs) : nullptr;
    FormulaPtr r = f->rhs ? desugar_f(f->rhs) : nullptr;
    if (f->op == FOp::F) return f_u(f_const(true), l);
    if (l == f->lhs && r == f->rhs) return f;
    auto n = std::make_shared<Formula>(*f);
    n->lhs = l;
    n->rhs = r;
    return n;
}

} // namespace detail

inline FormulaPtr parse_formula(const std::string& text, Dialect d) {
    detail::FormulaParser p(text);
    FormulaPtr f = p.parse();
    if (d == Dialect::Atl) f = detail::desugar_f(f);
    validate_dialect(f, d);
    return f;
}

} // namespace gamut
