#pragma once

// Concrete syntax for .qpcf sources: lexer, recursive-descent parser and
// definition inlining. A source file is a sequence of `name = term`
// definitions followed by one main term. Precedence, loosest to tightest:
// '||', ';', '+', '*', application; '+'/'*' associate left, '||'/';' right,
// application left. 'fn'/'Pi' bodies extend as far right as possible.
// Comments run from '--' to end of line.

#include <string>
#include <vector>

#include "qpcf/ast.hpp"
#include "qpcf/gates.hpp"

namespace qpcf {

struct ParseError : Error {
    ParseError(int line, int col, std::string what, std::vector<std::string> expected = {})
        : Error(std::to_string(line) + ":" + std::to_string(col) + ": " + what +
                (expected.empty() ? "" : " (expected " + join(expected) + ")")),
          line(line),
          col(col),
          expected(std::move(expected)) {}

    int line;
    int col;
    std::vector<std::string> expected;

  private:
    static std::string join(const std::vector<std::string>& xs) {
        std::string out;
        for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? " or " : "") + xs[i];
        return out;
    }
};

struct Definition {
    std::string name;
    TermPtr term;
    Span span;
};

struct SourceProgram {
    std::vector<Definition> defs;
    TermPtr main;  // null when parsed with parse_definitions
};

namespace detail {

enum class Tok {
    Ident,
    Number,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Dot,
    Comma,
    Colon,
    Semi,
    Plus,
    Star,
    Equals,
    Arrow,
    Par,
    End,
};

struct Token {
    Tok kind;
    std::string text;
    int line;
    int col;
};

inline bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
inline bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

inline std::vector<Token> lex(const std::string& src) {
    std::vector<Token> out;
    int line = 1, col = 1;
    std::size_t i = 0;
    auto push = [&](Tok k, std::string text) {
        out.push_back({k, std::move(text), line, col});
    };
    while (i < src.size()) {
        char c = src[i];
        if (c == '\n') {
            ++line;
            col = 1;
            ++i;
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++col;
            ++i;
            continue;
        }
        if (c == '-' && i + 1 < src.size() && src[i + 1] == '-') {
            while (i < src.size() && src[i] != '\n') ++i;
            continue;
        }
        if (ident_start(c)) {
            std::size_t j = i;
            while (j < src.size() && ident_char(src[j])) ++j;
            push(Tok::Ident, src.substr(i, j - i));
            col += static_cast<int>(j - i);
            i = j;
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            push(Tok::Number, src.substr(i, j - i));
            col += static_cast<int>(j - i);
            i = j;
            continue;
        }
        switch (c) {
            case '(': push(Tok::LParen, "("); break;
            case ')': push(Tok::RParen, ")"); break;
            case '[': push(Tok::LBracket, "["); break;
            case ']': push(Tok::RBracket, "]"); break;
            case '.': push(Tok::Dot, "."); break;
            case ',': push(Tok::Comma, ","); break;
            case ':': push(Tok::Colon, ":"); break;
            case ';': push(Tok::Semi, ";"); break;
            case '+': push(Tok::Plus, "+"); break;
            case '*': push(Tok::Star, "*"); break;
            case '=': push(Tok::Equals, "="); break;
            case '-':
                if (i + 1 < src.size() && src[i + 1] == '>') {
                    push(Tok::Arrow, "->");
                    ++i;
                    ++col;
                    break;
                }
                throw ParseError(line, col, "stray '-'");
            case '|':
                if (i + 1 < src.size() && src[i + 1] == '|') {
                    push(Tok::Par, "||");
                    ++i;
                    ++col;
                    break;
                }
                throw ParseError(line, col, "stray '|'");
            default:
                throw ParseError(line, col, std::string("unexpected character '") + c + "'");
        }
        ++i;
        ++col;
    }
    out.push_back({Tok::End, "", line, col});
    return out;
}

inline const char* const kKeywords[] = {"fn",   "fix",     "if",   "pred",  "succ", "get",
                                        "set",  "iter",    "reverse", "size", "dmeas",
                                        "Nat",  "Idx",     "Circ", "Pi"};

inline bool is_keyword(const std::string& s) {
    for (const char* k : kKeywords)
        if (s == k) return true;
    return false;
}

class Parser {
  public:
    Parser(const std::string& src, const GateRegistry& reg) : toks_(lex(src)), reg_(reg) {}

    SourceProgram program(bool require_main) {
        SourceProgram prog;
        while (at_definition()) {
            Token name = advance();
            if (is_keyword(name.text))
                throw ParseError(name.line, name.col, "keyword '" + name.text +
                                                          "' cannot name a definition");
            if (reg_.has(name.text))
                throw ParseError(name.line, name.col, "definition '" + name.text +
                                                          "' collides with a gate name");
            for (const auto& d : prog.defs)
                if (d.name == name.text)
                    throw ParseError(name.line, name.col,
                                     "duplicate definition '" + name.text + "'");
            advance();  // '='
            prog.defs.push_back({name.text, term(), Span{name.line, name.col}});
        }
        if (peek().kind != Tok::End) {
            prog.main = term();
        } else if (require_main) {
            throw ParseError(peek().line, peek().col, "missing main term");
        }
        expect(Tok::End, "end of input");
        return prog;
    }

  private:
    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    const GateRegistry& reg_;

    const Token& peek(std::size_t ahead = 0) const {
        std::size_t i = pos_ + ahead;
        return i < toks_.size() ? toks_[i] : toks_.back();
    }
    Token advance() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
    bool accept(Tok k) {
        if (peek().kind != k) return false;
        advance();
        return true;
    }
    Token expect(Tok k, const std::string& what) {
        if (peek().kind != k)
            throw ParseError(peek().line, peek().col,
                             "unexpected '" + describe(peek()) + "'", {what});
        return advance();
    }
    static std::string describe(const Token& t) {
        return t.kind == Tok::End ? "end of input" : t.text;
    }
    bool at_definition() const {
        return peek().kind == Tok::Ident && peek(1).kind == Tok::Equals;
    }
    bool keyword(const std::string& k) const {
        return peek().kind == Tok::Ident && peek().text == k;
    }
    Span span() const { return Span{peek().line, peek().col}; }

    // --- terms ---

    TermPtr term() { return par_level(); }

    TermPtr par_level() {
        Span sp = span();
        TermPtr l = seq_level();
        if (accept(Tok::Par)) return app(app(par_op(sp), l, sp), par_level(), sp);
        return l;
    }

    TermPtr seq_level() {
        Span sp = span();
        TermPtr l = add_level();
        if (accept(Tok::Semi)) return app(app(seq_op(sp), l, sp), seq_level(), sp);
        return l;
    }

    TermPtr add_level() {
        Span sp = span();
        TermPtr l = mul_level();
        while (accept(Tok::Plus)) l = idx_bin('+', l, mul_level(), sp);
        return l;
    }

    TermPtr mul_level() {
        Span sp = span();
        TermPtr l = app_level();
        while (accept(Tok::Star)) l = idx_bin('*', l, app_level(), sp);
        return l;
    }

    bool starts_atom() const {
        switch (peek().kind) {
            case Tok::Number:
            case Tok::LParen:
                return true;
            case Tok::Ident:
                if (at_definition()) return false;  // next definition begins
                return peek().text != "Nat" && peek().text != "Idx" && peek().text != "Circ" &&
                       peek().text != "Pi";
            default:
                return false;
        }
    }

    TermPtr app_level() {
        TermPtr t = atom();
        while (starts_atom()) {
            Span sp = span();
            t = app(t, atom(), sp);
        }
        return t;
    }

    TermPtr atom() {
        Span sp = span();
        switch (peek().kind) {
            case Tok::Number: {
                Token n = advance();
                return num(Nat(n.text), sp);
            }
            case Tok::LParen: {
                advance();
                TermPtr t = term();
                expect(Tok::RParen, "')'");
                return t;
            }
            case Tok::Ident:
                break;
            default:
                throw ParseError(sp.line, sp.col, "unexpected '" + describe(peek()) + "'",
                                 {"a term"});
        }
        std::string word = peek().text;
        if (word == "fn") {
            advance();
            Token name = expect(Tok::Ident, "binder name");
            if (is_keyword(name.text))
                throw ParseError(name.line, name.col,
                                 "keyword '" + name.text + "' cannot be a binder");
            if (reg_.has(name.text))
                throw ParseError(name.line, name.col,
                                 "binder '" + name.text + "' collides with a gate name");
            expect(Tok::Colon, "':'");
            TypePtr ann = type();
            expect(Tok::Dot, "'.'");
            return lam(name.text, ann, term(), sp);
        }
        if (word == "fix") {
            advance();
            expect(Tok::LBracket, "'['");
            TypePtr ann = type();
            expect(Tok::RBracket, "']'");
            return fix_op(ann, sp);
        }
        if (word == "dmeas") {
            advance();
            expect(Tok::LParen, "'('");
            TermPtr state = term();
            expect(Tok::Comma, "','");
            TermPtr circ = term();
            expect(Tok::RParen, "')'");
            return dmeas(state, circ, nullptr, sp);
        }
        if (word == "size") {
            advance();
            return size_of(atom(), nullptr, sp);
        }
        if (word == "if") return advance(), if_op(sp);
        if (word == "pred") return advance(), pred_op(sp);
        if (word == "succ") return advance(), succ_op(sp);
        if (word == "get") return advance(), get_op(sp);
        if (word == "set") return advance(), set_op(sp);
        if (word == "iter") return advance(), iter_op(sp);
        if (word == "reverse") return advance(), rev_op(sp);
        if (is_keyword(word))
            throw ParseError(sp.line, sp.col, "unexpected keyword '" + word + "'", {"a term"});
        advance();
        if (reg_.has(word)) return gate(word, sp);
        return var(word, sp);
    }

    // --- types ---

    TypePtr type() {
        if (keyword("Pi")) {
            advance();
            Token name = expect(Tok::Ident, "type binder name");
            if (is_keyword(name.text))
                throw ParseError(name.line, name.col,
                                 "keyword '" + name.text + "' cannot be a binder");
            expect(Tok::Colon, "':'");
            TypePtr dom = type_atom();
            expect(Tok::Dot, "'.'");
            return t_pi(name.text, dom, type());
        }
        TypePtr l = type_atom();
        if (accept(Tok::Arrow)) return t_arrow(l, type());
        return l;
    }

    TypePtr type_atom() {
        Span sp = span();
        if (accept(Tok::LParen)) {
            TypePtr t = type();
            expect(Tok::RParen, "')'");
            return t;
        }
        if (keyword("Nat")) return advance(), t_nat();
        if (keyword("Idx")) return advance(), t_idx();
        if (keyword("Circ")) {
            advance();
            expect(Tok::LParen, "'('");
            TermPtr e = term();
            expect(Tok::RParen, "')'");
            return t_circ(e);
        }
        throw ParseError(sp.line, sp.col, "unexpected '" + describe(peek()) + "'", {"a type"});
    }

  public:
    TypePtr standalone_type() {
        TypePtr t = type();
        expect(Tok::End, "end of input");
        return t;
    }
    TermPtr standalone_term() {
        TermPtr t = term();
        expect(Tok::End, "end of input");
        return t;
    }
};

}  // namespace detail

inline SourceProgram parse_program(const std::string& src, const GateRegistry& reg) {
    return detail::Parser(src, reg).program(/*require_main=*/true);
}

inline std::vector<Definition> parse_definitions(const std::string& src, const GateRegistry& reg) {
    return detail::Parser(src, reg).program(/*require_main=*/false).defs;
}

inline TermPtr parse_term(const std::string& src, const GateRegistry& reg) {
    return detail::Parser(src, reg).standalone_term();
}

inline TypePtr parse_type(const std::string& src, const GateRegistry& reg) {
    return detail::Parser(src, reg).standalone_type();
}

// Macro-style resolution: each definition is substituted into all later
// definitions and into the main term.
inline TermPtr inline_definitions(const std::vector<Definition>& defs, TermPtr t) {
    std::vector<Definition> resolved;
    resolved.reserve(defs.size());
    for (const auto& d : defs) {
        TermPtr body = d.term;
        for (const auto& r : resolved) body = subst_term(body, r.name, r.term);
        resolved.push_back({d.name, body, d.span});
    }
    for (const auto& r : resolved) t = subst_term(t, r.name, r.term);
    return t;
}

inline TermPtr resolved_main(const SourceProgram& prog) {
    if (!prog.main) throw Error("program has no main term");
    return inline_definitions(prog.defs, prog.main);
}

}  // namespace qpcf
