#pragma once

// Pretty-printing of terms and types in the concrete syntax, with minimal
// parentheses. parse(pretty(t)) is alpha-equivalent to t for every term the
// grammar can express.

#include <string>

#include "qpcf/ast.hpp"

namespace qpcf {

// precedence levels, loosest to tightest:
//   0 term (fn / fix bodies extend maximally)
//   1 '||'   right-assoc
//   2 ';'    right-assoc
//   3 '+'    left-assoc
//   4 '*'    left-assoc
//   5 application / 'size'
//   6 atom

namespace detail {

inline void term_str(const TermPtr& t, int level, std::string& out);

inline void type_str(const TypePtr& ty, int level, std::string& out) {
    std::visit(overloaded{
                   [&](const TNat&) { out += "Nat"; },
                   [&](const TIdx&) { out += "Idx"; },
                   [&](const TCirc& c) {
                       out += "Circ(";
                       term_str(c.index, 0, out);
                       out += ")";
                   },
                   [&](const TPi& p) {
                       bool paren = level > 0;
                       if (paren) out += "(";
                       if (free_vars(p.cod).count(p.name)) {
                           out += "Pi " + p.name + ":";
                           type_str(p.dom, 1, out);
                           out += ". ";
                           type_str(p.cod, 0, out);
                       } else {
                           type_str(p.dom, 1, out);
                           out += " -> ";
                           type_str(p.cod, 0, out);
                       }
                       if (paren) out += ")";
                   },
               },
               ty->node);
}

// Infix spines: App(App(SeqOp, a), b) renders "a ; b".
inline bool infix_spine(const TermPtr& t, const TermPtr** l, const TermPtr** r, int* lv) {
    const App* outer = as_app(t);
    if (!outer) return false;
    const App* inner = as_app(outer->fn);
    if (!inner) return false;
    if (std::holds_alternative<SeqOp>(inner->fn->node)) *lv = 2;
    else if (std::holds_alternative<ParOp>(inner->fn->node)) *lv = 1;
    else return false;
    *l = &inner->arg;
    *r = &outer->arg;
    return true;
}

inline void term_str(const TermPtr& t, int level, std::string& out) {
    const TermPtr* l = nullptr;
    const TermPtr* r = nullptr;
    int lv = 0;
    if (infix_spine(t, &l, &r, &lv)) {
        bool paren = level > lv;
        if (paren) out += "(";
        term_str(*l, lv + 1, out);
        out += lv == 2 ? " ; " : " || ";
        term_str(*r, lv, out);
        if (paren) out += ")";
        return;
    }
    std::visit(
        overloaded{
            [&](const Var& v) { out += v.name; },
            [&](const Lam& la) {
                bool paren = level > 0;
                if (paren) out += "(";
                out += "fn " + la.name + ":";
                type_str(la.ann, 1, out);
                out += ". ";
                term_str(la.body, 0, out);
                if (paren) out += ")";
            },
            [&](const App& a) {
                bool paren = level > 5;
                if (paren) out += "(";
                term_str(a.fn, 5, out);
                out += " ";
                term_str(a.arg, 6, out);
                if (paren) out += ")";
            },
            [&](const Num& n) { out += n.value.str(); },
            [&](const SuccOp&) { out += "succ"; },
            [&](const PredOp&) { out += "pred"; },
            [&](const IfOp&) { out += "if"; },
            [&](const FixOp& f) {
                out += "fix[";
                type_str(f.ann, 0, out);
                out += "]";
            },
            [&](const GetOp&) { out += "get"; },
            [&](const SetOp&) { out += "set"; },
            [&](const GateRef& g) { out += g.name; },
            // bare composition operators have no surface form; these spellings
            // do not reparse and only appear for hand-built ASTs
            [&](const SeqOp&) { out += "(;)"; },
            [&](const ParOp&) { out += "(||)"; },
            [&](const IterOp&) { out += "iter"; },
            [&](const RevOp&) { out += "reverse"; },
            [&](const IdxBin& b) {
                int mylv = b.op == '+' ? 3 : 4;
                bool paren = level > mylv;
                if (paren) out += "(";
                term_str(b.lhs, mylv, out);
                out += b.op == '+' ? " + " : " * ";
                term_str(b.rhs, mylv + 1, out);
                if (paren) out += ")";
            },
            [&](const SizeOf& s) {
                bool paren = level > 5;
                if (paren) out += "(";
                out += "size ";
                term_str(s.arg, 6, out);
                if (paren) out += ")";
            },
            [&](const Meas& m) {
                out += "dmeas(";
                term_str(m.state, 0, out);
                out += ", ";
                term_str(m.circ, 0, out);
                out += ")";
            },
        },
        t->node);
}

}  // namespace detail

inline std::string pretty(const TermPtr& t) {
    std::string out;
    detail::term_str(t, 0, out);
    return out;
}

inline std::string pretty(const TypePtr& ty) {
    std::string out;
    detail::type_str(ty, 0, out);
    return out;
}

}  // namespace qpcf
