#pragma once

// Decision procedure for the index congruence and total evaluation of closed
// index expressions. Index expressions are normalized to a polynomial over
// indeterminates (variables and opaque atoms such as size applications),
// after a fuel-budgeted contraction of beta-redexes. Equality of normal
// forms is structural; the procedure is a sound conservative approximation:
// it never identifies terms that can evaluate differently, and reports
// indecision when the beta budget runs out.

#include <map>
#include <string>
#include <vector>

#include "qpcf/ast.hpp"

namespace qpcf {

struct IndexFuelExhausted : Error {
    IndexFuelExhausted() : Error("index comparison fuel exhausted") {}
};

// A bug in the caller (typically a missing size/dmeas annotation), never a
// user-facing condition.
struct InternalError : Error {
    using Error::Error;
};

struct IndexPoly {
    // monomial = sorted multiset of indeterminate keys; empty map denotes 0
    using Monomial = std::vector<std::string>;
    std::map<Monomial, Nat> terms;

    bool operator==(const IndexPoly&) const = default;

    static IndexPoly constant(const Nat& n) {
        IndexPoly p;
        if (n != 0) p.terms[{}] = n;
        return p;
    }

    static IndexPoly atom(std::string key) {
        IndexPoly p;
        p.terms[{std::move(key)}] = 1;
        return p;
    }

    IndexPoly operator+(const IndexPoly& other) const {
        IndexPoly out = *this;
        for (const auto& [m, c] : other.terms) {
            Nat& slot = out.terms[m];
            slot += c;
            if (slot == 0) out.terms.erase(m);
        }
        return out;
    }

    IndexPoly operator*(const IndexPoly& other) const {
        IndexPoly out;
        for (const auto& [ma, ca] : terms) {
            for (const auto& [mb, cb] : other.terms) {
                Monomial m;
                m.reserve(ma.size() + mb.size());
                std::merge(ma.begin(), ma.end(), mb.begin(), mb.end(), std::back_inserter(m));
                Nat& slot = out.terms[m];
                slot += ca * cb;
                if (slot == 0) out.terms.erase(m);
            }
        }
        return out;
    }
};

namespace detail {

// Leftmost-outermost contraction of beta-redexes, including inside binder
// annotations and Circ indexes. Y is a constant, never unfolded here: the
// congruence covers beta-interconvertibility only.
struct BetaBudget {
    long long fuel;
    void spend() {
        if (fuel-- <= 0) throw IndexFuelExhausted();
    }
};

inline TermPtr contract(const TermPtr& t, BetaBudget& budget);

inline TypePtr contract(const TypePtr& ty, BetaBudget& budget) {
    return std::visit(overloaded{
                          [&](const TNat&) { return ty; },
                          [&](const TIdx&) { return ty; },
                          [&](const TCirc& c) { return t_circ(contract(c.index, budget)); },
                          [&](const TPi& p) {
                              return t_pi(p.name, contract(p.dom, budget), contract(p.cod, budget));
                          },
                      },
                      ty->node);
}

inline TermPtr contract(const TermPtr& t, BetaBudget& budget) {
    return std::visit(
        overloaded{
            [&](const App& a) {
                TermPtr fn = contract(a.fn, budget);
                if (const Lam* l = as_lam(fn)) {
                    budget.spend();
                    return contract(subst_term(l->body, l->name, a.arg), budget);
                }
                return app(fn, contract(a.arg, budget), t->span);
            },
            [&](const Lam& l) {
                return lam(l.name, contract(l.ann, budget), contract(l.body, budget), t->span);
            },
            [&](const FixOp& f) { return fix_op(contract(f.ann, budget), t->span); },
            [&](const IdxBin& b) {
                return idx_bin(b.op, contract(b.lhs, budget), contract(b.rhs, budget), t->span);
            },
            [&](const SizeOf& s) {
                return size_of(contract(s.arg, budget),
                               s.resolved ? contract(s.resolved, budget) : nullptr, t->span);
            },
            [&](const Meas& m) {
                return dmeas(contract(m.state, budget), contract(m.circ, budget),
                             m.resolved ? contract(m.resolved, budget) : nullptr, t->span);
            },
            [&](const auto&) { return t; },
        },
        t->node);
}

inline IndexPoly to_poly(const TermPtr& t) {
    if (const Num* n = as_num(t)) return IndexPoly::constant(n->value);
    if (const IdxBin* b = std::get_if<IdxBin>(&t->node)) {
        IndexPoly l = to_poly(b->lhs);
        IndexPoly r = to_poly(b->rhs);
        return b->op == '+' ? l + r : l * r;
    }
    // Variables, size applications and stuck applications become opaque
    // indeterminates, identified up to alpha-equivalence.
    return IndexPoly::atom(canonical_key(t));
}

}  // namespace detail

inline constexpr long long kDefaultIndexFuel = 10000;

inline IndexPoly normalize_index(const TermPtr& e, long long fuel = kDefaultIndexFuel) {
    detail::BetaBudget budget{fuel};
    return detail::to_poly(detail::contract(e, budget));
}

inline bool index_eq(const TermPtr& a, const TermPtr& b, long long fuel = kDefaultIndexFuel) {
    return normalize_index(a, fuel) == normalize_index(b, fuel);
}

// Total evaluation of a closed, well-typed index term: rules (n), (op),
// (beta) and (sz) of the big-step semantics. size reads its resolved index
// and never evaluates its circuit argument.
inline Nat eval_index(const TermPtr& e) {
    // strong normalization holds for well-typed indexes; the cap only guards
    // against checker bugs
    long long steps = 1'000'000'000;
    TermPtr t = e;
    for (;;) {
        if (steps-- <= 0) throw InternalError("index evaluation did not terminate");
        if (const Num* n = as_num(t)) return n->value;
        if (const IdxBin* b = std::get_if<IdxBin>(&t->node)) {
            Nat l = eval_index(b->lhs);
            Nat r = eval_index(b->rhs);
            return b->op == '+' ? Nat(l + r) : Nat(l * r);
        }
        if (const SizeOf* s = std::get_if<SizeOf>(&t->node)) {
            if (!s->resolved) throw InternalError("size node without resolved index");
            t = s->resolved;
            continue;
        }
        if (as_app(t)) {
            // unwind the application spine; a closed Idx spine is headed by
            // an abstraction
            std::vector<TermPtr> args;
            TermPtr head = t;
            while (const App* a = as_app(head)) {
                args.push_back(a->arg);
                head = a->fn;
            }
            const Lam* l = as_lam(head);
            if (!l) throw InternalError("stuck index application");
            TermPtr reduced = subst_term(l->body, l->name, args.back());
            for (std::size_t i = args.size() - 1; i-- > 0;) reduced = app(reduced, args[i]);
            t = reduced;
            continue;
        }
        throw InternalError("term is not a closed index expression");
    }
}

}  // namespace qpcf
