#pragma once

// Syntax-directed type inference for qPCF. Implements the typing rules of
// the calculus with a directional Idx-to-Nat coercion inserted at demand
// sites, the obligation extractor for terms embedded in types, and type
// equality up to the index congruence. Inference elaborates the term:
// every size and dmeas node (including those inside binder annotations)
// comes back with its resolved-index slot filled.

#include <string>
#include <vector>

#include "qpcf/ast.hpp"
#include "qpcf/gates.hpp"
#include "qpcf/index.hpp"
#include "qpcf/printer.hpp"

namespace qpcf {

enum class TypeErrorKind {
    Mismatch,
    UnboundVariable,
    IndexInequality,
    IndexIndecision,
    FixShape,          // (P6) result-type restriction on Y annotations
    ObligationFailure  // a term embedded in a type is not an index
};

struct TypeError : Error {
    TypeError(TypeErrorKind kind, std::string rule, Span span, std::string message,
              TypePtr expected = nullptr, TypePtr found = nullptr)
        : Error(render(rule, span, message)),
          kind(kind),
          rule(std::move(rule)),
          span(span),
          expected(std::move(expected)),
          found(std::move(found)) {}

    TypeErrorKind kind;
    std::string rule;
    Span span;
    TypePtr expected;
    TypePtr found;

  private:
    static std::string render(const std::string& rule, Span sp, const std::string& msg) {
        std::string out;
        if (sp.valid()) out += std::to_string(sp.line) + ":" + std::to_string(sp.col) + ": ";
        return out + rule + " " + msg;
    }
};

struct Obligation {
    Base base;
    TermPtr subject;
    TypePtr expected;  // always Idx
};

// The obligation extractor: collects the typings required for a type to be
// well given. Base cases yield nothing or the embedded Circ index; Pi
// descends with a fresh binder.
inline void extract_obligations_into(const Base& b, const TypePtr& ty,
                                     std::vector<Obligation>& out) {
    std::visit(overloaded{
                   [](const TNat&) {},
                   [](const TIdx&) {},
                   [&](const TCirc& c) { out.push_back({b, c.index, t_idx()}); },
                   [&](const TPi& p) {
                       extract_obligations_into(b, p.dom, out);
                       std::string name = p.name;
                       TypePtr cod = p.cod;
                       if (b.contains(name)) {
                           NameSet avoid = free_vars(cod);
                           for (const auto& [n, _] : b.entries()) avoid.insert(n);
                           std::string renamed = fresh_name(name, avoid);
                           cod = subst_type(cod, name, var(renamed));
                           name = renamed;
                       }
                       extract_obligations_into(b.extended(name, p.dom), cod, out);
                   },
               },
               ty->node);
}

inline std::vector<Obligation> extract_obligations(const Base& b, const TypePtr& ty) {
    std::vector<Obligation> out;
    extract_obligations_into(b, ty, out);
    return out;
}

inline bool is_ground(const TypePtr& ty) { return !as_pi(ty); }

// Type equality up to the congruence: alpha-conversion of Pi binders,
// beta-interconvertibility and ring laws on embedded indexes. Directional
// coercion is not equality: Nat and Idx are distinct. Throws
// IndexFuelExhausted when an index comparison cannot be decided.
inline bool type_eq(const TypePtr& a, const TypePtr& b, long long fuel = kDefaultIndexFuel) {
    if (a->node.index() != b->node.index()) return false;
    return std::visit(
        overloaded{
            [](const TNat&) { return true; },
            [](const TIdx&) { return true; },
            [&](const TCirc& ca) {
                return index_eq(ca.index, std::get<TCirc>(b->node).index, fuel);
            },
            [&](const TPi& pa) {
                const TPi& pb = std::get<TPi>(b->node);
                if (!type_eq(pa.dom, pb.dom, fuel)) return false;
                NameSet avoid = free_vars(pa.cod);
                avoid.merge(free_vars(pb.cod));
                std::string z = fresh_name(pa.name, avoid);
                return type_eq(subst_type(pa.cod, pa.name, var(z)),
                               subst_type(pb.cod, pb.name, var(z)), fuel);
            },
        },
        a->node);
}

struct CheckConfig {
    long long index_fuel = kDefaultIndexFuel;
};

struct Typing {
    TypePtr type;
    TermPtr elaborated;
};

namespace detail {

class Checker {
  public:
    Checker(const GateRegistry& reg, CheckConfig cfg) : reg_(reg), cfg_(cfg) {}

    Typing infer(const Base& b, const TermPtr& t) {
        // spine-headed operator constants get their axiom schemes
        // instantiated from the argument types
        std::vector<TermPtr> args;
        TermPtr head = t;
        while (const App* a = as_app(head)) {
            args.push_back(a->arg);
            head = a->fn;
        }
        std::reverse(args.begin(), args.end());

        if (std::holds_alternative<SeqOp>(head->node)) return op_seq(b, head, args, t);
        if (std::holds_alternative<ParOp>(head->node)) return op_par(b, head, args, t);
        if (std::holds_alternative<IterOp>(head->node)) return op_iter(b, head, args, t);
        if (std::holds_alternative<RevOp>(head->node)) return op_rev(b, head, args, t);
        if (std::holds_alternative<IfOp>(head->node)) return op_if(b, head, args, t);

        Typing fn = infer_head(b, head);
        for (const TermPtr& arg : args) {
            const TPi* pi = as_pi(fn.type);
            if (!pi)
                throw TypeError(TypeErrorKind::Mismatch, "(P2)", arg->span,
                                "cannot apply a term of type " + pretty(fn.type),
                                nullptr, fn.type);
            Typing ta = infer(b, arg);
            require_arg(b, ta.type, pi->dom, arg->span, "(P2)");
            fn.type = subst_type(pi->cod, pi->name, ta.elaborated);
            fn.elaborated = app(fn.elaborated, ta.elaborated, arg->span);
        }
        return fn;
    }

    // Discharges the obligations of a type eagerly, elaborating embedded
    // index terms along the way.
    TypePtr check_type(const Base& b, const TypePtr& ty, Span sp, const std::string& rule) {
        return std::visit(
            overloaded{
                [&](const TNat&) { return ty; },
                [&](const TIdx&) { return ty; },
                [&](const TCirc& c) {
                    Typing e = infer(b, c.index);
                    if (!std::holds_alternative<TIdx>(e.type->node))
                        throw TypeError(TypeErrorKind::ObligationFailure, rule,
                                        pick_span(c.index->span, sp),
                                        "obligation failed: " + pretty(c.index) +
                                            " must be an index, found " + pretty(e.type),
                                        t_idx(), e.type);
                    return t_circ(e.elaborated);
                },
                [&](const TPi& p) {
                    TypePtr dom = check_type(b, p.dom, sp, rule);
                    std::string name = p.name;
                    TypePtr cod = p.cod;
                    if (b.contains(name)) {
                        NameSet avoid = free_vars(cod);
                        for (const auto& [n, _] : b.entries()) avoid.insert(n);
                        name = fresh_name(name, avoid);
                        cod = subst_type(cod, p.name, var(name));
                    }
                    return t_pi(name, dom, check_type(b.extended(name, dom), cod, sp, rule));
                },
            },
            ty->node);
    }

    bool types_equal(const TypePtr& a, const TypePtr& b, Span sp, const std::string& rule) {
        try {
            return type_eq(a, b, cfg_.index_fuel);
        } catch (const IndexFuelExhausted&) {
            throw TypeError(TypeErrorKind::IndexIndecision, rule, sp,
                            "cannot decide index equality between " + pretty(a) + " and " +
                                pretty(b) + " within the fuel budget",
                            a, b);
        }
    }

  private:
    const GateRegistry& reg_;
    CheckConfig cfg_;

    static Span pick_span(Span preferred, Span fallback) {
        return preferred.valid() ? preferred : fallback;
    }

    Typing infer_head(const Base& b, const TermPtr& t) {
        return std::visit(
            overloaded{
                [&](const Var& v) -> Typing {
                    const TypePtr* ty = b.lookup(v.name);
                    if (!ty)
                        throw TypeError(TypeErrorKind::UnboundVariable, "(P0)", t->span,
                                        "unbound variable '" + v.name + "'");
                    return {*ty, t};
                },
                [&](const Lam& l) -> Typing {
                    TypePtr ann = check_type(b, l.ann, t->span, "(P1)");
                    std::string name = l.name;
                    TermPtr body = l.body;
                    if (b.contains(name)) {
                        NameSet avoid = free_vars(body);
                        for (const auto& [n, _] : b.entries()) avoid.insert(n);
                        name = fresh_name(name, avoid);
                        body = subst_term(body, l.name, var(name));
                    }
                    Typing tb = infer(b.extended(name, ann), body);
                    return {t_pi(name, ann, tb.type), lam(name, ann, tb.elaborated, t->span)};
                },
                [&](const Num&) -> Typing { return {t_idx(), t}; },  // (I1)
                [&](const SuccOp&) -> Typing { return {t_arrow(t_nat(), t_nat()), t}; },
                [&](const PredOp&) -> Typing { return {t_arrow(t_nat(), t_nat()), t}; },
                [&](const GetOp&) -> Typing {
                    return {t_arrow(t_nat(), t_arrow(t_nat(), t_nat())), t};
                },
                [&](const SetOp&) -> Typing {
                    return {t_arrow(t_nat(), t_arrow(t_nat(), t_nat())), t};
                },
                [&](const FixOp& f) -> Typing {
                    TypePtr ann = check_type(b, f.ann, t->span, "(P6)");
                    // sigma must be tau_1 -> ... -> tau_n -> gamma with gamma
                    // in {Nat, Circ(E)}; the arrows are non-dependent
                    TypePtr gamma = ann;
                    while (const TPi* pi = as_pi(gamma)) {
                        if (free_vars(pi->cod).count(pi->name))
                            throw TypeError(TypeErrorKind::FixShape, "(P6)", t->span,
                                            "fix annotation " + pretty(ann) +
                                                " has a dependent arrow in its spine");
                        gamma = pi->cod;
                    }
                    if (!std::holds_alternative<TNat>(gamma->node) && !as_circ(gamma))
                        throw TypeError(TypeErrorKind::FixShape, "(P6)", t->span,
                                        "fix annotation " + pretty(ann) +
                                            " must end in Nat or Circ(E), found " + pretty(gamma));
                    return {t_arrow(t_arrow(ann, ann), ann), fix_op(ann, t->span)};
                },
                [&](const GateRef& g) -> Typing {
                    const GateDef& def = reg_.get(g.name);  // (C1)
                    return {t_circ(num(Nat(def.arity))), t};
                },
                [&](const IdxBin& op) -> Typing {
                    Typing l = require_idx(b, op.lhs, "(I2)");
                    Typing r = require_idx(b, op.rhs, "(I2)");
                    return {t_idx(), idx_bin(op.op, l.elaborated, r.elaborated, t->span)};
                },
                [&](const SizeOf& s) -> Typing {
                    Typing m = infer(b, s.arg);
                    const TCirc* c = as_circ(m.type);
                    if (!c)
                        throw TypeError(TypeErrorKind::Mismatch, "(I3)", t->span,
                                        "size expects a circuit, found " + pretty(m.type),
                                        nullptr, m.type);
                    return {t_idx(), size_of(m.elaborated, c->index, t->span)};
                },
                [&](const Meas& me) -> Typing {
                    Typing st = require_nat(b, me.state, "(M)");
                    Typing ci = infer(b, me.circ);
                    const TCirc* c = as_circ(ci.type);
                    if (!c)
                        throw TypeError(TypeErrorKind::Mismatch, "(M)", t->span,
                                        "dmeas expects a circuit, found " + pretty(ci.type),
                                        nullptr, ci.type);
                    return {t_nat(), dmeas(st.elaborated, ci.elaborated, c->index, t->span)};
                },
                [&](const IfOp&) -> Typing {
                    throw TypeError(TypeErrorKind::Mismatch, "(P5)", t->span,
                                    "if must be applied to a scrutinee and two branches");
                },
                [&](const SeqOp&) -> Typing { throw full_application(t, "(C2)", "';'", 2); },
                [&](const ParOp&) -> Typing { throw full_application(t, "(C3)", "'||'", 2); },
                [&](const IterOp&) -> Typing { throw full_application(t, "(C5)", "iter", 3); },
                [&](const RevOp&) -> Typing { throw full_application(t, "(C4)", "reverse", 1); },
                [&](const App&) -> Typing { throw InternalError("spine not unwound"); },
            },
            t->node);
    }

    TypeError full_application(const TermPtr& t, const std::string& rule, const std::string& name,
                               int arity) {
        return TypeError(TypeErrorKind::Mismatch, rule, t->span,
                         name + " takes exactly " + std::to_string(arity) +
                             " arguments and cannot appear partially applied");
    }

    Typing require_idx(const Base& b, const TermPtr& t, const std::string& rule) {
        Typing r = infer(b, t);
        if (!std::holds_alternative<TIdx>(r.type->node))
            throw TypeError(TypeErrorKind::Mismatch, rule, t->span,
                            "expected an index, found " + pretty(r.type), t_idx(), r.type);
        return r;
    }

    // Nat demanded; Idx accepted through the (I0) coercion.
    Typing require_nat(const Base& b, const TermPtr& t, const std::string& rule) {
        Typing r = infer(b, t);
        if (!std::holds_alternative<TNat>(r.type->node) &&
            !std::holds_alternative<TIdx>(r.type->node))
            throw TypeError(TypeErrorKind::Mismatch, rule, t->span,
                            "expected Nat, found " + pretty(r.type), t_nat(), r.type);
        return r;
    }

    Typing require_circ(const Base& b, const TermPtr& t, const std::string& rule) {
        Typing r = infer(b, t);
        if (!as_circ(r.type))
            throw TypeError(TypeErrorKind::Mismatch, rule, t->span,
                            "expected a circuit, found " + pretty(r.type), nullptr, r.type);
        return r;
    }

    void require_arg(const Base& b, const TypePtr& found, const TypePtr& expected, Span sp,
                     const std::string& rule) {
        (void)b;
        if (std::holds_alternative<TNat>(expected->node) &&
            std::holds_alternative<TIdx>(found->node))
            return;  // (I0)
        if (types_equal(found, expected, sp, rule)) return;
        if (as_circ(found) && as_circ(expected)) {
            long long fuel = cfg_.index_fuel;
            throw TypeError(TypeErrorKind::IndexInequality, rule, sp,
                            "circuit index mismatch: " + pretty(expected) + " vs " +
                                pretty(found) + "; normal forms " +
                                to_string(normalize_index(as_circ(expected)->index, fuel)) +
                                " vs " + to_string(normalize_index(as_circ(found)->index, fuel)),
                            expected, found);
        }
        throw TypeError(TypeErrorKind::Mismatch, rule, sp,
                        "expected " + pretty(expected) + ", found " + pretty(found), expected,
                        found);
    }

    void require_index_eq(const TermPtr& ea, const TermPtr& eb, Span sp, const std::string& rule) {
        bool eq;
        try {
            eq = index_eq(ea, eb, cfg_.index_fuel);
        } catch (const IndexFuelExhausted&) {
            throw TypeError(TypeErrorKind::IndexIndecision, rule, sp,
                            "cannot decide index equality between " + pretty(ea) + " and " +
                                pretty(eb) + " within the fuel budget");
        }
        if (!eq)
            throw TypeError(TypeErrorKind::IndexInequality, rule, sp,
                            "circuit arity mismatch: " + pretty(ea) + " vs " + pretty(eb) +
                                "; normal forms " +
                                to_string(normalize_index(ea, cfg_.index_fuel)) + " vs " +
                                to_string(normalize_index(eb, cfg_.index_fuel)));
    }

    static std::string to_string(const IndexPoly& p) {
        if (p.terms.empty()) return "0";
        std::string out;
        bool first = true;
        for (const auto& [mono, coeff] : p.terms) {
            if (!first) out += " + ";
            first = false;
            if (mono.empty() || coeff != 1) out += coeff.str();
            for (std::size_t i = 0; i < mono.size(); ++i) {
                if (i || coeff != 1) out += "*";
                out += "[" + mono[i] + "]";
            }
        }
        return out;
    }

    Typing too_few(const TermPtr& head, const std::string& rule, const std::string& name,
                   int arity) {
        throw full_application(head, rule, name, arity);
    }

    Typing op_seq(const Base& b, const TermPtr& head, const std::vector<TermPtr>& args,
                  const TermPtr& whole) {
        if (args.size() != 2) return too_few(head, "(C2)", "';'", 2);
        Typing l = require_circ(b, args[0], "(C2)");
        Typing r = require_circ(b, args[1], "(C2)");
        require_index_eq(as_circ(l.type)->index, as_circ(r.type)->index, whole->span, "(C2)");
        return {l.type, app(app(seq_op(head->span), l.elaborated), r.elaborated, whole->span)};
    }

    Typing op_par(const Base& b, const TermPtr& head, const std::vector<TermPtr>& args,
                  const TermPtr& whole) {
        if (args.size() != 2) return too_few(head, "(C3)", "'||'", 2);
        Typing l = require_circ(b, args[0], "(C3)");
        Typing r = require_circ(b, args[1], "(C3)");
        TermPtr e = idx_bin('+', idx_bin('+', as_circ(l.type)->index, as_circ(r.type)->index),
                            num(Nat(1)));
        return {t_circ(e), app(app(par_op(head->span), l.elaborated), r.elaborated, whole->span)};
    }

    Typing op_iter(const Base& b, const TermPtr& head, const std::vector<TermPtr>& args,
                   const TermPtr& whole) {
        if (args.size() != 3) return too_few(head, "(C5)", "iter", 3);
        Typing e = require_idx(b, args[0], "(C5)");
        Typing l = require_circ(b, args[1], "(C5)");
        Typing r = require_circ(b, args[2], "(C5)");
        // Circ(E0 + ((1 + E1) * x)) with x the iteration count argument
        TermPtr idx = idx_bin(
            '+', as_circ(l.type)->index,
            idx_bin('*', idx_bin('+', num(Nat(1)), as_circ(r.type)->index), e.elaborated));
        return {t_circ(idx), app(app(app(iter_op(head->span), e.elaborated), l.elaborated),
                                 r.elaborated, whole->span)};
    }

    Typing op_rev(const Base& b, const TermPtr& head, const std::vector<TermPtr>& args,
                  const TermPtr& whole) {
        if (args.size() != 1) return too_few(head, "(C4)", "reverse", 1);
        Typing m = require_circ(b, args[0], "(C4)");
        return {m.type, app(rev_op(head->span), m.elaborated, whole->span)};
    }

    Typing op_if(const Base& b, const TermPtr& head, const std::vector<TermPtr>& args,
                 const TermPtr& whole) {
        if (args.size() != 3)
            throw TypeError(TypeErrorKind::Mismatch, "(P5)", head->span,
                            "if takes a scrutinee and two branches");
        Typing scrut = require_nat(b, args[0], "(P5)");
        Typing l = infer(b, args[1]);
        Typing r;
        TypePtr result;
        if (as_circ(l.type)) {  // (P5')
            r = require_circ(b, args[2], "(P5')");
            require_index_eq(as_circ(l.type)->index, as_circ(r.type)->index, whole->span,
                             "(P5')");
            result = l.type;
        } else {  // (P5)
            if (!std::holds_alternative<TNat>(l.type->node) &&
                !std::holds_alternative<TIdx>(l.type->node))
                throw TypeError(TypeErrorKind::Mismatch, "(P5)", args[1]->span,
                                "if branches must be Nat or circuits, found " + pretty(l.type),
                                t_nat(), l.type);
            r = require_nat(b, args[2], "(P5)");
            result = t_nat();
        }
        return {result, app(app(app(if_op(head->span), scrut.elaborated), l.elaborated),
                            r.elaborated, whole->span)};
    }
};

}  // namespace detail

// Infers the type of t under base b and returns it along with the
// slot-annotated term. Types already present in b must be well formed; they
// are validated up front.
inline Typing elaborate(const Base& b, const TermPtr& t, const GateRegistry& reg,
                        CheckConfig cfg = {}) {
    detail::Checker checker(reg, cfg);
    Base validated;
    for (const auto& [name, ty] : b.entries())
        validated = validated.extended(name, checker.check_type(validated, ty, t->span, "(P0)"));
    return checker.infer(validated, t);
}

inline TypePtr infer(const Base& b, const TermPtr& t, const GateRegistry& reg,
                     CheckConfig cfg = {}) {
    return elaborate(b, t, reg, cfg).type;
}

// Presentation helper: closed circuit indexes inside an elaborated type fold
// to their numeral, e.g. Circ(0 + 0 + 1) renders as Circ(1).
inline TypePtr fold_closed_indexes(const TypePtr& ty) {
    return std::visit(overloaded{
                          [&](const TNat&) { return ty; },
                          [&](const TIdx&) { return ty; },
                          [&](const TCirc& c) {
                              if (free_vars(c.index).empty()) {
                                  try {
                                      return t_circ(num(eval_index(c.index)));
                                  } catch (const InternalError&) {
                                      return ty;  // unannotated size in a raw type
                                  }
                              }
                              return ty;
                          },
                          [&](const TPi& p) {
                              return t_pi(p.name, fold_closed_indexes(p.dom),
                                          fold_closed_indexes(p.cod));
                          },
                      },
                      ty->node);
}

}  // namespace qpcf
