#pragma once

// Abstract syntax of qPCF terms and types, typing bases, capture-avoiding
// substitution and alpha-equivalence. Terms and types are immutable trees
// shared through shared_ptr; every operation that "modifies" a term builds
// a new one.

#include <atomic>
#include <cstdint>
#include <memory>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace qpcf {

// Non-negative arbitrary-precision numeral. set/get can address any bit
// position, so fixed-width integers do not suffice.
using Nat = boost::multiprecision::cpp_int;

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Span {
    int line = -1;
    int col = -1;
    bool valid() const { return line > 0; }
};

struct Term;
struct Type;
using TermPtr = std::shared_ptr<const Term>;
using TypePtr = std::shared_ptr<const Type>;

// ---------------------------------------------------------------------------
// Types: Nat | Idx | Circ(E) | Pi x:sigma. tau
// ---------------------------------------------------------------------------

struct TNat {};
struct TIdx {};
struct TCirc {
    TermPtr index;  // must type-check as Idx in the ambient base
};
struct TPi {
    std::string name;
    TypePtr dom;
    TypePtr cod;
};

struct Type {
    std::variant<TNat, TIdx, TCirc, TPi> node;
};

// ---------------------------------------------------------------------------
// Terms. Operators with axiom-scheme types (succ, pred, if, Y, get, set,
// ;, ||, iter, reverse) are first-class constants used through application
// spines; + / * / size / dmeas carry their operands structurally.
// ---------------------------------------------------------------------------

struct Var {
    std::string name;
};
struct Lam {
    std::string name;
    TypePtr ann;  // Church style: every binder is annotated
    TermPtr body;
};
struct App {
    TermPtr fn;
    TermPtr arg;
};
struct Num {
    Nat value;  // >= 0
};
struct SuccOp {};
struct PredOp {};
struct IfOp {};
struct FixOp {
    TypePtr ann;  // Y_sigma
};
struct GetOp {};
struct SetOp {};
struct GateRef {
    std::string name;
};
struct SeqOp {};   // sequential composition, surface ';'
struct ParOp {};   // parallel composition, surface '||'
struct IterOp {};
struct RevOp {};
struct IdxBin {
    char op;  // '+' or '*'
    TermPtr lhs;
    TermPtr rhs;
};
struct SizeOf {
    TermPtr arg;
    TermPtr resolved;  // index of the argument's Circ type; null until checked
};
struct Meas {
    TermPtr state;
    TermPtr circ;
    TermPtr resolved;  // index of the circuit's Circ type; null until checked
};

struct Term {
    std::variant<Var, Lam, App, Num, SuccOp, PredOp, IfOp, FixOp, GetOp, SetOp,
                 GateRef, SeqOp, ParOp, IterOp, RevOp, IdxBin, SizeOf, Meas>
        node;
    Span span;
};

// visitor helper
template <class... Fs>
struct overloaded : Fs... {
    using Fs::operator()...;
};
template <class... Fs>
overloaded(Fs...) -> overloaded<Fs...>;

// --- constructors ----------------------------------------------------------

inline TermPtr mk(Term t) { return std::make_shared<Term>(std::move(t)); }
inline TypePtr mk(Type t) { return std::make_shared<Type>(std::move(t)); }

inline TermPtr var(std::string name, Span sp = {}) { return mk(Term{Var{std::move(name)}, sp}); }
inline TermPtr lam(std::string name, TypePtr ann, TermPtr body, Span sp = {}) {
    return mk(Term{Lam{std::move(name), std::move(ann), std::move(body)}, sp});
}
inline TermPtr app(TermPtr fn, TermPtr arg, Span sp = {}) {
    return mk(Term{App{std::move(fn), std::move(arg)}, sp});
}
inline TermPtr app(TermPtr fn, std::initializer_list<TermPtr> args) {
    for (auto& a : args) fn = app(fn, a);
    return fn;
}
inline TermPtr num(Nat v, Span sp = {}) {
    if (v < 0) throw Error("numerals are non-negative");
    return mk(Term{Num{std::move(v)}, sp});
}
inline TermPtr num(unsigned long long v, Span sp = {}) { return num(Nat(v), sp); }
inline TermPtr succ_op(Span sp = {}) { return mk(Term{SuccOp{}, sp}); }
inline TermPtr pred_op(Span sp = {}) { return mk(Term{PredOp{}, sp}); }
inline TermPtr if_op(Span sp = {}) { return mk(Term{IfOp{}, sp}); }
inline TermPtr fix_op(TypePtr ann, Span sp = {}) { return mk(Term{FixOp{std::move(ann)}, sp}); }
inline TermPtr get_op(Span sp = {}) { return mk(Term{GetOp{}, sp}); }
inline TermPtr set_op(Span sp = {}) { return mk(Term{SetOp{}, sp}); }
inline TermPtr gate(std::string name, Span sp = {}) { return mk(Term{GateRef{std::move(name)}, sp}); }
inline TermPtr seq_op(Span sp = {}) { return mk(Term{SeqOp{}, sp}); }
inline TermPtr par_op(Span sp = {}) { return mk(Term{ParOp{}, sp}); }
inline TermPtr iter_op(Span sp = {}) { return mk(Term{IterOp{}, sp}); }
inline TermPtr rev_op(Span sp = {}) { return mk(Term{RevOp{}, sp}); }
inline TermPtr idx_bin(char op, TermPtr l, TermPtr r, Span sp = {}) {
    return mk(Term{IdxBin{op, std::move(l), std::move(r)}, sp});
}
inline TermPtr size_of(TermPtr arg, TermPtr resolved = nullptr, Span sp = {}) {
    return mk(Term{SizeOf{std::move(arg), std::move(resolved)}, sp});
}
inline TermPtr dmeas(TermPtr state, TermPtr circ, TermPtr resolved = nullptr, Span sp = {}) {
    return mk(Term{Meas{std::move(state), std::move(circ), std::move(resolved)}, sp});
}

inline TypePtr t_nat() { return mk(Type{TNat{}}); }
inline TypePtr t_idx() { return mk(Type{TIdx{}}); }
inline TypePtr t_circ(TermPtr index) { return mk(Type{TCirc{std::move(index)}}); }
inline TypePtr t_pi(std::string name, TypePtr dom, TypePtr cod) {
    return mk(Type{TPi{std::move(name), std::move(dom), std::move(cod)}});
}
// arrow = Pi with a name that cannot occur free in user code
inline TypePtr t_arrow(TypePtr dom, TypePtr cod) {
    return t_pi("_", std::move(dom), std::move(cod));
}

// convenience projections
inline const Num* as_num(const TermPtr& t) { return std::get_if<Num>(&t->node); }
inline const Lam* as_lam(const TermPtr& t) { return std::get_if<Lam>(&t->node); }
inline const App* as_app(const TermPtr& t) { return std::get_if<App>(&t->node); }
inline const TCirc* as_circ(const TypePtr& t) { return std::get_if<TCirc>(&t->node); }
inline const TPi* as_pi(const TypePtr& t) { return std::get_if<TPi>(&t->node); }

// ---------------------------------------------------------------------------
// Free variables (binder annotations and resolved-index slots contribute)
// ---------------------------------------------------------------------------

using NameSet = std::set<std::string>;

inline void free_vars_into(const TermPtr& t, NameSet& bound, NameSet& out);

inline void free_vars_into(const TypePtr& ty, NameSet& bound, NameSet& out) {
    std::visit(overloaded{
                   [](const TNat&) {},
                   [](const TIdx&) {},
                   [&](const TCirc& c) { free_vars_into(c.index, bound, out); },
                   [&](const TPi& p) {
                       free_vars_into(p.dom, bound, out);
                       bool fresh = bound.insert(p.name).second;
                       free_vars_into(p.cod, bound, out);
                       if (fresh) bound.erase(p.name);
                   },
               },
               ty->node);
}

inline void free_vars_into(const TermPtr& t, NameSet& bound, NameSet& out) {
    std::visit(overloaded{
                   [&](const Var& v) {
                       if (!bound.count(v.name)) out.insert(v.name);
                   },
                   [&](const Lam& l) {
                       free_vars_into(l.ann, bound, out);
                       bool fresh = bound.insert(l.name).second;
                       free_vars_into(l.body, bound, out);
                       if (fresh) bound.erase(l.name);
                   },
                   [&](const App& a) {
                       free_vars_into(a.fn, bound, out);
                       free_vars_into(a.arg, bound, out);
                   },
                   [](const Num&) {},
                   [&](const FixOp& f) { free_vars_into(f.ann, bound, out); },
                   [&](const IdxBin& b) {
                       free_vars_into(b.lhs, bound, out);
                       free_vars_into(b.rhs, bound, out);
                   },
                   [&](const SizeOf& s) {
                       free_vars_into(s.arg, bound, out);
                       if (s.resolved) free_vars_into(s.resolved, bound, out);
                   },
                   [&](const Meas& m) {
                       free_vars_into(m.state, bound, out);
                       free_vars_into(m.circ, bound, out);
                       if (m.resolved) free_vars_into(m.resolved, bound, out);
                   },
                   [](const auto&) {},
               },
               t->node);
}

inline NameSet free_vars(const TermPtr& t) {
    NameSet bound, out;
    free_vars_into(t, bound, out);
    return out;
}

inline NameSet free_vars(const TypePtr& ty) {
    NameSet bound, out;
    free_vars_into(ty, bound, out);
    return out;
}

// ---------------------------------------------------------------------------
// Fresh names: global counter suffixing, checked against an avoid set
// ---------------------------------------------------------------------------

inline std::atomic<std::uint64_t>& fresh_counter() {
    static std::atomic<std::uint64_t> counter{0};
    return counter;
}

inline std::string fresh_name(const std::string& base, const NameSet& avoid) {
    std::string stem = base.substr(0, base.find('\''));
    if (stem.empty()) stem = "x";
    for (;;) {
        std::uint64_t n = ++fresh_counter();
        std::string candidate = stem + "'" + std::to_string(n);
        if (!avoid.count(candidate)) return candidate;
    }
}

// ---------------------------------------------------------------------------
// Capture-avoiding substitution. Descends into binder annotations, into the
// index term of Circ, and into resolved-index slots.
// ---------------------------------------------------------------------------

inline TermPtr subst_term(const TermPtr& t, const std::string& x, const TermPtr& n);

inline TypePtr subst_type(const TypePtr& ty, const std::string& x, const TermPtr& n) {
    return std::visit(
        overloaded{
            [&](const TNat&) { return ty; },
            [&](const TIdx&) { return ty; },
            [&](const TCirc& c) { return t_circ(subst_term(c.index, x, n)); },
            [&](const TPi& p) {
                TypePtr dom = subst_type(p.dom, x, n);
                if (p.name == x) return t_pi(p.name, dom, p.cod);
                NameSet fv_cod = free_vars(p.cod);
                if (!fv_cod.count(x)) return t_pi(p.name, dom, p.cod);
                if (free_vars(n).count(p.name)) {
                    NameSet avoid = free_vars(n);
                    avoid.merge(NameSet(fv_cod));
                    std::string y = fresh_name(p.name, avoid);
                    TypePtr cod = subst_type(p.cod, p.name, var(y));
                    return t_pi(y, dom, subst_type(cod, x, n));
                }
                return t_pi(p.name, dom, subst_type(p.cod, x, n));
            },
        },
        ty->node);
}

inline TermPtr subst_term(const TermPtr& t, const std::string& x, const TermPtr& n) {
    return std::visit(
        overloaded{
            [&](const Var& v) { return v.name == x ? n : t; },
            [&](const Lam& l) {
                TypePtr ann = subst_type(l.ann, x, n);
                if (l.name == x) return lam(l.name, ann, l.body, t->span);
                NameSet fv_body = free_vars(l.body);
                if (!fv_body.count(x)) return lam(l.name, ann, l.body, t->span);
                if (free_vars(n).count(l.name)) {
                    NameSet avoid = free_vars(n);
                    avoid.merge(NameSet(fv_body));
                    std::string y = fresh_name(l.name, avoid);
                    TermPtr body = subst_term(l.body, l.name, var(y));
                    return lam(y, ann, subst_term(body, x, n), t->span);
                }
                return lam(l.name, ann, subst_term(l.body, x, n), t->span);
            },
            [&](const App& a) {
                return app(subst_term(a.fn, x, n), subst_term(a.arg, x, n), t->span);
            },
            [&](const FixOp& f) { return fix_op(subst_type(f.ann, x, n), t->span); },
            [&](const IdxBin& b) {
                return idx_bin(b.op, subst_term(b.lhs, x, n), subst_term(b.rhs, x, n), t->span);
            },
            [&](const SizeOf& s) {
                return size_of(subst_term(s.arg, x, n),
                               s.resolved ? subst_term(s.resolved, x, n) : nullptr, t->span);
            },
            [&](const Meas& m) {
                return dmeas(subst_term(m.state, x, n), subst_term(m.circ, x, n),
                             m.resolved ? subst_term(m.resolved, x, n) : nullptr, t->span);
            },
            [&](const auto&) { return t; },
        },
        t->node);
}

// ---------------------------------------------------------------------------
// Alpha-equivalence. Resolved-index slots are derived data and do not
// participate; binder annotations do.
// ---------------------------------------------------------------------------

namespace detail {

struct AlphaEnv {
    std::vector<std::pair<std::string, std::string>> pairs;

    bool matches(const std::string& a, const std::string& b) const {
        for (auto it = pairs.rbegin(); it != pairs.rend(); ++it) {
            if (it->first == a || it->second == b) return it->first == a && it->second == b;
        }
        return a == b;  // both free
    }
};

inline bool alpha_eq_rec(const TermPtr& a, const TermPtr& b, AlphaEnv& env);

inline bool alpha_eq_rec(const TypePtr& a, const TypePtr& b, AlphaEnv& env) {
    if (a->node.index() != b->node.index()) return false;
    return std::visit(
        overloaded{
            [](const TNat&) { return true; },
            [](const TIdx&) { return true; },
            [&](const TCirc& ca) {
                return alpha_eq_rec(ca.index, std::get<TCirc>(b->node).index, env);
            },
            [&](const TPi& pa) {
                const TPi& pb = std::get<TPi>(b->node);
                if (!alpha_eq_rec(pa.dom, pb.dom, env)) return false;
                env.pairs.emplace_back(pa.name, pb.name);
                bool ok = alpha_eq_rec(pa.cod, pb.cod, env);
                env.pairs.pop_back();
                return ok;
            },
        },
        a->node);
}

inline bool alpha_eq_rec(const TermPtr& a, const TermPtr& b, AlphaEnv& env) {
    if (a->node.index() != b->node.index()) return false;
    return std::visit(
        overloaded{
            [&](const Var& va) { return env.matches(va.name, std::get<Var>(b->node).name); },
            [&](const Lam& la) {
                const Lam& lb = std::get<Lam>(b->node);
                if (!alpha_eq_rec(la.ann, lb.ann, env)) return false;
                env.pairs.emplace_back(la.name, lb.name);
                bool ok = alpha_eq_rec(la.body, lb.body, env);
                env.pairs.pop_back();
                return ok;
            },
            [&](const App& aa) {
                const App& ab = std::get<App>(b->node);
                return alpha_eq_rec(aa.fn, ab.fn, env) && alpha_eq_rec(aa.arg, ab.arg, env);
            },
            [&](const Num& na) { return na.value == std::get<Num>(b->node).value; },
            [&](const FixOp& fa) { return alpha_eq_rec(fa.ann, std::get<FixOp>(b->node).ann, env); },
            [&](const GateRef& ga) { return ga.name == std::get<GateRef>(b->node).name; },
            [&](const IdxBin& oa) {
                const IdxBin& ob = std::get<IdxBin>(b->node);
                return oa.op == ob.op && alpha_eq_rec(oa.lhs, ob.lhs, env) &&
                       alpha_eq_rec(oa.rhs, ob.rhs, env);
            },
            [&](const SizeOf& sa) { return alpha_eq_rec(sa.arg, std::get<SizeOf>(b->node).arg, env); },
            [&](const Meas& ma) {
                const Meas& mb = std::get<Meas>(b->node);
                return alpha_eq_rec(ma.state, mb.state, env) && alpha_eq_rec(ma.circ, mb.circ, env);
            },
            [](const auto&) { return true; },
        },
        a->node);
}

}  // namespace detail

inline bool alpha_eq(const TermPtr& a, const TermPtr& b) {
    detail::AlphaEnv env;
    return detail::alpha_eq_rec(a, b, env);
}

inline bool alpha_eq(const TypePtr& a, const TypePtr& b) {
    detail::AlphaEnv env;
    return detail::alpha_eq_rec(a, b, env);
}

// ---------------------------------------------------------------------------
// Canonical serialization: bound variables become de Bruijn indices, so two
// alpha-equivalent terms produce identical keys. Used for the size-atoms of
// the index normal form and for deterministic orderings.
// ---------------------------------------------------------------------------

namespace detail {

struct KeyEnv {
    std::vector<std::string> binders;

    std::string resolve(const std::string& name) const {
        for (std::size_t i = binders.size(); i-- > 0;) {
            if (binders[i] == name) return "b" + std::to_string(binders.size() - 1 - i);
        }
        return "f:" + name;
    }
};

inline void key_rec(const TermPtr& t, KeyEnv& env, std::string& out);

inline void key_rec(const TypePtr& ty, KeyEnv& env, std::string& out) {
    std::visit(overloaded{
                   [&](const TNat&) { out += "N"; },
                   [&](const TIdx&) { out += "I"; },
                   [&](const TCirc& c) {
                       out += "C(";
                       key_rec(c.index, env, out);
                       out += ")";
                   },
                   [&](const TPi& p) {
                       out += "P(";
                       key_rec(p.dom, env, out);
                       out += ".";
                       env.binders.push_back(p.name);
                       key_rec(p.cod, env, out);
                       env.binders.pop_back();
                       out += ")";
                   },
               },
               ty->node);
}

inline void key_rec(const TermPtr& t, KeyEnv& env, std::string& out) {
    std::visit(overloaded{
                   [&](const Var& v) { out += env.resolve(v.name); },
                   [&](const Lam& l) {
                       out += "L(";
                       key_rec(l.ann, env, out);
                       out += ".";
                       env.binders.push_back(l.name);
                       key_rec(l.body, env, out);
                       env.binders.pop_back();
                       out += ")";
                   },
                   [&](const App& a) {
                       out += "A(";
                       key_rec(a.fn, env, out);
                       out += " ";
                       key_rec(a.arg, env, out);
                       out += ")";
                   },
                   [&](const Num& n) { out += "n" + n.value.str(); },
                   [&](const SuccOp&) { out += "succ"; },
                   [&](const PredOp&) { out += "pred"; },
                   [&](const IfOp&) { out += "if"; },
                   [&](const FixOp& f) {
                       out += "Y(";
                       key_rec(f.ann, env, out);
                       out += ")";
                   },
                   [&](const GetOp&) { out += "get"; },
                   [&](const SetOp&) { out += "set"; },
                   [&](const GateRef& g) { out += "g:" + g.name; },
                   [&](const SeqOp&) { out += "seq"; },
                   [&](const ParOp&) { out += "par"; },
                   [&](const IterOp&) { out += "iter"; },
                   [&](const RevOp&) { out += "rev"; },
                   [&](const IdxBin& b) {
                       out += b.op;
                       out += "(";
                       key_rec(b.lhs, env, out);
                       out += " ";
                       key_rec(b.rhs, env, out);
                       out += ")";
                   },
                   [&](const SizeOf& s) {
                       out += "sz(";
                       key_rec(s.arg, env, out);
                       out += ")";
                   },
                   [&](const Meas& m) {
                       out += "dm(";
                       key_rec(m.state, env, out);
                       out += " ";
                       key_rec(m.circ, env, out);
                       out += ")";
                   },
               },
               t->node);
}

}  // namespace detail

inline std::string canonical_key(const TermPtr& t) {
    detail::KeyEnv env;
    std::string out;
    detail::key_rec(t, env, out);
    return out;
}

// ---------------------------------------------------------------------------
// Typing bases: ordered (name, type) pairs with pairwise-distinct names
// ---------------------------------------------------------------------------

class Base {
  public:
    Base() = default;

    const TypePtr* lookup(const std::string& name) const {
        for (auto it = entries_.rbegin(); it != entries_.rend(); ++it) {
            if (it->first == name) return &it->second;
        }
        return nullptr;
    }

    bool contains(const std::string& name) const { return lookup(name) != nullptr; }

    Base extended(const std::string& name, TypePtr ty) const {
        if (contains(name)) throw Error("base already binds variable '" + name + "'");
        Base b = *this;
        b.entries_.emplace_back(name, std::move(ty));
        return b;
    }

    const std::vector<std::pair<std::string, TypePtr>>& entries() const { return entries_; }

    std::size_t size() const { return entries_.size(); }

  private:
    std::vector<std::pair<std::string, TypePtr>> entries_;
};

}  // namespace qpcf
