#include <catch2/catch_amalgamated.hpp>

#include "qpcf/ast.hpp"
#include "qpcf/printer.hpp"
#include "support/generators.hpp"

using namespace qpcf;

TEST_CASE("substitution hits variables") {
    CHECK(alpha_eq(subst_term(var("x"), "x", num(5)), num(5)));
    CHECK(alpha_eq(subst_term(var("y"), "x", num(5)), var("y")));
}

TEST_CASE("substitution avoids capture") {
    // (fn y:Nat. x)[x := y] must rename the binder
    TermPtr t = lam("y", t_nat(), var("x"));
    TermPtr got = subst_term(t, "x", var("y"));
    CHECK(alpha_eq(got, lam("w", t_nat(), var("y"))));
    CHECK_FALSE(alpha_eq(got, lam("y", t_nat(), var("y"))));
}

TEST_CASE("substitution descends into annotations") {
    TermPtr t = lam("u", t_circ(var("x")), var("u"));
    TermPtr got = subst_term(t, "x", num(3));
    CHECK(alpha_eq(got, lam("u", t_circ(num(3)), var("u"))));
}

TEST_CASE("type substitution") {
    CHECK(alpha_eq(subst_type(t_circ(var("x")), "x", num(7)), t_circ(num(7))));
    CHECK(alpha_eq(subst_type(t_nat(), "x", var("m")), t_nat()));
    TypePtr pi = t_pi("y", t_idx(), t_circ(idx_bin('+', var("x"), var("y"))));
    CHECK(alpha_eq(subst_type(pi, "x", num(2)),
                   t_pi("y", t_idx(), t_circ(idx_bin('+', num(2), var("y"))))));
}

TEST_CASE("alpha equivalence basics") {
    CHECK(alpha_eq(lam("x", t_nat(), var("x")), lam("y", t_nat(), var("y"))));
    CHECK_FALSE(alpha_eq(lam("x", t_nat(), var("x")), lam("y", t_idx(), var("y"))));
    CHECK_FALSE(alpha_eq(var("x"), var("y")));
    CHECK(alpha_eq(t_pi("x", t_idx(), t_circ(var("x"))), t_pi("y", t_idx(), t_circ(var("y")))));
}

TEST_CASE("free variables include annotations") {
    CHECK(free_vars(app(lam("x", t_nat(), var("x")), var("y"))) == NameSet{"y"});
    CHECK(free_vars(lam("u", t_circ(var("k")), var("u"))) == NameSet{"k"});
    CHECK(free_vars(num(5)).empty());
}

TEST_CASE("base rejects duplicate names") {
    Base b = Base{}.extended("x", t_nat());
    CHECK_THROWS_AS(b.extended("x", t_idx()), Error);
    CHECK(b.lookup("x") != nullptr);
    CHECK(b.lookup("y") == nullptr);
}

namespace {

// random alpha-variant: renames every binder
TermPtr rename_binders(const TermPtr& t, testgen::Gen& g);

TypePtr rename_binders(const TypePtr& ty, testgen::Gen& g) {
    return std::visit(overloaded{
                          [&](const TNat&) { return ty; },
                          [&](const TIdx&) { return ty; },
                          [&](const TCirc& c) { return t_circ(rename_binders(c.index, g)); },
                          [&](const TPi& p) {
                              std::string fresh = "r" + std::to_string(g.pick(100000));
                              TypePtr cod = subst_type(p.cod, p.name, var(fresh));
                              return t_pi(fresh, rename_binders(p.dom, g), rename_binders(cod, g));
                          },
                      },
                      ty->node);
}

TermPtr rename_binders(const TermPtr& t, testgen::Gen& g) {
    return std::visit(
        overloaded{
            [&](const Lam& l) {
                std::string fresh = "r" + std::to_string(g.pick(100000));
                TermPtr body = subst_term(l.body, l.name, var(fresh));
                return lam(fresh, rename_binders(l.ann, g), rename_binders(body, g));
            },
            [&](const App& a) { return app(rename_binders(a.fn, g), rename_binders(a.arg, g)); },
            [&](const FixOp& f) { return fix_op(rename_binders(f.ann, g)); },
            [&](const IdxBin& b) {
                return idx_bin(b.op, rename_binders(b.lhs, g), rename_binders(b.rhs, g));
            },
            [&](const SizeOf& s) { return size_of(rename_binders(s.arg, g)); },
            [&](const Meas& m) {
                return dmeas(rename_binders(m.state, g), rename_binders(m.circ, g));
            },
            [&](const auto&) { return t; },
        },
        t->node);
}

}  // namespace

TEST_CASE("substitution is the identity off the free variables") {
    testgen::Gen g(42);
    for (int i = 0; i < 300; ++i) {
        std::vector<std::string> binders;
        TermPtr t = testgen::gen_surface_term(g, binders, 4);
        NameSet fv = free_vars(t);
        std::string missing = "zz_not_free";
        REQUIRE(!fv.count(missing));
        CHECK(alpha_eq(subst_term(t, missing, num(99)), t));
    }
}

TEST_CASE("free variables of a substitution instance") {
    testgen::Gen g(43);
    for (int i = 0; i < 300; ++i) {
        std::vector<std::string> binders;
        TermPtr t = testgen::gen_surface_term(g, binders, 4);
        TermPtr n = testgen::gen_surface_term(g, binders, 3);
        NameSet fv_t = free_vars(t);
        if (fv_t.empty()) continue;
        std::string x = *fv_t.begin();
        NameSet got = free_vars(subst_term(t, x, n));
        NameSet allowed = fv_t;
        allowed.erase(x);
        for (const auto& name : free_vars(n)) allowed.insert(name);
        for (const auto& name : got) CHECK(allowed.count(name));
    }
}

TEST_CASE("alpha equivalence is an equivalence relation") {
    testgen::Gen g(44);
    for (int i = 0; i < 200; ++i) {
        std::vector<std::string> binders;
        TermPtr a = testgen::gen_surface_term(g, binders, 4);
        TermPtr b = rename_binders(a, g);
        TermPtr c = rename_binders(b, g);
        CHECK(alpha_eq(a, a));
        CHECK(alpha_eq(a, b));
        CHECK(alpha_eq(b, a));
        CHECK(alpha_eq(a, c));  // transitivity along the chain
    }
}
