#include <catch2/catch_amalgamated.hpp>

#include "qpcf/parser.hpp"
#include "qpcf/printer.hpp"
#include "support/generators.hpp"

using namespace qpcf;

static const GateRegistry& reg() { return builtin_registry(); }

TEST_CASE("composition operators parse to operator spines") {
    TermPtr t = parse_term("(I || H) ; CNOT", reg());
    TermPtr expected = app(app(seq_op(), app(app(par_op(), gate("I")), gate("H"))), gate("CNOT"));
    CHECK(alpha_eq(t, expected));
}

TEST_CASE("lambda bodies extend to the right") {
    TermPtr t = parse_term("fn x:Idx. iter x H H", reg());
    TermPtr expected =
        lam("x", t_idx(), app(app(app(iter_op(), var("x")), gate("H")), gate("H")));
    CHECK(alpha_eq(t, expected));
}

TEST_CASE("syntax errors carry positions") {
    try {
        parse_term("fn x:", reg());
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line == 1);
        CHECK(e.col >= 5);
        CHECK_FALSE(e.expected.empty());
    }
}

TEST_CASE("precedence: * over + over ; over ||, application tightest") {
    CHECK(alpha_eq(parse_term("1 + 2 * 3", reg()),
                   idx_bin('+', num(1), idx_bin('*', num(2), num(3)))));
    TermPtr t = parse_term("H ; H || CNOT", reg());
    TermPtr expected = app(app(par_op(), app(app(seq_op(), gate("H")), gate("H"))), gate("CNOT"));
    CHECK(alpha_eq(t, expected));
    CHECK(alpha_eq(parse_term("f x y", reg()), app(app(var("f"), var("x")), var("y"))));
    // size binds one atom
    CHECK(alpha_eq(parse_term("size f x", reg()), app(size_of(var("f")), var("x"))));
}

TEST_CASE("pretty prints minimal parentheses") {
    CHECK(pretty(num(5)) == "5");
    TermPtr epr = app(app(seq_op(), app(app(par_op(), gate("I")), gate("H"))), gate("CNOT"));
    CHECK(pretty(epr) == "(I || H) ; CNOT");
    CHECK(pretty(app(app(var("f"), var("x")), var("y"))) == "f x y");
    CHECK(pretty(app(var("f"), app(var("g"), var("x")))) == "f (g x)");
    CHECK(pretty(idx_bin('*', idx_bin('+', var("x"), num(1)), var("y"))) == "(x + 1) * y");
}

TEST_CASE("definitions inline in order") {
    SourceProgram prog = parse_program("a = 2\nb = a + 1\nb * a", reg());
    REQUIRE(prog.defs.size() == 2);
    TermPtr main = resolved_main(prog);
    CHECK(alpha_eq(main, idx_bin('*', idx_bin('+', num(2), num(1)), num(2))));
}

TEST_CASE("definition name clashes are rejected") {
    CHECK_THROWS_AS(parse_program("a = 1\na = 2\na", reg()), ParseError);
    CHECK_THROWS_AS(parse_program("H = 1\nH", reg()), ParseError);
    CHECK_THROWS_AS(parse_term("fn if:Nat. 5", reg()), ParseError);
    CHECK_THROWS_AS(parse_term("fn H:Nat. 5", reg()), ParseError);
}

TEST_CASE("comments and whitespace are skipped") {
    TermPtr t = parse_term("succ -- bump by one\n  1", reg());
    CHECK(alpha_eq(t, app(succ_op(), num(1))));
}

TEST_CASE("missing main term is an error") {
    CHECK_THROWS_AS(parse_program("a = 1", reg()), ParseError);
    CHECK(parse_definitions("a = 1", reg()).size() == 1);
}

TEST_CASE("round-trip: parse after pretty is alpha-equivalent") {
    testgen::Gen g(7);
    for (int i = 0; i < 400; ++i) {
        std::vector<std::string> binders;
        TermPtr t = testgen::gen_surface_term(g, binders, 5);
        std::string text = pretty(t);
        INFO(text);
        TermPtr back = parse_term(text, reg());
        CHECK(alpha_eq(back, t));
    }
}

TEST_CASE("parser is total on junk input") {
    testgen::Gen g(8);
    const std::string alphabet = "fnx:. ()[]|;+*->=dmeasiterifCirc\n\t0123456789~@#$\\\"'";
    for (int i = 0; i < 500; ++i) {
        std::string s;
        int len = g.pick(60);
        for (int j = 0; j < len; ++j) s += alphabet[g.pick((int)alphabet.size())];
        try {
            parse_program(s, reg());
        } catch (const ParseError&) {
            // positioned failure is the contract
        }
    }
    SUCCEED("no crash");
}

TEST_CASE("types parse and print") {
    TypePtr ty = parse_type("Pi x:Idx. Circ(x) -> Circ(x)", reg());
    CHECK(alpha_eq(ty, t_pi("x", t_idx(), t_arrow(t_circ(var("x")), t_circ(var("x"))))));
    CHECK(pretty(ty) == "Pi x:Idx. Circ(x) -> Circ(x)");
    TypePtr arr = parse_type("(Nat -> Nat) -> Nat", reg());
    CHECK(pretty(arr) == "(Nat -> Nat) -> Nat");
}
