#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "qpcf/eval.hpp"
#include "qpcf/parser.hpp"
#include "qpcf/prelude.hpp"
#include "qpcf/printer.hpp"
#include "qpcf/typecheck.hpp"
#include "support/generators.hpp"

using namespace qpcf;

namespace {

const GateRegistry& reg() {
    static const GateRegistry r = default_registry();
    return r;
}

TermPtr resolved(const std::string& name) {
    std::vector<Definition> defs = parse_definitions(prelude_source(), reg());
    std::vector<Definition> seen;
    for (const auto& d : defs) {
        TermPtr body = d.term;
        for (const auto& s : seen) body = subst_term(body, s.name, s.term);
        if (d.name == name) return body;
        seen.push_back({d.name, body, d.span});
    }
    throw Error("prelude has no definition named '" + name + "'");
}

TermPtr run_main(const std::string& src) {
    std::vector<Definition> defs = parse_definitions(prelude_source(), reg());
    SourceProgram prog = parse_program(src, reg());
    TermPtr main = inline_definitions(defs, prog.main);
    return elaborate(Base{}, main, reg()).elaborated;
}

}  // namespace

TEST_CASE("every prelude entry type-checks to its declared type") {
    for (const PreludeEntry& entry : prelude_programs()) {
        INFO(entry.name);
        TypePtr declared = parse_type(entry.declared_type, reg());
        TypePtr inferred = infer(Base{}, resolved(entry.name), reg());
        CHECK(type_eq(inferred, declared));
    }
}

TEST_CASE("entry sources match the shipped prelude text") {
    for (const PreludeEntry& entry : prelude_programs()) {
        if (entry.source.empty()) continue;  // recursion-heavy helpers are summarized
        INFO(entry.name);
        TermPtr from_entry = parse_term(entry.source, reg());
        // resolve the entry source against the prelude definitions
        std::vector<Definition> defs = parse_definitions(prelude_source(), reg());
        TermPtr resolved_entry = inline_definitions(defs, from_entry);
        CHECK(alpha_eq(resolved_entry, resolved(entry.name)));
    }
}

TEST_CASE("sequential template concatenates n+1 copies") {
    testgen::Gen g(61);
    const char* gates_by_arity[] = {"H", "CNOT", "CCNOT"};
    for (int round = 0; round < 12; ++round) {
        int k = g.pick(3);
        int n = g.pick(5);
        std::string src = "M_seq " + std::to_string(k) + " " + gates_by_arity[k] + " " +
                          std::to_string(n);
        Rng rng(0);
        auto out = eval_sample(run_main(src), rng, reg());
        REQUIRE(out.has_value());
        // expect a right-nested chain of exactly n+1 copies
        CircPtr c = out->value.circ();
        int copies = 1;
        while (const CSeq* s = std::get_if<CSeq>(&c->node)) {
            CHECK(std::get_if<CGate>(&s->first->node) != nullptr);
            c = s->second;
            ++copies;
        }
        CHECK(std::get_if<CGate>(&c->node) != nullptr);
        CHECK(copies == n + 1);
    }
}

TEST_CASE("parallel template stacks copies") {
    Rng rng(0);
    auto out = eval_sample(run_main("M_par 0 0 2 X H"), rng, reg());
    REQUIRE(out.has_value());
    CHECK(to_string(out->value.circ()) == "H || H || X");
}

TEST_CASE("integer square root against the arithmetic oracle") {
    Rng rng(0);
    auto eight = eval_sample(run_main("isqrt 8"), rng, reg());
    REQUIRE(eight.has_value());
    CHECK(eight->value.num() == 2);

    for (int n = 0; n <= 26; ++n) {
        auto out = eval_sample(run_main("isqrt " + std::to_string(n)), rng, reg());
        REQUIRE(out.has_value());
        CHECK(out->value.num() == Nat((int)std::floor(std::sqrt(double(n)))));
    }
}

TEST_CASE("arithmetic helpers behave") {
    Rng rng(0);
    auto check_num = [&](const std::string& src, int expect) {
        auto out = eval_sample(run_main(src), rng, reg());
        REQUIRE(out.has_value());
        CHECK(out->value.num() == expect);
    };
    check_num("add 3 4", 7);
    check_num("mul 5 6", 30);
    check_num("monus 3 5", 0);
    check_num("monus 5 3", 2);
    check_num("le 2 2", 0);
    check_num("le 3 2", 1);
}

TEST_CASE("grover pieces have the right shapes") {
    CHECK(reg().has("D3"));
    CHECK(reg().has("O011"));
    Rng rng(0);
    auto step = eval_sample(run_main("G3_step"), rng, reg());
    REQUIRE(step.has_value());
    CHECK(step->value.circ()->wires == 4);
    CHECK(to_string(step->value.circ()) == "O011 ; (D3 || I)");
}
