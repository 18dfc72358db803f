#include <catch2/catch_amalgamated.hpp>

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

TermPtr check(const std::string& src) {
    std::vector<Definition> defs = parse_definitions(prelude_source(), reg());
    SourceProgram prog = parse_program(src, reg());
    for (const auto& d : prog.defs) defs.push_back(d);
    TermPtr main = inline_definitions(defs, prog.main);
    return elaborate(Base{}, main, reg()).elaborated;
}

EvalOutcome sample(const std::string& src, std::uint64_t seed = 0, long long fuel = 1'000'000) {
    Rng rng(seed);
    auto out = eval_sample(check(src), rng, reg(), EvalConfig{fuel});
    REQUIRE(out.has_value());
    return *out;
}

Distribution dist(const std::string& src, DistConfig cfg = {}) {
    return eval_dist(check(src), reg(), cfg);
}

}  // namespace

TEST_CASE("bit extraction") {
    CHECK(get_bit(3, 0) == 1);
    CHECK(get_bit(4, 2) == 1);
    CHECK(get_bit(4, 0) == 0);
    CHECK(get_bit(0, 1000000) == 0);

    // independent oracle: walk the binary string
    testgen::Gen g(51);
    for (int i = 0; i < 300; ++i) {
        unsigned long long m = g.eng() >> (g.pick(60));
        unsigned pos = (unsigned)g.pick(70);
        Nat expect = pos < 64 ? Nat((m >> pos) & 1) : Nat(0);
        CHECK(get_bit(Nat(m), Nat(pos)) == expect);
    }
}

TEST_CASE("bit setting forces a one") {
    CHECK(set_bit(0, 3) == 8);
    CHECK(set_bit(5, 1) == 7);
    CHECK(set_bit(7, 1) == 7);  // idempotent on a set bit
    testgen::Gen g(52);
    for (int i = 0; i < 300; ++i) {
        unsigned long long m = g.eng() >> (g.pick(60));
        unsigned pos = (unsigned)g.pick(64);
        CHECK(set_bit(Nat(m), Nat(pos)) == Nat(m | (1ull << pos)));
    }
    CHECK_THROWS_AS(set_bit(0, Nat(kMaxBitPosition) + 1), EvalError);
}

TEST_CASE("size reads the type, not the argument") {
    EvalOutcome out = sample("size (fix[Circ(8)] (fn x:Circ(8). x))");
    CHECK(out.value.num() == 8);
    CHECK(out.probability == 1.0);
}

TEST_CASE("iter builds copies on top of the base") {
    EvalOutcome out = sample("iter 2 I H");
    CircPtr expected = c_par(c_gate(reg(), "H"), c_par(c_gate(reg(), "H"), c_gate(reg(), "I")));
    CHECK(circuit_eq(out.value.circ(), expected));
    CHECK(to_string(out.value.circ()) == "H || H || I");
}

TEST_CASE("parallel values swap their operands") {
    EvalOutcome out = sample("I || H");
    CHECK(to_string(out.value.circ()) == "H || I");
}

TEST_CASE("reverse flips order and takes adjoints") {
    EvalOutcome out = sample("reverse (S ; T)");
    CircPtr expected = c_seq(c_gate(reg(), "Tdg"), c_gate(reg(), "Sdg"));
    CHECK(circuit_eq(out.value.circ(), expected));
    // parallel children keep their order: (S || X) evaluates to X || S first
    EvalOutcome par_out = sample("reverse (S || X)");
    CHECK(to_string(par_out.value.circ()) == "X || Sdg");
}

TEST_CASE("measurement samples the co-processor distribution") {
    int zeros = 0, threes = 0;
    for (std::uint64_t seed = 0; seed < 400; ++seed) {
        EvalOutcome out = sample("dmeas(0, EPR)", seed);
        CHECK(out.probability == Catch::Approx(0.5).margin(1e-9));
        if (out.value.num() == 0) ++zeros;
        else if (out.value.num() == 3) ++threes;
    }
    CHECK(zeros + threes == 400);
    CHECK(zeros > 100);
    CHECK(threes > 100);
}

TEST_CASE("same seed, same derivation") {
    EvalOutcome a = sample("dmeas(0, EPR)", 17);
    EvalOutcome b = sample("dmeas(0, EPR)", 17);
    CHECK(value_eq(a.value, b.value));
    CHECK(a.probability == b.probability);
}

TEST_CASE("divergence is reported, never looped") {
    Rng rng(0);
    auto out = eval_sample(check("fix[Nat] (fn x:Nat. x)"), rng, reg(), EvalConfig{20'000});
    CHECK(!out.has_value());
    // a missing premise is divergence too: pred 0 has no derivation
    auto stuck = eval_sample(check("pred 0"), rng, reg(), EvalConfig{20'000});
    CHECK(!stuck.has_value());
    Distribution d = dist("pred 0");
    CHECK(d.outcomes.empty());
    CHECK(d.residual == Catch::Approx(1.0));
}

TEST_CASE("distribution of a numeral is a point mass") {
    Distribution d = dist("5");
    REQUIRE(d.outcomes.size() == 1);
    CHECK(d.outcomes[0].first.num() == 5);
    CHECK(d.outcomes[0].second == Catch::Approx(1.0));
    CHECK(d.residual == 0.0);
}

TEST_CASE("half the mass of M8 diverges") {
    DistConfig cfg;
    cfg.fuel = 30'000;
    Distribution d = dist("if (dmeas(0, EPR)) 8 (fix[Nat] (fn x:Nat. x))", cfg);
    REQUIRE(d.outcomes.size() == 1);
    CHECK(d.outcomes[0].first.num() == 8);
    CHECK(d.outcomes[0].second == Catch::Approx(0.5).margin(1e-9));
    CHECK(d.residual == Catch::Approx(0.5).margin(1e-9));
}

TEST_CASE("the looping variant accumulates a geometric series") {
    for (unsigned depth : {1u, 4u, 12u, 20u}) {
        DistConfig cfg;
        cfg.max_branch_depth = depth;
        Distribution d = dist("fix[Nat] (fn x:Nat. if (dmeas(0, EPR)) 8 x)", cfg);
        // independent oracle: sum the first `depth` branch probabilities
        double expect = 0;
        for (unsigned k = 1; k <= depth; ++k) expect += std::pow(0.5, k);
        REQUIRE(d.outcomes.size() == 1);
        CHECK(d.outcomes[0].second == Catch::Approx(expect).margin(1e-9));
        CHECK(d.residual == Catch::Approx(1.0 - expect).margin(1e-9));
    }
}

TEST_CASE("mass and residual account for everything") {
    testgen::Gen g(53);
    for (int i = 0; i < 120; ++i) {
        testgen::GroundTerm gt = testgen::gen_ground_term(g, 4, true);
        TermPtr t;
        try {
            t = elaborate(Base{}, gt.term, builtin_registry()).elaborated;
        } catch (const TypeError&) {
            continue;
        }
        DistConfig cfg;
        cfg.fuel = 50'000;
        Distribution d = eval_dist(t, builtin_registry(), cfg);
        CHECK(d.total_mass() + d.residual == Catch::Approx(1.0).margin(1e-9));
    }
}

TEST_CASE("sampling frequencies match enumerated masses") {
    // one measurement with four outcomes
    std::string src = "dmeas(0, (H || H) ; (I || I))";
    Distribution d = dist(src);
    REQUIRE(d.outcomes.size() == 4);
    TermPtr t = check(src);
    const int n = 10'000;
    std::map<std::uint64_t, int> freq;
    for (std::uint64_t seed = 0; seed < n; ++seed) {
        Rng rng(seed);
        auto out = eval_sample(t, rng, reg());
        REQUIRE(out.has_value());
        ++freq[out->value.num().convert_to<std::uint64_t>()];
    }
    for (const auto& [value, mass] : d.outcomes) {
        double p = mass;
        double sigma = std::sqrt(p * (1 - p) / n);
        double observed = freq[value.num().convert_to<std::uint64_t>()] / double(n);
        CHECK(std::abs(observed - p) < 3 * sigma + 1e-12);
    }
}

TEST_CASE("deep measurement chains respect the wire budget") {
    EvalConfig cfg;
    cfg.max_wires = 2;
    Rng rng(0);
    CHECK_THROWS_AS(eval_sample(check("dmeas(0, CCNOT)"), rng, reg(), cfg), SimError);
}
