#pragma once

// Shipped prelude: circuit templates and arithmetic helpers written in qPCF,
// plus the Grover-3 gate definitions. The embedded text here is the source
// of truth; the build also ships identical prelude.qpcf / grover3.gates
// files next to the CLI binary.

#include <sstream>
#include <string>
#include <vector>

#include "qpcf/gates.hpp"

namespace qpcf {

inline const std::string& prelude_source() {
    static const std::string text = R"qpcf(-- qPCF prelude: circuit templates and arithmetic helpers.
-- Loaded ahead of every program unless --no-prelude is given.

-- n+1 sequential copies of a circuit of arity k
M_seq = fn k:Idx. fn u:Circ(k). fn x:Nat.
  fix[Circ(k) -> Nat -> Circ(k)]
    (fn w:Circ(k) -> Nat -> Circ(k). fn u2:Circ(k). fn y:Nat.
       if y u2 (u2 ; w u2 (pred y)))
    u x

-- one circuit in parallel with x copies of another
M_par = fn k:Idx. fn h:Idx. fn x:Idx. fn u:Circ(k). fn w:Circ(h). iter x u w

-- Bell-pair builder: Hadamard on the top wire, then CNOT
EPR = (I || H) ; CNOT

-- measurement-free Deutsch-Jozsa template: Hadamard layer, oracle,
-- Hadamard layer on the input wires only (identity on the ancilla)
DJ_minus = fn x:Idx. fn y:Circ(x). ((iter x H H) ; y) ; (iter x I H)

-- Deutsch-Jozsa runner: feed |0...01> and measure every wire
DJ_run = fn n:Idx. fn b:Circ(n). dmeas(1, DJ_minus n b)

-- arithmetic on Nat; + and * act on indexes, so these are recursive
add = fix[Nat -> Nat -> Nat]
  (fn f:Nat -> Nat -> Nat. fn a:Nat. fn b:Nat. if a b (succ (f (pred a) b)))

mul = fix[Nat -> Nat -> Nat]
  (fn f:Nat -> Nat -> Nat. fn a:Nat. fn b:Nat. if a 0 (add b (f (pred a) b)))

-- truncated subtraction
monus = fix[Nat -> Nat -> Nat]
  (fn f:Nat -> Nat -> Nat. fn a:Nat. fn b:Nat. if b a (if a 0 (f (pred a) (pred b))))

-- 0 when a <= b, 1 otherwise
le = fn a:Nat. fn b:Nat. monus a b

-- integer square root: largest r with r*r <= n
isqrt = fn n:Nat.
  fix[Nat -> Nat]
    (fn f:Nat -> Nat. fn r:Nat.
       if (le (mul (succ r) (succ r)) n) (f (succ r)) r)
    0

-- Grover skeleton: Hadamard layer, then isqrt(x)+1 copies of the search
-- step z (oracle composed with diffusion)
M_G = fn x:Idx. fn z:Circ(x). (iter x H H) ; M_seq x z (isqrt x)

-- one Grover iteration for the 3-input search: oracle for target 011,
-- then diffusion on the input wires
G3_step = O011 ; (I || D3)

-- full Grover circuit for target 011
G3 = M_G 3 G3_step
)qpcf";
    return text;
}

inline const std::string& grover3_gate_text() {
    static const std::string text = []() {
        std::string out;
        // D3: inversion about the mean on 3 wires, entries 2/8 - [i=j]
        out += "# Grover-3 auxiliary gates\n";
        out += "gate D3 arity 2 adjoint D3\n";
        for (int r = 0; r < 8; ++r) {
            out += "row";
            for (int c = 0; c < 8; ++c) out += r == c ? " -0.75+0i" : " 0.25+0i";
            out += "\n";
        }
        // O011: |x,q> -> |x, q xor f(x)> with f(x) = 1 iff x = 011
        out += "gate O011 arity 3 adjoint O011\n";
        for (int r = 0; r < 16; ++r) {
            int hit = r == 6 ? 7 : r == 7 ? 6 : r;
            out += "row";
            for (int c = 0; c < 16; ++c) out += c == hit ? " 1+0i" : " 0+0i";
            out += "\n";
        }
        return out;
    }();
    return text;
}

struct PreludeEntry {
    std::string name;
    std::string source;
    std::string declared_type;
    std::string note;
};

inline std::vector<PreludeEntry> prelude_programs() {
    return {
        {"M_seq",
         "fn k:Idx. fn u:Circ(k). fn x:Nat. fix[Circ(k) -> Nat -> Circ(k)] "
         "(fn w:Circ(k) -> Nat -> Circ(k). fn u2:Circ(k). fn y:Nat. "
         "if y u2 (u2 ; w u2 (pred y))) u x",
         "Pi k:Idx. Circ(k) -> Nat -> Circ(k)", "n+1 sequential copies of a circuit"},
        {"M_par", "fn k:Idx. fn h:Idx. fn x:Idx. fn u:Circ(k). fn w:Circ(h). iter x u w",
         "Pi k:Idx. Pi h:Idx. Pi x:Idx. Circ(k) -> Circ(h) -> Circ(k + (x * (h + 1)))",
         "one circuit in parallel with x copies of another"},
        {"EPR", "(I || H) ; CNOT", "Circ(1)", "Bell-pair builder"},
        {"DJ_minus", "fn x:Idx. fn y:Circ(x). ((iter x H H) ; y) ; (iter x I H)",
         "Pi x:Idx. Circ(x) -> Circ(x)", "measurement-free Deutsch-Jozsa template"},
        {"DJ_run", "fn n:Idx. fn b:Circ(n). dmeas(1, DJ_minus n b)",
         "Pi n:Idx. Circ(n) -> Nat", "Deutsch-Jozsa runner"},
        {"add", "", "Nat -> Nat -> Nat", "recursive addition"},
        {"mul", "", "Nat -> Nat -> Nat", "recursive multiplication"},
        {"monus", "", "Nat -> Nat -> Nat", "truncated subtraction"},
        {"le", "", "Nat -> Nat -> Nat", "0 when a <= b, 1 otherwise"},
        {"isqrt", "", "Nat -> Nat", "integer square root"},
        {"M_G", "fn x:Idx. fn z:Circ(x). (iter x H H) ; M_seq x z (isqrt x)",
         "Pi x:Idx. Circ(x) -> Circ(x)", "Grover skeleton over a search step"},
        {"G3_step", "O011 ; (I || D3)", "Circ(3)", "one Grover-3 iteration for target 011"},
        {"G3", "M_G 3 G3_step", "Circ(3)", "full Grover-3 circuit for target 011"},
    };
}

// built-in gates plus the shipped Grover-3 gates
inline GateRegistry default_registry() {
    GateRegistry reg = builtin_gates();
    std::istringstream in(grover3_gate_text());
    load_gate_text(reg, in, "<grover3.gates>");
    return reg;
}

}  // namespace qpcf
