#pragma once

// OpenQASM 2.0 emission for evaluated circuits. Gates are mapped by a fixed
// table; the identity contributes no instruction. Wire 0 (topmost) maps to
// q[0]. Circuits are emitted in temporal order: for C0 ; C1 the instructions
// of C0 come first.

#include <map>
#include <string>

#include "qpcf/circuit.hpp"

namespace qpcf {

struct QasmError : Error {
    using Error::Error;
};

namespace detail {

inline const std::map<std::string, std::string>& qasm_table() {
    static const std::map<std::string, std::string> table = {
        {"H", "h"},   {"X", "x"},     {"Y", "y"},       {"Z", "z"},
        {"S", "s"},   {"Sdg", "sdg"}, {"T", "t"},       {"Tdg", "tdg"},
        {"CNOT", "cx"}, {"CZ", "cz"},  {"SWAP", "swap"}, {"CCNOT", "ccx"},
    };
    return table;
}

inline void emit_qasm_rec(const CircPtr& c, const GateRegistry& reg, unsigned offset,
                          std::string& out) {
    std::visit(overloaded{
                   [&](const CGate& g) {
                       if (g.name == "I") return;  // no-op
                       auto it = qasm_table().find(g.name);
                       if (it == qasm_table().end())
                           throw QasmError("gate '" + g.name + "' has no OpenQASM mapping");
                       out += it->second;
                       const unsigned wires = reg.get(g.name).wires();
                       for (unsigned i = 0; i < wires; ++i)
                           out += (i ? "," : " ") + std::string("q[") +
                                  std::to_string(offset + i) + "]";
                       out += ";\n";
                   },
                   [&](const CSeq& s) {
                       emit_qasm_rec(s.first, reg, offset, out);
                       emit_qasm_rec(s.second, reg, offset, out);
                   },
                   [&](const CPar& p) {
                       emit_qasm_rec(p.top, reg, offset, out);
                       emit_qasm_rec(p.bottom, reg, offset + p.top->wires, out);
                   },
               },
               c->node);
}

}  // namespace detail

inline std::string emit_qasm(const CircPtr& c, const GateRegistry& reg) {
    std::string out = "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[" +
                      std::to_string(c->wires) + "];\n";
    detail::emit_qasm_rec(c, reg, 0, out);
    return out;
}

}  // namespace qpcf
