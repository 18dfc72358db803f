#pragma once

// Evaluated circuits: strings over gate names, sequential composition and
// parallel composition, with cached wire counts. These are the circuit
// values of the big-step semantics and the input language of the simulator.

#include <memory>
#include <string>
#include <variant>

#include "qpcf/gates.hpp"

namespace qpcf {

struct Circuit;
using CircPtr = std::shared_ptr<const Circuit>;

struct CGate {
    std::string name;
};
struct CSeq {
    CircPtr first;   // applied first
    CircPtr second;  // applied second
};
struct CPar {
    CircPtr top;     // most significant wires
    CircPtr bottom;  // least significant wires
};

struct Circuit {
    std::variant<CGate, CSeq, CPar> node;
    unsigned wires = 0;
};

inline CircPtr c_gate(const GateRegistry& reg, const std::string& name) {
    return std::make_shared<Circuit>(Circuit{CGate{name}, reg.get(name).wires()});
}

inline CircPtr c_seq(CircPtr first, CircPtr second) {
    if (first->wires != second->wires)
        throw Error("sequential composition of circuits with different wire counts (" +
                    std::to_string(first->wires) + " vs " + std::to_string(second->wires) + ")");
    unsigned w = first->wires;
    return std::make_shared<Circuit>(Circuit{CSeq{std::move(first), std::move(second)}, w});
}

inline CircPtr c_par(CircPtr top, CircPtr bottom) {
    unsigned w = top->wires + bottom->wires;
    return std::make_shared<Circuit>(Circuit{CPar{std::move(top), std::move(bottom)}, w});
}

inline bool circuit_eq(const CircPtr& a, const CircPtr& b) {
    if (a->node.index() != b->node.index() || a->wires != b->wires) return false;
    return std::visit(overloaded{
                          [&](const CGate& g) { return g.name == std::get<CGate>(b->node).name; },
                          [&](const CSeq& s) {
                              const CSeq& t = std::get<CSeq>(b->node);
                              return circuit_eq(s.first, t.first) && circuit_eq(s.second, t.second);
                          },
                          [&](const CPar& p) {
                              const CPar& q = std::get<CPar>(b->node);
                              return circuit_eq(p.top, q.top) && circuit_eq(p.bottom, q.bottom);
                          },
                      },
                      a->node);
}

// Circuit reversal: rewire in reverse order, then replace each gate by its
// registry adjoint. Sequential children swap, parallel children do not.
inline CircPtr reverse_circuit(const GateRegistry& reg, const CircPtr& c) {
    return std::visit(
        overloaded{
            [&](const CGate& g) { return c_gate(reg, reg.adjoint_of(g.name)); },
            [&](const CSeq& s) {
                return c_seq(reverse_circuit(reg, s.second), reverse_circuit(reg, s.first));
            },
            [&](const CPar& p) {
                return c_par(reverse_circuit(reg, p.top), reverse_circuit(reg, p.bottom));
            },
        },
        c->node);
}

inline std::size_t circuit_size(const CircPtr& c) {
    return std::visit(overloaded{
                          [](const CGate&) { return std::size_t{1}; },
                          [&](const CSeq& s) {
                              return 1 + circuit_size(s.first) + circuit_size(s.second);
                          },
                          [&](const CPar& p) {
                              return 1 + circuit_size(p.top) + circuit_size(p.bottom);
                          },
                      },
                      c->node);
}

// Rendering: '||' binds loosest, ';' tighter, both right-associative.
namespace detail {

inline void circuit_str(const CircPtr& c, int level, std::string& out) {
    std::visit(overloaded{
                   [&](const CGate& g) { out += g.name; },
                   [&](const CSeq& s) {
                       bool paren = level > 2;
                       if (paren) out += "(";
                       circuit_str(s.first, 3, out);
                       out += " ; ";
                       circuit_str(s.second, 2, out);
                       if (paren) out += ")";
                   },
                   [&](const CPar& p) {
                       bool paren = level > 1;
                       if (paren) out += "(";
                       circuit_str(p.top, 2, out);
                       out += " || ";
                       circuit_str(p.bottom, 1, out);
                       if (paren) out += ")";
                   },
               },
               c->node);
}

}  // namespace detail

inline std::string to_string(const CircPtr& c) {
    std::string out;
    detail::circuit_str(c, 0, out);
    return out;
}

// total order for deterministic distribution output
inline std::string circuit_sort_key(const CircPtr& c) { return to_string(c); }

}  // namespace qpcf
