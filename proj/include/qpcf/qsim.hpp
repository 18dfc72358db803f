#pragma once

// The restricted-QRAM co-processor: circuit-to-unitary interpretation,
// state preparation, total von Neumann measurement and per-call circuit
// evaluation. No state survives between calls; every working buffer is
// allocated inside the call.
//
// Wire/bit convention, fixed globally: the topmost wire is wire 0, holds the
// leftmost written bit and the most significant bit of an amplitude index;
// parallel composition puts its left operand on the most significant wires.
// Sequential composition is a left-to-right pipeline: in C0 ; C1 the
// operator of C0 is applied to the state first.

#include <cstdint>
#include <map>
#include <random>

#include <Eigen/Dense>

#include "qpcf/circuit.hpp"
#include "qpcf/gates.hpp"

namespace qpcf {

using CVec = Eigen::VectorXcd;

// dense unitaries are materialized only up to this many wires; beyond it the
// simulator applies gates to the state vector directly
inline constexpr unsigned kDenseWireLimit = 10;
inline constexpr unsigned kDefaultMaxWires = 16;
inline constexpr double kProbFloor = 1e-18;  // measurement entries below are zero

struct SimError : Error {
    using Error::Error;
};

struct StateVector {
    unsigned wires = 0;
    CVec amps;

    double norm_sq() const { return amps.squaredNorm(); }
};

// finite map basis-index -> probability, zero entries omitted
using MeasureDistribution = std::map<std::uint64_t, double>;

namespace detail {

inline CMat kron(const CMat& a, const CMat& b) {
    CMat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

// Applies a 2^m unitary to the contiguous index-bit block [shift, shift+m).
inline void apply_block(const CMat& u, unsigned m, unsigned shift, CVec& v) {
    const std::uint64_t dim = static_cast<std::uint64_t>(v.size());
    const std::uint64_t block = std::uint64_t{1} << m;
    const std::uint64_t stride = std::uint64_t{1} << shift;
    const std::uint64_t hi_count = dim >> (shift + m);
    std::vector<Cx> in(block), out(block);
    for (std::uint64_t hi = 0; hi < hi_count; ++hi) {
        for (std::uint64_t lo = 0; lo < stride; ++lo) {
            const std::uint64_t base = (hi << (shift + m)) | lo;
            for (std::uint64_t g = 0; g < block; ++g) in[g] = v[base + g * stride];
            for (std::uint64_t r = 0; r < block; ++r) {
                Cx acc = 0;
                for (std::uint64_t g = 0; g < block; ++g) acc += u(r, g) * in[g];
                out[r] = acc;
            }
            for (std::uint64_t r = 0; r < block; ++r) v[base + r * stride] = out[r];
        }
    }
}

inline void apply_circuit(const GateRegistry& reg, const CircPtr& c, unsigned offset,
                          unsigned total_wires, CVec& v) {
    std::visit(overloaded{
                   [&](const CGate& g) {
                       const GateDef& def = reg.get(g.name);
                       apply_block(def.matrix, def.wires(), total_wires - offset - def.wires(), v);
                   },
                   [&](const CSeq& s) {
                       apply_circuit(reg, s.first, offset, total_wires, v);
                       apply_circuit(reg, s.second, offset, total_wires, v);
                   },
                   [&](const CPar& p) {
                       apply_circuit(reg, p.top, offset, total_wires, v);
                       apply_circuit(reg, p.bottom, offset + p.top->wires, total_wires, v);
                   },
               },
               c->node);
}

}  // namespace detail

// Dense interpretation of a circuit as a unitary matrix.
inline CMat hilb(const GateRegistry& reg, const CircPtr& c,
                 unsigned dense_limit = kDenseWireLimit) {
    if (c->wires > dense_limit)
        throw SimError("dense unitary construction limited to " + std::to_string(dense_limit) +
                       " wires, circuit has " + std::to_string(c->wires));
    return std::visit(
        overloaded{
            [&](const CGate& g) { return reg.get(g.name).matrix; },
            [&](const CSeq& s) {
                // pipeline order: the operator of the first component acts first
                return CMat(hilb(reg, s.second, dense_limit) * hilb(reg, s.first, dense_limit));
            },
            [&](const CPar& p) {
                return detail::kron(hilb(reg, p.top, dense_limit),
                                    hilb(reg, p.bottom, dense_limit));
            },
        },
        c->node);
}

// Gate-by-gate application to |phi_x>, no matrix materialization.
inline StateVector run_statevector(const GateRegistry& reg, const CircPtr& c, std::uint64_t x) {
    const unsigned w = c->wires;
    if (w >= 64 || x >= (std::uint64_t{1} << w))
        throw SimError("initial state out of range for " + std::to_string(w) + " wires");
    CVec v = CVec::Zero(Eigen::Index(1) << w);
    v[static_cast<Eigen::Index>(x)] = 1;
    detail::apply_circuit(reg, c, 0, w, v);
    return {w, std::move(v)};
}

// circuitEval: runs the circuit on basis state x and measures every wire.
// k is the arity class: the circuit must act on k+1 wires.
inline MeasureDistribution circuit_eval(const GateRegistry& reg, unsigned k, std::uint64_t x,
                                        const CircPtr& c, unsigned max_wires = kDefaultMaxWires) {
    if (c->wires != k + 1)
        throw SimError("circuit has " + std::to_string(c->wires) + " wires, expected " +
                       std::to_string(k + 1));
    if (c->wires > max_wires)
        throw SimError("circuit needs " + std::to_string(c->wires) +
                       " wires, budget is " + std::to_string(max_wires));
    CVec amps;
    if (c->wires <= kDenseWireLimit) {
        CVec basis = CVec::Zero(Eigen::Index(1) << c->wires);
        if (x >= static_cast<std::uint64_t>(basis.size()))
            throw SimError("initial state out of range");
        basis[static_cast<Eigen::Index>(x)] = 1;
        amps = hilb(reg, c) * basis;
    } else {
        amps = run_statevector(reg, c, x).amps;
    }
    MeasureDistribution dist;
    for (Eigen::Index i = 0; i < amps.size(); ++i) {
        double p = std::norm(amps[i]);
        if (p > kProbFloor) dist[static_cast<std::uint64_t>(i)] = p;
    }
    return dist;
}

// Injected random source; never ambient. The uniform draw uses the top 53
// bits of the engine output so results do not depend on the standard
// library's distribution implementation.
struct Rng {
    explicit Rng(std::uint64_t seed) : engine(seed) {}
    std::mt19937_64 engine;

    double uniform() { return static_cast<double>(engine() >> 11) * 0x1.0p-53; }
};

// Draws an index according to the stored probabilities; returns the index
// and its probability for derivation bookkeeping.
inline std::pair<std::uint64_t, double> sample_measure(const MeasureDistribution& d, Rng& rng) {
    if (d.empty()) throw SimError("cannot sample from an empty distribution");
    double u = rng.uniform();
    double acc = 0;
    for (const auto& [index, p] : d) {
        acc += p;
        if (u < acc) return {index, p};
    }
    return {d.rbegin()->first, d.rbegin()->second};  // guard against rounding
}

}  // namespace qpcf
