#pragma once

// Gate registry: the unitary operators made available by the co-processor.
// Gates of arity class k act on k+1 wires and carry a 2^(k+1) square unitary
// matrix plus the name of their adjoint. The registry is populated at
// startup (built-ins, then optional gate files) and read-only afterwards.

#include <cmath>
#include <complex>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qpcf/ast.hpp"

namespace qpcf {

using Cx = std::complex<double>;
using CMat = Eigen::MatrixXcd;

struct GateError : Error {
    using Error::Error;
};

struct GateDef {
    std::string name;
    unsigned arity = 0;  // acts on arity+1 wires
    CMat matrix;         // dimension 2^(arity+1)
    std::string adjoint;

    unsigned wires() const { return arity + 1; }
    Eigen::Index dim() const { return Eigen::Index(1) << wires(); }
};

inline constexpr double kUnitaryTol = 1e-10;

class GateRegistry {
  public:
    // Validates dimension and unitarity immediately. Adjoint references are
    // resolved by finalize() once the batch (built-ins or one file) is loaded.
    void add(GateDef def) {
        if (gates_.count(def.name)) throw GateError("duplicate gate name '" + def.name + "'");
        if (def.matrix.rows() != def.dim() || def.matrix.cols() != def.dim())
            throw GateError("gate '" + def.name + "': matrix dimension " +
                            std::to_string(def.matrix.rows()) + "x" +
                            std::to_string(def.matrix.cols()) + " does not match arity " +
                            std::to_string(def.arity));
        CMat residue = def.matrix.adjoint() * def.matrix - CMat::Identity(def.dim(), def.dim());
        if (residue.cwiseAbs().maxCoeff() > kUnitaryTol)
            throw GateError("gate '" + def.name + "': matrix is not unitary");
        gates_.emplace(def.name, std::move(def));
    }

    // Checks that the adjoint map is total, arity-preserving, and consistent
    // with conjugate transposition.
    void finalize() const {
        for (const auto& [name, def] : gates_) {
            auto it = gates_.find(def.adjoint);
            if (it == gates_.end())
                throw GateError("gate '" + name + "': adjoint '" + def.adjoint +
                                "' is not registered");
            const GateDef& adj = it->second;
            if (adj.arity != def.arity)
                throw GateError("gate '" + name + "': adjoint '" + def.adjoint +
                                "' has different arity");
            CMat residue = adj.matrix - def.matrix.adjoint();
            if (residue.cwiseAbs().maxCoeff() > kUnitaryTol)
                throw GateError("gate '" + name + "': matrix of adjoint '" + def.adjoint +
                                "' is not the conjugate transpose");
        }
    }

    bool has(const std::string& name) const { return gates_.count(name) != 0; }

    const GateDef& get(const std::string& name) const {
        auto it = gates_.find(name);
        if (it == gates_.end()) throw GateError("gate '" + name + "' is not registered");
        return it->second;
    }

    const std::string& adjoint_of(const std::string& name) const { return get(name).adjoint; }

    const std::map<std::string, GateDef>& all() const { return gates_; }

  private:
    std::map<std::string, GateDef> gates_;
};

// --- built-in gates ---------------------------------------------------------

namespace detail {

inline CMat mat2(Cx a, Cx b, Cx c, Cx d) {
    CMat m(2, 2);
    m << a, b, c, d;
    return m;
}

inline CMat permutation(Eigen::Index dim, std::vector<std::pair<Eigen::Index, Eigen::Index>> swaps) {
    CMat m = CMat::Identity(dim, dim);
    for (auto [i, j] : swaps) {
        m(i, i) = m(j, j) = 0;
        m(i, j) = m(j, i) = 1;
    }
    return m;
}

}  // namespace detail

inline GateRegistry builtin_gates() {
    using detail::mat2;
    using detail::permutation;
    const double s = 1.0 / std::sqrt(2.0);
    const Cx i(0, 1);
    const Cx e4 = std::exp(Cx(0, M_PI / 4));

    GateRegistry reg;
    reg.add({"I", 0, mat2(1, 0, 0, 1), "I"});
    reg.add({"X", 0, mat2(0, 1, 1, 0), "X"});
    reg.add({"Y", 0, mat2(0, -i, i, 0), "Y"});
    reg.add({"Z", 0, mat2(1, 0, 0, -1), "Z"});
    reg.add({"H", 0, mat2(s, s, s, -s), "H"});
    reg.add({"S", 0, mat2(1, 0, 0, i), "Sdg"});
    reg.add({"Sdg", 0, mat2(1, 0, 0, -i), "S"});
    reg.add({"T", 0, mat2(1, 0, 0, e4), "Tdg"});
    reg.add({"Tdg", 0, mat2(1, 0, 0, std::conj(e4)), "T"});
    // two-wire gates; wire 0 of the gate is the topmost / most significant
    reg.add({"CNOT", 1, permutation(4, {{2, 3}}), "CNOT"});
    {
        CMat cz = CMat::Identity(4, 4);
        cz(3, 3) = -1;
        reg.add({"CZ", 1, cz, "CZ"});
    }
    reg.add({"SWAP", 1, permutation(4, {{1, 2}}), "SWAP"});
    reg.add({"CCNOT", 2, permutation(8, {{6, 7}}), "CCNOT"});
    reg.finalize();
    return reg;
}

inline const GateRegistry& builtin_registry() {
    static const GateRegistry reg = builtin_gates();
    return reg;
}

// --- gate-definition files ---------------------------------------------------
//
// Plain text, one gate per block:
//   gate NAME arity K adjoint NAME2
//   row a+bi a+bi ...        (2^(K+1) rows)
// Blank lines between blocks are allowed; '#' starts a comment line.

namespace detail {

inline Cx parse_complex(const std::string& tok, const std::string& ctx) {
    // forms: a, a+bi, a-bi, bi
    std::string s = tok;
    try {
        if (!s.empty() && s.back() == 'i') {
            s.pop_back();
            // split at the last '+' or '-' that is not a leading sign or exponent
            for (std::size_t p = s.size(); p-- > 1;) {
                if ((s[p] == '+' || s[p] == '-') && s[p - 1] != 'e' && s[p - 1] != 'E') {
                    double re = std::stod(s.substr(0, p));
                    std::string imag = s.substr(p);
                    double im = imag == "+" ? 1 : imag == "-" ? -1 : std::stod(imag);
                    return {re, im};
                }
            }
            double im = s.empty() || s == "+" ? 1 : s == "-" ? -1 : std::stod(s);
            return {0, im};
        }
        return {std::stod(s), 0};
    } catch (const std::exception&) {
        throw GateError(ctx + ": malformed complex literal '" + tok + "'");
    }
}

}  // namespace detail

inline void load_gate_text(GateRegistry& reg, std::istream& in, const std::string& origin) {
    std::string line;
    int lineno = 0;
    GateDef current;
    Eigen::Index row = -1;  // -1: outside a block

    auto flush = [&]() {
        if (row < 0) return;
        if (row != current.dim())
            throw GateError(origin + ": gate '" + current.name + "' has " + std::to_string(row) +
                            " rows, expected " + std::to_string(current.dim()));
        reg.add(current);
        row = -1;
    };

    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string word;
        if (!(ls >> word) || word[0] == '#') continue;
        const std::string ctx = origin + ":" + std::to_string(lineno);
        if (word == "gate") {
            flush();
            std::string kw_arity, kw_adj;
            current = GateDef{};
            if (!(ls >> current.name >> kw_arity >> current.arity >> kw_adj >> current.adjoint) ||
                kw_arity != "arity" || kw_adj != "adjoint")
                throw GateError(ctx + ": expected 'gate NAME arity K adjoint NAME2'");
            current.matrix = CMat::Zero(current.dim(), current.dim());
            row = 0;
        } else if (word == "row") {
            if (row < 0) throw GateError(ctx + ": 'row' outside a gate block");
            if (row >= current.dim())
                throw GateError(ctx + ": too many rows for gate '" + current.name + "'");
            std::string tok;
            Eigen::Index col = 0;
            while (ls >> tok) {
                if (col >= current.dim())
                    throw GateError(ctx + ": too many entries in row " + std::to_string(row));
                current.matrix(row, col++) = detail::parse_complex(tok, ctx);
            }
            if (col != current.dim())
                throw GateError(ctx + ": row " + std::to_string(row) + " has " +
                                std::to_string(col) + " entries, expected " +
                                std::to_string(current.dim()));
            ++row;
        } else {
            throw GateError(ctx + ": unexpected '" + word + "'");
        }
    }
    flush();
    reg.finalize();
}

inline void load_gate_file(GateRegistry& reg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw GateError("cannot open gate file '" + path + "'");
    load_gate_text(reg, in, path);
}

}  // namespace qpcf
