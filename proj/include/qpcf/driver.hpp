#pragma once

// Batch front end shared by the CLI binary and the test suites: loads gate
// files and the prelude, parses, type-checks and dispatches on the requested
// mode. Exit codes: 0 ok, 1 parse/input, 2 type, 3 divergence or budget
// exhaustion, 4 emission failure.

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "qpcf/eval.hpp"
#include "qpcf/parser.hpp"
#include "qpcf/prelude.hpp"
#include "qpcf/printer.hpp"
#include "qpcf/qasm.hpp"
#include "qpcf/typecheck.hpp"

namespace qpcf {

struct RunConfig {
    enum class Mode { Check, Run, Dist, Circuit };
    enum class Emit { Text, Qasm };

    std::string input_path;
    Mode mode = Mode::Check;
    std::uint64_t seed = 0;
    long long fuel = 1'000'000;
    unsigned max_branch_depth = 64;
    double mass_eps = 1e-12;
    std::vector<std::string> gate_files;
    unsigned max_wires = kDefaultMaxWires;
    Emit emit = Emit::Text;
    bool json = false;
    bool no_prelude = false;
    long long index_fuel = kDefaultIndexFuel;
};

struct CmdResult {
    int exit_code = 0;
    std::string out;
    std::string err;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitParse = 1;
inline constexpr int kExitType = 2;
inline constexpr int kExitDiverge = 3;
inline constexpr int kExitEmit = 4;
inline constexpr int kExitInternal = 70;

// 12 significant digits: enough for every stated tolerance, and dyadic
// masses such as 0.5 render exactly
inline std::string fmt_double(double d) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", d);
    return buf;
}

namespace detail {

struct LoadedProgram {
    GateRegistry registry;
    TermPtr main;
    TypePtr type;
};

inline LoadedProgram load_and_check(const std::string& source, const RunConfig& cfg) {
    LoadedProgram lp{cfg.no_prelude ? builtin_gates() : default_registry(), nullptr, nullptr};
    for (const std::string& path : cfg.gate_files) load_gate_file(lp.registry, path);

    std::vector<Definition> defs;
    if (!cfg.no_prelude) defs = parse_definitions(prelude_source(), lp.registry);
    SourceProgram prog = parse_program(source, lp.registry);
    for (const auto& d : prog.defs) {
        for (const auto& p : defs)
            if (p.name == d.name)
                throw ParseError(d.span.line, d.span.col,
                                 "definition '" + d.name + "' is already defined by the prelude");
        defs.push_back(d);
    }

    TermPtr main = inline_definitions(defs, prog.main);
    Typing typing = elaborate(Base{}, main, lp.registry, CheckConfig{cfg.index_fuel});
    lp.main = typing.elaborated;
    lp.type = typing.type;
    return lp;
}

inline void require_ground(const LoadedProgram& lp) {
    if (!is_ground(lp.type))
        throw TypeError(TypeErrorKind::Mismatch, "(run)", lp.main->span,
                        "main term must have a ground type, found " + pretty(lp.type));
}

inline CmdResult do_check(const LoadedProgram& lp, const RunConfig& cfg) {
    std::string rendered = pretty(fold_closed_indexes(lp.type));
    if (cfg.json) {
        nlohmann::json j{{"type", rendered}};
        return {kExitOk, j.dump() + "\n", ""};
    }
    return {kExitOk, rendered + "\n", ""};
}

inline CmdResult do_run(const LoadedProgram& lp, const RunConfig& cfg) {
    require_ground(lp);
    Rng rng(cfg.seed);
    auto outcome = eval_sample(lp.main, rng, lp.registry, EvalConfig{cfg.fuel, cfg.max_wires});
    if (!outcome)
        return {kExitDiverge, "",
                "evaluation diverged (no derivation within " + std::to_string(cfg.fuel) +
                    " steps)\n"};
    if (cfg.json) {
        nlohmann::json j{{"value", to_string(outcome->value)},
                         {"probability", outcome->probability}};
        return {kExitOk, j.dump() + "\n", ""};
    }
    return {kExitOk, to_string(outcome->value) + " (p=" + fmt_double(outcome->probability) + ")\n",
            ""};
}

inline CmdResult do_dist(const LoadedProgram& lp, const RunConfig& cfg) {
    require_ground(lp);
    Distribution dist = eval_dist(
        lp.main, lp.registry,
        DistConfig{cfg.fuel, cfg.max_wires, cfg.max_branch_depth, cfg.mass_eps});
    if (cfg.json) {
        nlohmann::json outcomes = nlohmann::json::array();
        for (const auto& [value, mass] : dist.outcomes)
            outcomes.push_back({{"value", to_string(value)}, {"mass", mass}});
        nlohmann::json j{{"outcomes", outcomes}, {"residual", dist.residual}};
        return {kExitOk, j.dump() + "\n", ""};
    }
    std::string out;
    for (const auto& [value, mass] : dist.outcomes)
        out += to_string(value) + ": " + fmt_double(mass) + "\n";
    out += "residual: " + fmt_double(dist.residual) + "\n";
    return {kExitOk, out, ""};
}

inline CmdResult do_circuit(const LoadedProgram& lp, const RunConfig& cfg) {
    if (!as_circ(lp.type))
        throw TypeError(TypeErrorKind::Mismatch, "(circuit)", lp.main->span,
                        "circuit mode needs a term of type Circ(E), found " + pretty(lp.type));
    Rng rng(cfg.seed);
    auto outcome = eval_sample(lp.main, rng, lp.registry, EvalConfig{cfg.fuel, cfg.max_wires});
    if (!outcome)
        return {kExitDiverge, "",
                "evaluation diverged (no derivation within " + std::to_string(cfg.fuel) +
                    " steps)\n"};
    const CircPtr& circ = outcome->value.circ();
    std::string rendered = cfg.emit == RunConfig::Emit::Qasm ? emit_qasm(circ, lp.registry)
                                                             : to_string(circ) + "\n";
    if (cfg.json) {
        nlohmann::json j{{"circuit", rendered}, {"probability", outcome->probability}};
        return {kExitOk, j.dump() + "\n", ""};
    }
    return {kExitOk, rendered, ""};
}

}  // namespace detail

inline CmdResult run_source(const std::string& source, const RunConfig& cfg) {
    try {
        detail::LoadedProgram lp = detail::load_and_check(source, cfg);
        switch (cfg.mode) {
            case RunConfig::Mode::Check: return detail::do_check(lp, cfg);
            case RunConfig::Mode::Run: return detail::do_run(lp, cfg);
            case RunConfig::Mode::Dist: return detail::do_dist(lp, cfg);
            case RunConfig::Mode::Circuit: return detail::do_circuit(lp, cfg);
        }
        return {kExitInternal, "", "unknown mode\n"};
    } catch (const ParseError& e) {
        return {kExitParse, "", std::string("parse error: ") + e.what() + "\n"};
    } catch (const TypeError& e) {
        return {kExitType, "", std::string("type error: ") + e.what() + "\n"};
    } catch (const QasmError& e) {
        return {kExitEmit, "", std::string("emission error: ") + e.what() + "\n"};
    } catch (const GateError& e) {
        return {kExitParse, "", std::string("gate file error: ") + e.what() + "\n"};
    } catch (const SimError& e) {
        return {kExitDiverge, "", std::string("simulation budget error: ") + e.what() + "\n"};
    } catch (const EvalError& e) {
        return {kExitDiverge, "", std::string("evaluation error: ") + e.what() + "\n"};
    } catch (const InternalError& e) {
        return {kExitInternal, "", std::string("internal error: ") + e.what() + "\n"};
    } catch (const Error& e) {
        return {kExitInternal, "", std::string("internal error: ") + e.what() + "\n"};
    }
}

inline CmdResult run_file(const RunConfig& cfg) {
    std::ifstream in(cfg.input_path);
    if (!in) return {kExitParse, "", "cannot open input file '" + cfg.input_path + "'\n"};
    std::ostringstream buf;
    buf << in.rdbuf();
    return run_source(buf.str(), cfg);
}

}  // namespace qpcf
