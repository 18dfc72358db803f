// qpcf: type-check, run, and analyze qPCF programs.

#include <cstdio>
#include <string>

#include "CLI11.hpp"

#include "qpcf/driver.hpp"

int main(int argc, char** argv) {
    CLI::App app{"qPCF: dependently typed quantum circuit description language"};
    app.require_subcommand(1);

    qpcf::RunConfig cfg;
    std::string emit = "text";

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("input", cfg.input_path, "qPCF source file")->required();
        sub->add_option("--seed", cfg.seed, "random seed for measurement sampling");
        sub->add_option("--fuel", cfg.fuel, "evaluation step budget per branch");
        sub->add_option("--depth", cfg.max_branch_depth, "dmeas nesting budget per branch");
        sub->add_option("--mass-eps", cfg.mass_eps, "cut branches below this probability");
        sub->add_option("--gates", cfg.gate_files, "gate definition file (repeatable)");
        sub->add_option("--max-wires", cfg.max_wires, "wire budget for circuit evaluation");
        sub->add_option("--index-fuel", cfg.index_fuel, "beta budget per index comparison");
        sub->add_flag("--json", cfg.json, "machine-readable output");
        sub->add_flag("--no-prelude", cfg.no_prelude, "do not load the shipped prelude");
    };

    CLI::App* check = app.add_subcommand("check", "print the type of the main term");
    CLI::App* run = app.add_subcommand("run", "evaluate one seeded derivation");
    CLI::App* dist = app.add_subcommand("dist", "enumerate the outcome distribution");
    CLI::App* circuit = app.add_subcommand("circuit", "evaluate and print a circuit");
    for (CLI::App* sub : {check, run, dist, circuit}) add_common(sub);
    circuit->add_option("--emit", emit, "output format: text or qasm")
        ->check(CLI::IsMember({"text", "qasm"}));

    CLI11_PARSE(app, argc, argv);

    if (check->parsed()) cfg.mode = qpcf::RunConfig::Mode::Check;
    if (run->parsed()) cfg.mode = qpcf::RunConfig::Mode::Run;
    if (dist->parsed()) cfg.mode = qpcf::RunConfig::Mode::Dist;
    if (circuit->parsed()) cfg.mode = qpcf::RunConfig::Mode::Circuit;
    cfg.emit = emit == "qasm" ? qpcf::RunConfig::Emit::Qasm : qpcf::RunConfig::Emit::Text;

    qpcf::CmdResult result = qpcf::run_file(cfg);
    if (!result.out.empty()) std::fputs(result.out.c_str(), stdout);
    if (!result.err.empty()) std::fputs(result.err.c_str(), stderr);
    return result.exit_code;
}
