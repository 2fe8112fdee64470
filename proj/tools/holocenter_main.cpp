// holocenter: analyze holomorphic polynomial vector fields near a
// singularity. See README.md for the scenario document format.

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "holocenter/scenario.hpp"

int main(int argc, char** argv) {
    CLI::App app{"holocenter: fixed-point indices and periodic disks of holomorphic systems"};
    app.require_subcommand(1);

    struct CommandDef {
        const char* name;
        const char* help;
        bool needs_scenario;
    };
    const CommandDef defs[] = {
        {"spectrum", "eigenvalues of F'(0) and the resonance conditions", true},
        {"index", "fixed-point index at a point (m = 1, or m-fold with m in parameters)", true},
        {"iterated-index", "fixed-point index of the m-fold composition (m >= 2)", true},
        {"disk", "build the polynomial model of the periodic analytic disk", true},
        {"verify", "build (or load) a disk model and verify period minimality", true},
        {"orbit", "integrate one trajectory and export CSV samples", true},
        {"probe", "search for nonzero fixed points of the time-T map at small scales", true},
        {"scan", "quantitative no-small-period scan on a sphere", true},
        {"selftest", "run the built-in verification suite", false},
    };

    std::string scenario_path;
    std::string out_dir = ".";
    bool strict = false;
    std::optional<std::uint64_t> seed;
    std::uint64_t seed_value = 0;

    for (const CommandDef& def : defs) {
        CLI::App* sub = app.add_subcommand(def.name, def.help);
        auto* opt = sub->add_option("--scenario", scenario_path, "scenario JSON document");
        if (def.needs_scenario) opt->required();
        sub->add_option("--out", out_dir, "output directory (default: .)");
        sub->add_flag("--strict", strict, "nonzero exit on verdict failures");
        sub->add_option("--seed", seed_value, "RNG seed for root searches")
            ->each([&](const std::string&) { seed = seed_value; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return holocenter::kExitInputError;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        holocenter::ScenarioSpec spec = holocenter::load_scenario(
            command, scenario_path, out_dir, strict, seed);
        return holocenter::run_scenario(spec);
    } catch (const holocenter::ParseError& e) {
        std::cerr << "holocenter: input error: " << e.what() << "\n";
        return holocenter::kExitInputError;
    } catch (const holocenter::Error& e) {
        std::cerr << "holocenter: " << e.what() << "\n";
        return holocenter::kExitInputError;
    }
}
