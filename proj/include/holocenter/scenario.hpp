#pragma once

// Scenario execution: parse a scenario document, dispatch the requested
// analysis, and persist deterministic JSON reports (plus CSV trajectories).
// Timestamps and other run metadata go to a sidecar meta.json so the report
// itself is byte-identical across runs.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "holocenter/field.hpp"

namespace holocenter {

struct ScenarioSpec {
    std::string command;
    std::optional<PolynomialMap> field;  // absent only for selftest
    nlohmann::json parameters;           // command-specific options
    std::filesystem::path output_dir;
    bool strict = false;
    std::optional<std::uint64_t> seed;
};

// Exit statuses of run_scenario (and the CLI).
inline constexpr int kExitOk = 0;
inline constexpr int kExitAnalysisFailure = 1;
inline constexpr int kExitInputError = 2;

// Loads "field" and "parameters" from the scenario file. The command comes
// from the CLI; if the document also names one, they must agree.
ScenarioSpec load_scenario(const std::string& command, const std::filesystem::path& path,
                           const std::filesystem::path& out_dir, bool strict,
                           std::optional<std::uint64_t> seed);

// Runs the scenario, writes <out>/report.json (+ meta.json, CSVs) and returns
// the exit status. Input problems return kExitInputError; integrator or
// verdict failures return kExitAnalysisFailure. Error text goes to stderr.
int run_scenario(const ScenarioSpec& spec);

}  // namespace holocenter
