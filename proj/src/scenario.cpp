#include "holocenter/scenario.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include "holocenter/acceptance.hpp"
#include "holocenter/center.hpp"
#include "holocenter/json_io.hpp"

namespace holocenter {

namespace {

constexpr const char* kVersion = "0.1.0";

const std::vector<std::string> kCommands = {"spectrum", "index", "iterated-index",
                                            "disk",     "verify", "orbit",
                                            "probe",    "scan",   "selftest"};

bool known_command(const std::string& cmd) {
    for (const auto& c : kCommands)
        if (c == cmd) return true;
    return false;
}

double get_number(const nlohmann::json& params, const std::string& key, double fallback) {
    if (!params.contains(key)) return fallback;
    if (!params[key].is_number()) throw ParseError("parameters." + key, "must be a number");
    return params[key].get<double>();
}

double require_number(const nlohmann::json& params, const std::string& key) {
    if (!params.contains(key) || !params[key].is_number())
        throw ParseError("parameters." + key, "required number missing");
    return params[key].get<double>();
}

long get_integer(const nlohmann::json& params, const std::string& key, long fallback) {
    if (!params.contains(key)) return fallback;
    if (!params[key].is_number_integer())
        throw ParseError("parameters." + key, "must be an integer");
    return params[key].get<long>();
}

IntegratorConfig integrator_from(const nlohmann::json& params) {
    IntegratorConfig cfg;
    if (!params.contains("integrator")) return cfg;
    const auto& j = params["integrator"];
    if (!j.is_object()) throw ParseError("parameters.integrator", "must be an object");
    cfg.rel_tol = get_number(j, "rel_tol", cfg.rel_tol);
    cfg.abs_tol = get_number(j, "abs_tol", cfg.abs_tol);
    cfg.max_step = get_number(j, "max_step", cfg.max_step);
    cfg.max_steps = get_integer(j, "max_steps", cfg.max_steps);
    cfg.escape_radius = get_number(j, "escape_radius", cfg.escape_radius);
    cfg.validate();
    return cfg;
}

IndexConfig index_from(const nlohmann::json& params, std::optional<std::uint64_t> seed) {
    IndexConfig cfg;
    if (params.contains("index")) {
        const auto& j = params["index"];
        if (!j.is_object()) throw ParseError("parameters.index", "must be an object");
        cfg.q_radius_factor = get_number(j, "q_radius_factor", cfg.q_radius_factor);
        cfg.newton_tol = get_number(j, "newton_tol", cfg.newton_tol);
        cfg.starts_per_dim = static_cast<int>(get_integer(j, "starts_per_dim", cfg.starts_per_dim));
        cfg.retries = static_cast<int>(get_integer(j, "retries", cfg.retries));
        cfg.separation_tol = get_number(j, "separation_tol", cfg.separation_tol);
        cfg.max_newton_iters =
            static_cast<int>(get_integer(j, "max_newton_iters", cfg.max_newton_iters));
        cfg.max_total_starts = get_integer(j, "max_total_starts", cfg.max_total_starts);
    }
    if (seed) cfg.seed = *seed;
    cfg.validate();
    return cfg;
}

BallRegion region_from(const nlohmann::json& params, int n) {
    BallRegion region;
    region.radius = require_number(params, "radius");
    if (!(region.radius > 0.0)) throw ParseError("parameters.radius", "must be positive");
    region.center = params.contains("center")
                        ? cvec_from_json(params["center"], "parameters.center")
                        : CVec(CVec::Zero(n));
    if (region.center.size() != n)
        throw ParseError("parameters.center", "length must equal the field dimension");
    return region;
}

struct CommandOutput {
    ojson report;
    bool verdict_ok = true;
};

CommandOutput cmd_spectrum(const ScenarioSpec& spec, const PolynomialMap& field) {
    const double tol_imag = get_number(spec.parameters, "tol_imag", 1e-9);
    const int k_max = static_cast<int>(get_integer(spec.parameters, "k_max", 0));
    const SpectralReport rep = analyze_spectrum(field, tol_imag, k_max);
    CommandOutput out;
    out.report = to_json(rep);
    return out;
}

CommandOutput cmd_index(const ScenarioSpec& spec, const PolynomialMap& field, bool iterated) {
    const int m = static_cast<int>(get_integer(spec.parameters, "m", 1));
    if (m < 1) throw ParseError("parameters.m", "must be >= 1");
    if (iterated && m < 2) throw ParseError("parameters.m", "iterated-index needs m >= 2");
    const BallRegion region = region_from(spec.parameters, field.dim());
    const IndexConfig cfg = index_from(spec.parameters, spec.seed);

    const IndexResult r = iterated_index(field, m, region.center, region, cfg);
    CommandOutput out;
    out.report = to_json(r);
    out.report["m"] = m;
    out.verdict_ok = !r.undetermined();
    return out;
}

CommandOutput cmd_disk(const ScenarioSpec& spec, const PolynomialMap& field,
                       const IntegratorConfig& icfg, const IndexConfig& cfg,
                       DiskModel* model_out) {
    const double tol_imag = get_number(spec.parameters, "tol_imag", 1e-9);
    const double delta = get_number(spec.parameters, "delta", 0.05);
    const int degree = static_cast<int>(get_integer(spec.parameters, "degree", 6));
    const SpectralReport rep = analyze_spectrum(field, tol_imag);
    const DiskModel disk = build_disk(field, rep, delta, degree, icfg, cfg);
    if (model_out) *model_out = disk;
    CommandOutput out;
    out.report = to_json(disk);
    out.report["spectrum"] = to_json(rep);
    return out;
}

CommandOutput cmd_verify(const ScenarioSpec& spec, const PolynomialMap& field,
                         const IntegratorConfig& icfg, const IndexConfig& cfg) {
    DiskModel disk;
    ojson disk_json;
    if (spec.parameters.contains("disk")) {
        disk = disk_model_from_json(spec.parameters["disk"]);
        disk_json = to_json(disk);
    } else {
        CommandOutput built = cmd_disk(spec, field, icfg, cfg, &disk);
        disk_json = built.report;
    }
    const double t0 = get_number(spec.parameters, "T0", 0.3 * disk.period);
    const PeriodicityReport rep = verify_disk(field, disk, t0, icfg);
    CommandOutput out;
    out.report["disk"] = disk_json;
    out.report["periodicity"] = to_json(rep);
    out.verdict_ok = rep.pass;
    return out;
}

CommandOutput cmd_orbit(const ScenarioSpec& spec, const PolynomialMap& field,
                        const IntegratorConfig& icfg) {
    if (!spec.parameters.contains("x0"))
        throw ParseError("parameters.x0", "required initial state missing");
    const CVec x0 = cvec_from_json(spec.parameters["x0"], "parameters.x0");
    if (x0.size() != field.dim())
        throw ParseError("parameters.x0", "length must equal the field dimension");
    const double t_end = require_number(spec.parameters, "t_end");
    const int samples = static_cast<int>(get_integer(spec.parameters, "samples", 100));

    const Trajectory tr = integrate_trajectory(field, x0, t_end, samples, icfg);

    std::filesystem::create_directories(spec.output_dir);
    std::ofstream csv(spec.output_dir / "trajectory.csv");
    write_trajectory_csv(csv, tr);

    CommandOutput out;
    out.report["t_end"] = t_end;
    out.report["samples"] = samples;
    out.report["x0"] = json_cvec(x0);
    out.report["final_state"] = json_cvec(tr.states.back());
    out.report["return_error"] = (tr.states.back() - tr.states.front()).norm();
    out.report["csv"] = "trajectory.csv";
    return out;
}

CommandOutput cmd_probe(const ScenarioSpec& spec, const PolynomialMap& field,
                        const IntegratorConfig& icfg, const IndexConfig& cfg) {
    std::vector<double> scales = {1e-1, 1e-2, 1e-3, 1e-4};
    if (spec.parameters.contains("scales")) {
        if (!spec.parameters["scales"].is_array())
            throw ParseError("parameters.scales", "must be an array of numbers");
        scales.clear();
        for (const auto& s : spec.parameters["scales"]) {
            if (!s.is_number()) throw ParseError("parameters.scales", "entries must be numbers");
            scales.push_back(s.get<double>());
        }
    }
    double omega;
    if (spec.parameters.contains("omega")) {
        omega = require_number(spec.parameters, "omega");
    } else {
        const SpectralReport rep = analyze_spectrum(field);
        omega = rep.omega.value_or(1.0);
    }
    const ProbeReport rep = accumulation_probe(field, omega, scales, icfg, cfg);
    CommandOutput out;
    out.report = to_json(rep);
    return out;
}

CommandOutput cmd_scan(const ScenarioSpec& spec, const PolynomialMap& field,
                       const IntegratorConfig& icfg) {
    const double rho = require_number(spec.parameters, "rho");
    const double t0 = require_number(spec.parameters, "T0");
    const int samples = static_cast<int>(get_integer(spec.parameters, "samples", 64));
    const ScanReport rep = min_period_scan(field, rho, t0, samples, icfg);
    CommandOutput out;
    out.report = to_json(rep);
    out.verdict_ok = rep.pass;
    return out;
}

CommandOutput cmd_selftest(std::ostream& os) {
    const auto results = acceptance::run_all(os);
    CommandOutput out;
    ojson arr = ojson::array();
    for (const auto& r : results) {
        ojson e;
        e["name"] = r.name;
        e["pass"] = r.pass;
        e["detail"] = r.detail;
        arr.push_back(e);
    }
    out.report["criteria"] = arr;
    out.report["failures"] = acceptance::failures(results);
    out.verdict_ok = acceptance::failures(results) == 0;
    return out;
}

void write_report_files(const ScenarioSpec& spec, const ojson& report) {
    std::filesystem::create_directories(spec.output_dir);
    {
        std::ofstream os(spec.output_dir / "report.json");
        if (!os) throw Error("cannot write report.json");
        write_json_17(os, report);
    }
    {
        ojson meta;
        const auto now = std::chrono::system_clock::now();
        const std::time_t t = std::chrono::system_clock::to_time_t(now);
        char buf[32];
        std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
        meta["timestamp"] = buf;
        meta["tool"] = std::string("holocenter ") + kVersion;
        meta["command"] = spec.command;
        std::ofstream os(spec.output_dir / "meta.json");
        write_json_17(os, meta);
    }
}

}  // namespace

ScenarioSpec load_scenario(const std::string& command, const std::filesystem::path& path,
                           const std::filesystem::path& out_dir, bool strict,
                           std::optional<std::uint64_t> seed) {
    ScenarioSpec spec;
    spec.command = command;
    spec.output_dir = out_dir;
    spec.strict = strict;
    spec.seed = seed;
    spec.parameters = nlohmann::json::object();

    if (command == "selftest" && path.empty()) return spec;

    std::ifstream is(path);
    if (!is) throw ParseError(path.string(), "cannot open scenario file");
    std::stringstream buffer;
    buffer << is.rdbuf();

    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(buffer.str());
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(path.string(), e.what());
    }
    if (!doc.is_object()) throw ParseError(path.string(), "scenario must be a JSON object");

    if (doc.contains("command")) {
        if (!doc["command"].is_string()) throw ParseError("command", "must be a string");
        const std::string embedded = doc["command"].get<std::string>();
        if (!known_command(embedded)) throw ParseError("command", "unknown command " + embedded);
        if (embedded != command)
            throw ParseError("command",
                             "scenario names '" + embedded + "' but CLI asked for '" + command +
                                 "'");
    }
    if (doc.contains("parameters")) {
        if (!doc["parameters"].is_object())
            throw ParseError("parameters", "must be an object");
        spec.parameters = doc["parameters"];
    }
    if (doc.contains("field")) {
        spec.field = parse_field(doc["field"].dump());
    } else if (command != "selftest") {
        throw ParseError("field", "scenario must contain a field document");
    }
    return spec;
}

int run_scenario(const ScenarioSpec& spec) {
    if (!known_command(spec.command)) {
        std::cerr << "holocenter: unknown command '" << spec.command << "'\n";
        return kExitInputError;
    }
    try {
        CommandOutput out;
        if (spec.command == "selftest") {
            out = cmd_selftest(std::cout);
        } else {
            if (!spec.field) throw ParseError("field", "scenario must contain a field document");
            const PolynomialMap& field = *spec.field;
            const IntegratorConfig icfg = integrator_from(spec.parameters);
            const IndexConfig cfg = index_from(spec.parameters, spec.seed);

            if (spec.command == "spectrum")
                out = cmd_spectrum(spec, field);
            else if (spec.command == "index")
                out = cmd_index(spec, field, false);
            else if (spec.command == "iterated-index")
                out = cmd_index(spec, field, true);
            else if (spec.command == "disk")
                out = cmd_disk(spec, field, icfg, cfg, nullptr);
            else if (spec.command == "verify")
                out = cmd_verify(spec, field, icfg, cfg);
            else if (spec.command == "orbit")
                out = cmd_orbit(spec, field, icfg);
            else if (spec.command == "probe")
                out = cmd_probe(spec, field, icfg, cfg);
            else if (spec.command == "scan")
                out = cmd_scan(spec, field, icfg);

            // Reproducibility: every report carries the materialized configuration.
            ojson config;
            config["command"] = spec.command;
            config["strict"] = spec.strict;
            config["integrator"] = to_json(icfg);
            config["index"] = to_json(cfg);
            config["parameters"] = ojson(spec.parameters);
            if (!field.name().empty()) config["field_name"] = field.name();
            out.report["config"] = config;
        }

        write_report_files(spec, out.report);
        if (spec.command == "selftest") return out.verdict_ok ? kExitOk : kExitAnalysisFailure;
        if (spec.strict && !out.verdict_ok) return kExitAnalysisFailure;
        return kExitOk;
    } catch (const ParseError& e) {
        std::cerr << "holocenter: input error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const InvalidInput& e) {
        std::cerr << "holocenter: input error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const Error& e) {
        std::cerr << "holocenter: analysis failed: " << e.what() << "\n";
        return kExitAnalysisFailure;
    }
}

}  // namespace holocenter
