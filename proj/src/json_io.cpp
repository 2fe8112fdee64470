#include "holocenter/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

namespace holocenter {

namespace {

void dump_value(std::ostream& os, const ojson& j, int depth) {
    const std::string pad(static_cast<size_t>(depth) * 2, ' ');
    const std::string pad_in(static_cast<size_t>(depth + 1) * 2, ' ');
    switch (j.type()) {
        case nlohmann::json::value_t::object: {
            if (j.empty()) {
                os << "{}";
                return;
            }
            os << "{\n";
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) os << ",\n";
                first = false;
                os << pad_in << nlohmann::json(it.key()).dump() << ": ";
                dump_value(os, it.value(), depth + 1);
            }
            os << "\n" << pad << "}";
            return;
        }
        case nlohmann::json::value_t::array: {
            if (j.empty()) {
                os << "[]";
                return;
            }
            os << "[\n";
            bool first = true;
            for (const auto& el : j) {
                if (!first) os << ",\n";
                first = false;
                os << pad_in;
                dump_value(os, el, depth + 1);
            }
            os << "\n" << pad << "]";
            return;
        }
        case nlohmann::json::value_t::number_float: {
            const double v = j.get<double>();
            if (!std::isfinite(v)) {
                os << "null";
                return;
            }
            char buf[64];
            std::snprintf(buf, sizeof(buf), "%.17g", v);
            os << buf;
            return;
        }
        default:
            os << j.dump();
            return;
    }
}

}  // namespace

void write_json_17(std::ostream& os, const ojson& j) {
    dump_value(os, j, 0);
    os << "\n";
}

std::string dump_json_17(const ojson& j) {
    std::ostringstream os;
    write_json_17(os, j);
    return os.str();
}

ojson json_complex(const cxd& z) {
    ojson o;
    o["re"] = z.real();
    o["im"] = z.imag();
    return o;
}

ojson json_cvec(const CVec& v) {
    ojson arr = ojson::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(json_complex(v(i)));
    return arr;
}

CVec cvec_from_json(const nlohmann::json& j, const std::string& where) {
    if (!j.is_array() || j.empty()) throw ParseError(where, "expected a non-empty array");
    CVec v(static_cast<int>(j.size()));
    for (size_t i = 0; i < j.size(); ++i) {
        const auto& el = j[i];
        if (!el.is_object() || !el.contains("re") || !el.contains("im") ||
            !el["re"].is_number() || !el["im"].is_number())
            throw ParseError(where, "entries must be {\"re\":..., \"im\":...}");
        v(static_cast<int>(i)) = cxd(el["re"].get<double>(), el["im"].get<double>());
    }
    return v;
}

ojson to_json(const IntegratorConfig& cfg) {
    ojson o;
    o["rel_tol"] = cfg.rel_tol;
    o["abs_tol"] = cfg.abs_tol;
    o["max_step"] = cfg.max_step;
    o["max_steps"] = cfg.max_steps;
    o["escape_radius"] = cfg.escape_radius;
    return o;
}

ojson to_json(const IndexConfig& cfg) {
    ojson o;
    o["q_radius_factor"] = cfg.q_radius_factor;
    o["newton_tol"] = cfg.newton_tol;
    o["starts_per_dim"] = cfg.starts_per_dim;
    o["retries"] = cfg.retries;
    o["separation_tol"] = cfg.separation_tol;
    o["max_newton_iters"] = cfg.max_newton_iters;
    o["max_total_starts"] = cfg.max_total_starts;
    o["seed"] = cfg.seed;
    o["threads"] = resolve_threads(cfg);
    return o;
}

ojson to_json(const IndexResult& r) {
    ojson o;
    if (r.value)
        o["value"] = *r.value;
    else
        o["value"] = "undetermined";
    o["q"] = json_cvec(r.q_used);
    ojson roots = ojson::array();
    for (const CVec& root : r.roots) roots.push_back(json_cvec(root));
    o["roots"] = roots;
    ojson d;
    d["newton_residuals"] = r.diagnostics.newton_residuals;
    d["min_separation"] = r.diagnostics.min_separation;
    d["run_counts"] = r.diagnostics.run_counts;
    d["agreement"] = r.diagnostics.agreement;
    d["boundary_min"] = r.diagnostics.boundary_min;
    o["diagnostics"] = d;
    return o;
}

ojson to_json(const SpectralReport& r) {
    ojson o;
    ojson eig = ojson::array();
    for (const cxd& v : r.eigenvalues.values) eig.push_back(json_complex(v));
    o["eigenvalues"] = eig;
    if (r.omega)
        o["omega"] = *r.omega;
    else
        o["omega"] = nullptr;
    ojson ratios = ojson::array();
    for (const cxd& v : r.ratios) ratios.push_back(json_complex(v));
    o["ratios"] = ratios;
    o["thm11_necessary"] = r.thm11_necessary;
    o["thm12_ok"] = r.thm12_ok;
    o["thm13_ok"] = r.thm13_ok;
    ojson off = ojson::array();
    for (const auto& v : r.offending) {
        ojson e;
        e["eigenvalue"] = json_complex(v.eigenvalue);
        e["nearest_integer"] = v.nearest_integer;
        off.push_back(e);
    }
    o["offending"] = off;
    o["tol_imag"] = r.tol_imag;
    o["k_max"] = r.k_max;
    return o;
}

ojson to_json(const DiskModel& m) {
    ojson o;
    o["omega"] = m.omega;
    o["period"] = m.period;
    o["delta"] = m.delta;
    o["degree"] = m.degree;
    ojson coeffs = ojson::array();
    for (size_t l = 0; l < m.coeffs.size(); ++l) {
        for (size_t k = 0; k < m.coeffs[l].size(); ++k) {
            ojson c;
            c["l"] = static_cast<int>(l) + 2;
            c["k"] = static_cast<int>(k) + 1;
            c["re"] = m.coeffs[l][k].real();
            c["im"] = m.coeffs[l][k].imag();
            coeffs.push_back(c);
        }
    }
    o["coeffs"] = coeffs;
    o["residual_max"] = m.residual_max;
    return o;
}

DiskModel disk_model_from_json(const nlohmann::json& j) {
    DiskModel m;
    for (const char* key : {"omega", "period", "delta", "degree", "coeffs", "residual_max"})
        if (!j.contains(key)) throw ParseError("disk model", std::string("missing ") + key);
    m.omega = j["omega"].get<double>();
    m.period = j["period"].get<double>();
    m.delta = j["delta"].get<double>();
    m.degree = j["degree"].get<int>();
    m.residual_max = j["residual_max"].get<double>();
    int max_l = 1;
    for (const auto& c : j["coeffs"]) max_l = std::max(max_l, c["l"].get<int>());
    m.coeffs.assign(static_cast<size_t>(std::max(max_l - 1, 0)),
                    std::vector<cxd>(static_cast<size_t>(m.degree), cxd(0.0, 0.0)));
    for (const auto& c : j["coeffs"]) {
        const int l = c["l"].get<int>(), k = c["k"].get<int>();
        if (l < 2 || k < 1 || k > m.degree) throw ParseError("disk model", "bad (l,k) pair");
        m.coeffs[static_cast<size_t>(l - 2)][static_cast<size_t>(k - 1)] =
            cxd(c["re"].get<double>(), c["im"].get<double>());
    }
    return m;
}

ojson to_json(const PeriodicityReport& r) {
    ojson o;
    o["omega"] = r.omega;
    o["period"] = r.period;
    o["T0"] = r.t0;
    o["mstar"] = r.mstar;
    ojson samples = ojson::array();
    for (const CVec& s : r.samples) samples.push_back(json_cvec(s));
    o["samples"] = samples;
    o["max_return_error"] = r.max_return_error;
    ojson mins = ojson::array();
    for (size_t i = 0; i < r.minimality.size(); ++i) {
        ojson e;
        e["k"] = static_cast<int>(i) + 2;
        e["min_return_error"] = r.minimality[i];
        mins.push_back(e);
    }
    o["minimality"] = mins;
    o["pass_tol"] = kDiskPassTol;
    o["fail_floor"] = kDiskFailFloor;
    o["pass"] = r.pass;
    return o;
}

ojson to_json(const ScanReport& r) {
    ojson o;
    o["rho"] = r.rho;
    o["T0"] = r.t0;
    o["boundary_min_F"] = r.boundary_min_f;
    o["threshold"] = r.threshold;
    ojson grid = ojson::array();
    for (const auto& g : r.grid) {
        ojson e;
        e["T"] = g.t;
        e["ratio"] = g.ratio;
        grid.push_back(e);
    }
    o["grid"] = grid;
    o["min_ratio"] = r.min_ratio;
    o["pass"] = r.pass;
    return o;
}

ojson to_json(const ProbeReport& r) {
    ojson o;
    o["omega"] = r.omega;
    o["period"] = r.period;
    ojson scales = ojson::array();
    for (const ProbeScale& s : r.scales) {
        ojson e;
        e["scale"] = s.scale;
        e["found"] = s.found;
        if (s.witness) {
            e["witness"] = json_cvec(*s.witness);
            e["witness_norm"] = s.witness_norm;
            e["witness_residual"] = s.witness_residual;
        } else {
            e["witness"] = nullptr;
        }
        scales.push_back(e);
    }
    o["scales"] = scales;
    o["found_at_every_scale"] = r.found_at_every_scale();
    o["found_at_no_scale"] = r.found_at_no_scale();
    return o;
}

}  // namespace holocenter
