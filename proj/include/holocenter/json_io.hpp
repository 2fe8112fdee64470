#pragma once

// Report serialization. All floating-point output is printed with 17
// significant digits (round-trip exact for doubles), and objects preserve
// insertion order, so identical inputs produce byte-identical report files.

#include <iosfwd>
#include <string>

#include <nlohmann/json.hpp>

#include "holocenter/center.hpp"
#include "holocenter/flow.hpp"
#include "holocenter/index.hpp"

namespace holocenter {

using ojson = nlohmann::ordered_json;

// Serialize with %.17g floats, 2-space indentation, "\n"-terminated.
void write_json_17(std::ostream& os, const ojson& j);
std::string dump_json_17(const ojson& j);

ojson json_complex(const cxd& z);
ojson json_cvec(const CVec& v);
CVec cvec_from_json(const nlohmann::json& j, const std::string& where);

ojson to_json(const IntegratorConfig& cfg);
ojson to_json(const IndexConfig& cfg);
ojson to_json(const IndexResult& r);
ojson to_json(const SpectralReport& r);
ojson to_json(const DiskModel& m);
ojson to_json(const PeriodicityReport& r);
ojson to_json(const ScanReport& r);
ojson to_json(const ProbeReport& r);

// Disk model round-trip (the export format is part of the tool's contract).
DiskModel disk_model_from_json(const nlohmann::json& j);

}  // namespace holocenter
