#pragma once

#include <map>
#include <string>
#include <vector>

#include "hs/vec.hpp"

#include "json.hpp"

namespace hs {

inline constexpr int kSchemaVersion = 1;

// Uniform result record for every checker: verdict, measured numbers, the
// worst witness location, and the configuration that produced it.
struct DiagnosticsReport {
    std::string name;
    bool pass = false;
    std::map<std::string, double> measured;
    Vec witness_point{0, 0, 0};
    std::map<std::string, double> witness_values;
    std::map<std::string, double> config;
    std::string note;
    std::string run_id;   // provenance
    int frame = -1;       // provenance; -1 = static field

    void set_witness(const Vec& p) { witness_point = p; }
    nlohmann::json to_json() const;
};

nlohmann::json report_bundle(const std::string& run_id,
                             const std::vector<DiagnosticsReport>& reports);

void write_json_file(const nlohmann::json& j, const std::string& path);

}  // namespace hs
