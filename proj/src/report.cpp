#include "hs/report.hpp"

#include <fstream>
#include <stdexcept>
#include <vector>

namespace hs {

nlohmann::json DiagnosticsReport::to_json() const {
    nlohmann::json j;
    j["schema_version"] = kSchemaVersion;
    j["name"] = name;
    j["pass"] = pass;
    j["measured"] = measured;
    j["witness"] = {
        {"point", {witness_point[0], witness_point[1], witness_point[2]}},
        {"values", witness_values},
    };
    j["config"] = config;
    if (!note.empty()) j["note"] = note;
    j["provenance"] = {{"run_id", run_id}, {"frame", frame}};
    return j;
}

nlohmann::json report_bundle(const std::string& run_id,
                             const std::vector<DiagnosticsReport>& reports) {
    nlohmann::json j;
    j["schema_version"] = kSchemaVersion;
    j["run_id"] = run_id;
    j["reports"] = nlohmann::json::array();
    for (const auto& r : reports) j["reports"].push_back(r.to_json());
    return j;
}

void write_json_file(const nlohmann::json& j, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_json_file: cannot open " + path);
    out << j.dump(2) << "\n";
}

}  // namespace hs
