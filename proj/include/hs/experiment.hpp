#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "hs/evolution.hpp"
#include "hs/gallery.hpp"
#include "hs/report.hpp"

#include "json.hpp"

namespace hs {

inline constexpr const char* kToolVersion = "hslab 1.0";

// One diagnostic to run, with its numeric knobs. Checks with severity
// "assert" gate the experiment exit status; "warn" only records.
struct CheckRequest {
    std::string name;
    std::map<std::string, double> caps;
    std::string severity = "assert";
};

// Serializable experiment description: a scenario preset, the flow knobs it
// reads, and an ordered diagnostics list. Every numeric threshold a check
// uses lives here (or in CheckRequest caps), never hidden in code.
struct ExperimentSpec {
    std::string name = "experiment";
    std::string scenario = "radial";  // radial|flatfront|cone|cusp_e1|gallery_e2|gallery_e3|custom
    std::string scheme = "levelset";  // levelset|obstacle
    int dim = 2;
    int grid_n = 256;
    double box_half = 1.0;
    double t_end = 0.05;
    double dt = 0.0;  // <= 0: auto from the scenario speed guess
    int frames = 8;
    double cfl = 0.45;

    double core_radius = 0.1;
    double core_pressure = 1.0;
    Vec core_center{0, 0, 0};
    double init_radius = 0.15;
    double outer_radius = 0.0;  // 0: no outer shell
    double source_const = 0.0;
    double drift_rotation = 0.0;  // rigid rotation about the origin, lip = value
    double drift_const_x = 0.0;

    double cone_theta = 1.0471975511965976;  // pi/3
    double cone_reach = 0.7;
    double flat_speed = 0.5;
    double flat_front0 = -0.25;

    CuspSpec cusp;
    PotentialBumpSpec bump;

    std::vector<CheckRequest> diagnostics;
    std::string output_dir = "out";
    std::string format = "ascii";  // ascii|binary field dumps
    std::uint64_t seed = 1;

    nlohmann::json to_json() const;  // complete dump, every knob present
    static ExperimentSpec from_json(const nlohmann::json& j);  // unknown keys rejected
};

ExperimentSpec load_spec(const std::string& path);

// Scenario preset with its canonical diagnostics list pre-filled.
ExperimentSpec scenario_preset(const std::string& scenario);

const std::vector<std::string>& known_scenarios();
const std::vector<std::string>& known_checks();

// Empty when the spec is runnable; otherwise one message per problem
// (unknown scenario/check, unresolvable scales, bad grid).
std::vector<std::string> validate_spec(const ExperimentSpec& spec);

// FNV-1a over the canonical spec dump, output_dir excluded (it cannot
// affect results); everything else does.
std::uint64_t spec_hash(const ExperimentSpec& spec);

struct RunManifest {
    int schema_version = kSchemaVersion;
    std::string name;
    std::string spec_hash_hex;
    std::string tool_version = kToolVersion;
    std::vector<std::string> report_paths;  // relative to the experiment dir
    bool complete = false;
    double wall_seconds = 0.0;  // informational only, not hashed

    nlohmann::json to_json() const;
    static RunManifest from_json(const nlohmann::json& j);
};

// Validates, executes the scenario (simulating when any check needs a run),
// runs the diagnostics in declared order, and writes
//   <output_dir>/<name>/{spec_dump.json, reports/NN_<check>.json,
//                        archive/..., fields/..., manifest.json}.
// Returns 0 on success, 1 if an assert-severity check failed, 2 on
// validation errors (nothing is computed; messages via validate_spec).
int run_experiment(const ExperimentSpec& spec, RunManifest* manifest_out = nullptr);

// CSV extracts from a finished experiment directory. Selector entries:
// fronts (polyline per stored time), growth (log-log samples), fits
// (exponent-fit table), ladders (cone-improvement schedule). Empty selector
// is a no-op; a missing artifact throws naming it.
void emit_plotdata(const std::string& experiment_dir, const std::vector<std::string>& selector);

}  // namespace hs
