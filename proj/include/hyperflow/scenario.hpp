#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hyperflow/config.hpp"

namespace hyperflow {

enum ExitCode : int {
    kExitPass = 0,
    kExitConfigError = 1,
    kExitNumericalFailure = 2,
    kExitPropertyFailure = 3,
};

// One checked statement "value relation threshold". Properties with
// criterion > 0 belong to that acceptance criterion; asserted == false marks
// a recorded diagnostic that never fails the run.
struct Property {
    std::string name;
    int criterion = 0;
    bool asserted = true;
    bool pass = true;
    double value = 0.0;
    std::string relation;  // "<=", "<", ">=", ">"
    double threshold = 0.0;
    std::string detail;
};

struct ScenarioResult {
    int exit_code = kExitPass;
    std::vector<Property> properties;
    nlohmann::json summary;
    std::string error;
};

struct RunOptions {
    bool write_outputs = true;
    std::string output_dir;        // overrides config.output_dir when non-empty
    std::ostream* log = nullptr;   // progress lines
};

// Runs one scenario and writes energy.csv, gauge.csv (where applicable),
// scenario-specific tables, summary.json and snapshots into the output
// directory. Numerical failures keep the artifacts written so far.
ScenarioResult run_scenario(const ScenarioConfig& config, const RunOptions& options = {});

std::string scenario_description(const std::string& name);

}  // namespace hyperflow
