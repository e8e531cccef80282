#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hyperflow/flows.hpp"
#include "hyperflow/grid.hpp"
#include "hyperflow/harmonic.hpp"
#include "hyperflow/tower.hpp"

namespace hyperflow {

inline constexpr int kConfigSchemaVersion = 1;

// Names accepted in the "scenario" field.
const std::vector<std::string>& scenario_names();

struct GridConfig {
    double x1_min = -4.0, x1_max = 4.0;
    double x2_min = -3.0, x2_max = 3.0;
    int n1 = 96, n2 = 96;

    Grid make() const { return Grid::make(x1_min, x1_max, x2_min, x2_max, n1, n2); }
};

// Time integration of the main flow run.
struct RunConfig {
    Integrator integrator = Integrator::SemiImplicit;
    double dt = 0.01;                // 0 selects the stability-based default (RK4 only)
    double t_final = 1.0;
    double checkpoint_every = 0.1;
};

// Scenario-specific knobs; each scenario reads only the ones it needs.
struct ScenarioOptions {
    bool refine = true;                                   // also run on the refined grid
    std::vector<double> deltas = {1e-1, 1e-2, 1e-3};      // mcgahagan_delta
    std::vector<double> s_samples = {0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0};  // kernel_check
    double semigroup_ds = 0.01;                           // kernel_check
    double gauge_time = 0.1;                              // gauge_check: center time of the three towers
    double gauge_dt = 0.01;                               // gauge_check: tower spacing in t
    double dissipation_window = 0.004;                    // theorem1: RK4 segment length
    double dissipation_cfl = 0.5;                         // theorem1: RK4 step as a fraction of the CFL bound
    double dissipation_every = 0.0004;                    // theorem1: checkpoint stride of the RK4 segment
    double stationary_tol = 1e-11;                        // heat_limit tolerance for reference maps
};

struct ScenarioConfig {
    int schema_version = kConfigSchemaVersion;
    std::string scenario;
    std::string output_dir = "out";
    std::uint64_t seed = 0;
    GridConfig grid;
    FlowParams flow;
    RunConfig run;
    HolomorphicMapSpec target = HolomorphicMapSpec::linear(0.5);
    BumpSpec perturbation;
    TowerSpec tower;
    int snapshot_every = 0;  // dump every k-th checkpoint of the main run; 0 disables
    ScenarioOptions options;
};

struct ConfigReport {
    ScenarioConfig config;
    std::vector<std::string> errors;  // "path: message", empty when valid

    bool ok() const { return errors.empty(); }
};

// Schema check plus semantic validation. Unknown keys are errors.
ConfigReport parse_config(const nlohmann::json& doc);
ConfigReport read_config_file(const std::string& path);

// Throws ConfigError listing every problem.
ScenarioConfig load_config(const std::string& path);

nlohmann::json config_to_json(const ScenarioConfig& config);

}  // namespace hyperflow
