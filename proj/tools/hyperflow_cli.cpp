#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "hyperflow/config.hpp"
#include "hyperflow/scenario.hpp"

using namespace hyperflow;

namespace {

int cmd_validate(const std::string& path) {
    const ConfigReport report = read_config_file(path);
    if (report.ok()) {
        std::cout << path << ": ok (scenario " << report.config.scenario << ")\n";
        return kExitPass;
    }
    std::cerr << path << ": " << report.errors.size() << " problem(s)\n";
    for (const std::string& e : report.errors) std::cerr << "  " << e << '\n';
    return kExitConfigError;
}

int cmd_list() {
    for (const std::string& name : scenario_names()) {
        std::cout << name << "  " << scenario_description(name) << '\n';
    }
    return kExitPass;
}

int cmd_run(const std::string& path, const std::string& output_dir, bool quiet) {
    const ConfigReport report = read_config_file(path);
    if (!report.ok()) {
        std::cerr << path << ": invalid config\n";
        for (const std::string& e : report.errors) std::cerr << "  " << e << '\n';
        return kExitConfigError;
    }
    RunOptions options;
    options.output_dir = output_dir;
    options.log = quiet ? nullptr : &std::cerr;
    const ScenarioResult result = run_scenario(report.config, options);
    for (const Property& p : result.properties) {
        if (!p.asserted) continue;
        std::cout << (p.pass ? "PASS " : "FAIL ") << p.name << ": " << p.value << ' ' << p.relation << ' '
                  << p.threshold << '\n';
    }
    if (!result.error.empty()) std::cerr << "error: " << result.error << '\n';
    std::cout << "status: " << result.summary.value("status", "") << '\n';
    return result.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Landau-Lifshitz and heat flows into the hyperbolic plane with caloric-gauge diagnostics"};
    app.require_subcommand(1);

    std::string run_path, output_dir, validate_path;
    bool quiet = false;
    CLI::App* run = app.add_subcommand("run", "run a scenario config and write its artifacts");
    run->add_option("config", run_path, "scenario config (JSON)")->required();
    run->add_option("-o,--output", output_dir, "output directory (overrides output_dir in the config)");
    run->add_flag("-q,--quiet", quiet, "suppress progress lines");

    CLI::App* validate = app.add_subcommand("validate", "check a config against the schema");
    validate->add_option("config", validate_path, "scenario config (JSON)")->required();

    CLI::App* list = app.add_subcommand("list", "list the shipped scenarios");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // Usage errors share the config-error exit code; --help exits 0.
        return app.exit(e) == 0 ? kExitPass : kExitConfigError;
    }
    try {
        if (*run) return cmd_run(run_path, output_dir, quiet);
        if (*validate) return cmd_validate(validate_path);
        if (*list) return cmd_list();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumericalFailure;
    }
    return kExitPass;
}
