#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "hyperflow/config.hpp"
#include "hyperflow/errors.hpp"
#include "hyperflow/scenario.hpp"

using namespace hyperflow;
namespace fs = std::filesystem;

namespace {

nlohmann::json shipped(const std::string& name) {
    std::ifstream in(fs::path(HYPERFLOW_CONFIG_DIR) / (name + ".json"));
    return nlohmann::json::parse(in);
}

bool mentions(const ConfigReport& r, const std::string& text) {
    for (const std::string& e : r.errors)
        if (e.find(text) != std::string::npos) return true;
    return false;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

nlohmann::json tiny_stationary() {
    nlohmann::json doc = shipped("stationary");
    doc["grid"] = {{"x1_range", {-2, 2}}, {"x2_range", {-1.5, 1.5}}, {"n1", 16}, {"n2", 16}};
    doc["run"]["t_final"] = 0.05;
    doc["run"]["checkpoint_every"] = 0.01;
    doc["options"]["refine"] = false;
    doc["options"]["stationary_tol"] = 1e-10;
    return doc;
}

}  // namespace

TEST(Config, ShippedConfigsValidate) {
    for (const std::string& name : scenario_names()) {
        const ConfigReport r = parse_config(shipped(name));
        EXPECT_TRUE(r.ok()) << name << ": " << (r.errors.empty() ? "" : r.errors.front());
        EXPECT_EQ(r.config.scenario, name);
        EXPECT_EQ(r.config.schema_version, kConfigSchemaVersion);
    }
}

TEST(Config, RoundTripsThroughJson) {
    const ConfigReport a = parse_config(shipped("gauge_check"));
    ASSERT_TRUE(a.ok());
    const ConfigReport b = parse_config(config_to_json(a.config));
    ASSERT_TRUE(b.ok());
    EXPECT_EQ(config_to_json(a.config), config_to_json(b.config));
}

TEST(Config, NegativeAlphaIsNamed) {
    nlohmann::json doc = shipped("theorem1");
    doc["flow"]["alpha"] = -1.0;
    const ConfigReport r = parse_config(doc);
    EXPECT_FALSE(r.ok());
    EXPECT_TRUE(mentions(r, "flow.alpha"));
}

TEST(Config, TowerStepAboveSMaxIsRejected) {
    nlohmann::json doc = shipped("gauge_check");
    doc["tower"]["ds"] = 10.0;
    doc["tower"]["ds_max"] = 10.0;
    doc["tower"]["s_max"] = 1.0;
    const ConfigReport r = parse_config(doc);
    EXPECT_FALSE(r.ok());
    EXPECT_TRUE(mentions(r, "tower.ds"));
}

TEST(Config, UnknownKeysAndWrongTypesAreErrors) {
    nlohmann::json doc = shipped("stationary");
    doc["flow"]["gamma"] = 1.0;
    doc["grid"]["n1"] = "many";
    const ConfigReport r = parse_config(doc);
    EXPECT_TRUE(mentions(r, "flow.gamma"));
    EXPECT_TRUE(mentions(r, "grid.n1"));
}

TEST(Config, UnknownScenarioAndSchemaVersion) {
    nlohmann::json doc = shipped("stationary");
    doc["scenario"] = "nope";
    doc["schema_version"] = 99;
    const ConfigReport r = parse_config(doc);
    EXPECT_TRUE(mentions(r, "scenario"));
    EXPECT_TRUE(mentions(r, "schema_version"));
}

TEST(Config, LoadConfigThrowsOnMissingOrInvalidFiles) {
    EXPECT_THROW(load_config("/nonexistent/config.json"), ConfigError);
    const fs::path p = fs::temp_directory_path() / "hyperflow_bad_config.json";
    std::ofstream(p) << "{ not json";
    EXPECT_THROW(load_config(p.string()), ConfigError);
    fs::remove(p);
}

TEST(Scenario, InvalidConfigMapsToTheConfigExitCode) {
    ScenarioConfig c = parse_config(shipped("stationary")).config;
    c.scenario = "nope";
    const ScenarioResult r = run_scenario(c, RunOptions{false});
    EXPECT_EQ(r.exit_code, kExitConfigError);
}

TEST(Scenario, RunsAreByteIdentical) {
    const ConfigReport rep = parse_config(tiny_stationary());
    ASSERT_TRUE(rep.ok()) << rep.errors.front();
    const fs::path root = fs::temp_directory_path() / "hyperflow_determinism";
    fs::remove_all(root);
    const ScenarioResult a = run_scenario(rep.config, RunOptions{true, (root / "a").string()});
    const ScenarioResult b = run_scenario(rep.config, RunOptions{true, (root / "b").string()});
    EXPECT_EQ(a.exit_code, b.exit_code);
    EXPECT_NE(a.exit_code, kExitConfigError) << a.error;
    int compared = 0;
    for (const auto& entry : fs::directory_iterator(root / "a")) {
        if (!entry.is_regular_file()) continue;
        const fs::path other = root / "b" / entry.path().filename();
        ASSERT_TRUE(fs::exists(other)) << other;
        EXPECT_EQ(slurp(entry.path()), slurp(other)) << entry.path().filename();
        ++compared;
    }
    EXPECT_GE(compared, 2);
    EXPECT_TRUE(fs::exists(root / "a" / "summary.json"));
    EXPECT_TRUE(fs::exists(root / "a" / "energy.csv"));
    fs::remove_all(root);
}
