#include "hyperflow/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "hyperflow/errors.hpp"

namespace hyperflow {

using nlohmann::json;

const std::vector<std::string>& scenario_names() {
    static const std::vector<std::string> names = {"stationary",       "heat_relax",     "theorem1",   "gauge_check",
                                                   "lemma36_sametower", "mcgahagan_delta", "kernel_check"};
    return names;
}

namespace {

// Walks one JSON object, records type errors and rejects keys nobody asked for.
class ObjectReader {
public:
    ObjectReader(const json& obj, std::string path, std::vector<std::string>& errors)
        : obj_(obj), path_(std::move(path)), errors_(errors) {
        if (!obj_.is_object()) error("", "expected an object");
    }

    ~ObjectReader() {
        if (!obj_.is_object()) return;
        for (const auto& item : obj_.items()) {
            if (!seen_.count(item.key())) error(item.key(), "unknown key");
        }
    }

    bool has(const std::string& key) {
        seen_.insert(key);
        return obj_.is_object() && obj_.contains(key);
    }

    void number(const std::string& key, double& out) {
        if (!has(key)) return;
        const json& v = obj_.at(key);
        if (!v.is_number()) return error(key, "expected a number");
        out = v.get<double>();
        if (!std::isfinite(out)) error(key, "must be finite");
    }

    void integer(const std::string& key, int& out) {
        if (!has(key)) return;
        const json& v = obj_.at(key);
        if (!v.is_number_integer()) return error(key, "expected an integer");
        out = v.get<int>();
    }

    void unsigned_integer(const std::string& key, std::uint64_t& out) {
        if (!has(key)) return;
        const json& v = obj_.at(key);
        if (!v.is_number_unsigned()) return error(key, "expected a non-negative integer");
        out = v.get<std::uint64_t>();
    }

    void boolean(const std::string& key, bool& out) {
        if (!has(key)) return;
        const json& v = obj_.at(key);
        if (!v.is_boolean()) return error(key, "expected true or false");
        out = v.get<bool>();
    }

    void string(const std::string& key, std::string& out) {
        if (!has(key)) return;
        const json& v = obj_.at(key);
        if (!v.is_string()) return error(key, "expected a string");
        out = v.get<std::string>();
    }

    void number_list(const std::string& key, std::vector<double>& out) {
        if (!has(key)) return;
        const json& v = obj_.at(key);
        if (!v.is_array()) return error(key, "expected an array of numbers");
        std::vector<double> values;
        for (const json& x : v) {
            if (!x.is_number()) return error(key, "expected an array of numbers");
            values.push_back(x.get<double>());
        }
        out = values;
    }

    void range(const std::string& key, double& lo, double& hi) {
        if (!has(key)) return;
        const json& v = obj_.at(key);
        if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
            return error(key, "expected [min, max]");
        }
        lo = v[0].get<double>();
        hi = v[1].get<double>();
    }

    void object(const std::string& key, const std::function<void(ObjectReader&)>& body) {
        if (!has(key)) return;
        ObjectReader sub(obj_.at(key), join(key), errors_);
        if (obj_.at(key).is_object()) body(sub);
    }

    const json& at(const std::string& key) const { return obj_.at(key); }
    std::string join(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
    void error(const std::string& key, const std::string& message) {
        const std::string where = key.empty() ? (path_.empty() ? "<root>" : path_) : join(key);
        errors_.push_back(where + ": " + message);
    }

private:
    const json& obj_;
    std::string path_;
    std::vector<std::string>& errors_;
    std::set<std::string> seen_;
};

void read_document(const json& doc, ScenarioConfig& c, std::vector<std::string>& errors) {
    ObjectReader root(doc, "", errors);
    if (!doc.is_object()) return;

    if (!root.has("schema_version")) {
        root.error("schema_version", "required");
    } else {
        root.integer("schema_version", c.schema_version);
    }
    if (!root.has("scenario")) {
        root.error("scenario", "required");
    } else {
        root.string("scenario", c.scenario);
    }
    root.string("output_dir", c.output_dir);
    root.unsigned_integer("seed", c.seed);
    root.integer("snapshot_every", c.snapshot_every);

    root.object("grid", [&](ObjectReader& r) {
        r.range("x1_range", c.grid.x1_min, c.grid.x1_max);
        r.range("x2_range", c.grid.x2_min, c.grid.x2_max);
        r.integer("n1", c.grid.n1);
        r.integer("n2", c.grid.n2);
    });
    root.object("flow", [&](ObjectReader& r) {
        r.number("alpha", c.flow.alpha);
        r.number("beta", c.flow.beta);
        r.number("delta", c.flow.delta);
        r.number("cfl", c.flow.cfl);
    });
    root.object("run", [&](ObjectReader& r) {
        std::string name;
        if (r.has("integrator")) {
            r.string("integrator", name);
            if (name == "rk4") {
                c.run.integrator = Integrator::RK4;
            } else if (name == "semi_implicit") {
                c.run.integrator = Integrator::SemiImplicit;
            } else if (r.at("integrator").is_string()) {
                r.error("integrator", "expected \"rk4\" or \"semi_implicit\"");
            }
        }
        r.number("dt", c.run.dt);
        r.number("t_final", c.run.t_final);
        r.number("checkpoint_every", c.run.checkpoint_every);
    });
    root.object("target", [&](ObjectReader& r) {
        if (!r.has("coefficients")) return;
        const json& v = r.at("coefficients");
        bool good = v.is_array();
        std::vector<std::complex<double>> coeffs;
        if (good) {
            for (const json& pair : v) {
                if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number()) {
                    good = false;
                    break;
                }
                coeffs.emplace_back(pair[0].get<double>(), pair[1].get<double>());
            }
        }
        if (!good) return r.error("coefficients", "expected a list of [re, im] pairs");
        c.target.coefficients = coeffs;
    });
    root.object("perturbation", [&](ObjectReader& r) {
        if (r.has("center")) {
            const json& v = r.at("center");
            if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
                r.error("center", "expected [x1, x2]");
            } else {
                c.perturbation.center = {v[0].get<double>(), v[1].get<double>()};
            }
        }
        r.number("radius", c.perturbation.radius);
        r.number("amplitude", c.perturbation.amplitude);
        r.number("angle", c.perturbation.angle);
    });
    root.object("tower", [&](ObjectReader& r) {
        r.number("ds", c.tower.ds);
        r.number("ds_growth", c.tower.ds_growth);
        r.number("ds_max", c.tower.ds_max);
        r.number("s_max", c.tower.s_max);
        r.number("tail_tol", c.tower.tail_tol);
    });
    root.object("options", [&](ObjectReader& r) {
        ScenarioOptions& o = c.options;
        r.boolean("refine", o.refine);
        r.number_list("deltas", o.deltas);
        r.number_list("s_samples", o.s_samples);
        r.number("semigroup_ds", o.semigroup_ds);
        r.number("gauge_time", o.gauge_time);
        r.number("gauge_dt", o.gauge_dt);
        r.number("dissipation_window", o.dissipation_window);
        r.number("dissipation_cfl", o.dissipation_cfl);
        r.number("dissipation_every", o.dissipation_every);
        r.number("stationary_tol", o.stationary_tol);
    });
}

void check_semantics(const ScenarioConfig& c, std::vector<std::string>& errors) {
    auto require = [&](bool ok, const std::string& path, const std::string& message) {
        if (!ok) errors.push_back(path + ": " + message);
    };
    require(c.schema_version == kConfigSchemaVersion, "schema_version",
            "unsupported version " + std::to_string(c.schema_version) + " (expected " +
                std::to_string(kConfigSchemaVersion) + ")");
    const auto& names = scenario_names();
    require(std::find(names.begin(), names.end(), c.scenario) != names.end(), "scenario",
            "unknown scenario '" + c.scenario + "'");
    require(!c.output_dir.empty(), "output_dir", "must not be empty");
    require(c.snapshot_every >= 0, "snapshot_every", "must be >= 0");

    require(c.grid.x1_max > c.grid.x1_min, "grid.x1_range", "max must exceed min");
    require(c.grid.x2_max > c.grid.x2_min, "grid.x2_range", "max must exceed min");
    require(c.grid.n1 >= 8, "grid.n1", "must be >= 8");
    require(c.grid.n2 >= 8, "grid.n2", "must be >= 8");

    require(c.flow.alpha > 0.0, "flow.alpha", "must be > 0");
    require(c.flow.delta > 0.0, "flow.delta", "must be > 0");
    require(c.flow.cfl > 0.0 && c.flow.cfl <= 1.0, "flow.cfl", "must lie in (0, 1]");

    require(c.run.dt >= 0.0, "run.dt", "must be >= 0");
    require(c.run.integrator == Integrator::RK4 || c.run.dt > 0.0, "run.dt",
            "must be > 0 for the semi_implicit integrator");
    require(c.run.t_final > 0.0, "run.t_final", "must be > 0");
    require(c.run.checkpoint_every > 0.0, "run.checkpoint_every", "must be > 0");
    require(c.run.checkpoint_every <= c.run.t_final, "run.checkpoint_every", "must not exceed run.t_final");

    require(!c.target.coefficients.empty(), "target.coefficients", "must not be empty");
    require(c.target.coefficient_sum() < 1.0, "target.coefficients", "sum of |a_k| must be < 1");

    require(c.perturbation.radius > 0.0, "perturbation.radius", "must be > 0");

    require(c.tower.ds > 0.0, "tower.ds", "must be > 0");
    require(c.tower.ds_growth >= 1.0, "tower.ds_growth", "must be >= 1");
    require(c.tower.ds_max >= c.tower.ds, "tower.ds_max", "must be >= tower.ds");
    require(c.tower.s_max > 0.0, "tower.s_max", "must be > 0");
    require(c.tower.ds <= c.tower.s_max, "tower.ds", "must not exceed tower.s_max");
    require(c.tower.tail_tol > 0.0, "tower.tail_tol", "must be > 0");

    const ScenarioOptions& o = c.options;
    require(!o.deltas.empty(), "options.deltas", "must not be empty");
    for (double d : o.deltas) require(d > 0.0, "options.deltas", "entries must be > 0");
    require(!o.s_samples.empty(), "options.s_samples", "must not be empty");
    for (double s : o.s_samples) require(s > 0.0, "options.s_samples", "entries must be > 0");
    require(o.semigroup_ds > 0.0, "options.semigroup_ds", "must be > 0");
    require(o.gauge_dt > 0.0, "options.gauge_dt", "must be > 0");
    require(o.gauge_time >= 2.0 * o.gauge_dt, "options.gauge_time", "must be >= 2 * options.gauge_dt");
    require(o.dissipation_window > 0.0, "options.dissipation_window", "must be > 0");
    require(o.dissipation_cfl > 0.0 && o.dissipation_cfl <= 1.0, "options.dissipation_cfl", "must lie in (0, 1]");
    require(o.dissipation_every > 0.0 && o.dissipation_every <= o.dissipation_window, "options.dissipation_every",
            "must lie in (0, options.dissipation_window]");
    require(o.stationary_tol > 0.0, "options.stationary_tol", "must be > 0");
}

}  // namespace

ConfigReport parse_config(const json& doc) {
    ConfigReport report;
    read_document(doc, report.config, report.errors);
    if (report.errors.empty()) check_semantics(report.config, report.errors);
    return report;
}

ConfigReport read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        ConfigReport report;
        report.errors.push_back(path + ": cannot open file");
        return report;
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        ConfigReport report;
        report.errors.push_back(path + ": invalid JSON: " + e.what());
        return report;
    }
    return parse_config(doc);
}

ScenarioConfig load_config(const std::string& path) {
    ConfigReport report = read_config_file(path);
    if (!report.ok()) {
        std::ostringstream msg;
        msg << "invalid config " << path << ":";
        for (const std::string& e : report.errors) msg << "\n  " << e;
        throw ConfigError(msg.str());
    }
    return report.config;
}

json config_to_json(const ScenarioConfig& c) {
    json coeffs = json::array();
    for (const auto& a : c.target.coefficients) coeffs.push_back({a.real(), a.imag()});
    return json{
        {"schema_version", c.schema_version},
        {"scenario", c.scenario},
        {"output_dir", c.output_dir},
        {"seed", c.seed},
        {"snapshot_every", c.snapshot_every},
        {"grid",
         {{"x1_range", {c.grid.x1_min, c.grid.x1_max}},
          {"x2_range", {c.grid.x2_min, c.grid.x2_max}},
          {"n1", c.grid.n1},
          {"n2", c.grid.n2}}},
        {"flow", {{"alpha", c.flow.alpha}, {"beta", c.flow.beta}, {"delta", c.flow.delta}, {"cfl", c.flow.cfl}}},
        {"run",
         {{"integrator", c.run.integrator == Integrator::RK4 ? "rk4" : "semi_implicit"},
          {"dt", c.run.dt},
          {"t_final", c.run.t_final},
          {"checkpoint_every", c.run.checkpoint_every}}},
        {"target", {{"coefficients", coeffs}}},
        {"perturbation",
         {{"center", {c.perturbation.center.x1, c.perturbation.center.x2}},
          {"radius", c.perturbation.radius},
          {"amplitude", c.perturbation.amplitude},
          {"angle", c.perturbation.angle}}},
        {"tower",
         {{"ds", c.tower.ds},
          {"ds_growth", c.tower.ds_growth},
          {"ds_max", c.tower.ds_max},
          {"s_max", c.tower.s_max},
          {"tail_tol", c.tower.tail_tol}}},
        {"options",
         {{"refine", c.options.refine},
          {"deltas", c.options.deltas},
          {"s_samples", c.options.s_samples},
          {"semigroup_ds", c.options.semigroup_ds},
          {"gauge_time", c.options.gauge_time},
          {"gauge_dt", c.options.gauge_dt},
          {"dissipation_window", c.options.dissipation_window},
          {"dissipation_cfl", c.options.dissipation_cfl},
          {"dissipation_every", c.options.dissipation_every},
          {"stationary_tol", c.options.stationary_tol}}},
    };
}

}  // namespace hyperflow
