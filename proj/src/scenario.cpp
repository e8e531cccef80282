#include "hyperflow/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <ostream>

#include "hyperflow/csv.hpp"
#include "hyperflow/errors.hpp"
#include "hyperflow/field_io.hpp"
#include "hyperflow/fields.hpp"
#include "hyperflow/flows.hpp"
#include "hyperflow/gauge.hpp"
#include "hyperflow/geometry.hpp"
#include "hyperflow/harmonic.hpp"
#include "hyperflow/kernels.hpp"
#include "hyperflow/monitors.hpp"
#include "hyperflow/tower.hpp"

namespace hyperflow {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::vector<std::string> kEnergyColumns = {"t", "E1", "E2", "E3", "tau_l2", "dissipation_residual"};
const std::vector<std::string> kGaugeColumns = {"t", "torsion", "commutator", "w_norm", "heat_tension", "At_limit"};
const std::vector<std::string> kGaugeSColumns = {"s", "torsion", "commutator", "w_norm", "heat_tension", "At_limit"};
const std::vector<std::string> kKernelColumns = {"s", "sup_norm", "l1_norm", "envelope", "ratio"};

// Round-off level of increments of sup_distance on the default grids.
constexpr double kDistanceNoise = 1e-12;

double json_number(double v) { return std::isfinite(v) ? v : std::numeric_limits<double>::quiet_NaN(); }

class Context {
public:
    Context(const ScenarioConfig& config, const RunOptions& options) : config_(config), options_(options) {
        dir_ = options.output_dir.empty() ? fs::path(config.output_dir) : fs::path(options.output_dir);
        if (options_.write_outputs) fs::create_directories(dir_);
    }

    const ScenarioConfig& config() const { return config_; }
    std::vector<Property>& properties() { return properties_; }
    json& diagnostics() { return diagnostics_; }

    void log(const std::string& line) const {
        if (options_.log) *options_.log << "[" << config_.scenario << "] " << line << std::endl;
    }

    void check(const std::string& name, int criterion, double value, const std::string& relation, double threshold,
               const std::string& detail = "") {
        Property p;
        p.name = name;
        p.criterion = criterion;
        p.value = value;
        p.relation = relation;
        p.threshold = threshold;
        p.detail = detail;
        if (relation == "<=") {
            p.pass = value <= threshold;
        } else if (relation == "<") {
            p.pass = value < threshold;
        } else if (relation == ">=") {
            p.pass = value >= threshold;
        } else {
            p.pass = value > threshold;
        }
        log(name + " = " + format_double(value) + " " + relation + " " + format_double(threshold) +
            (p.pass ? "  ok" : "  FAILED"));
        properties_.push_back(p);
    }

    void note(const std::string& name, double value, const std::string& detail = "") {
        diagnostics_[name] = json_number(value);
        if (!detail.empty()) diagnostics_[name + "_note"] = detail;
        log(name + " = " + format_double(value));
    }

    CsvTable& table(const std::string& file, const std::vector<std::string>& columns) {
        auto it = tables_.find(file);
        if (it == tables_.end()) it = tables_.emplace(file, CsvTable(columns)).first;
        return it->second;
    }

    void flush_tables() const {
        if (!options_.write_outputs) return;
        for (const auto& [file, table] : tables_) table.save((dir_ / file).string());
    }

    void snapshot(const std::string& stem, std::size_t index, const FieldDump& dump) const {
        if (!options_.write_outputs) return;
        const int every = config_.snapshot_every;
        if (every <= 0 || index % static_cast<std::size_t>(every) != 0) return;
        const fs::path sub = dir_ / "snapshots";
        fs::create_directories(sub);
        char name[64];
        std::snprintf(name, sizeof name, "%s_%05zu.txt", stem.c_str(), index);
        save_dump((sub / name).string(), dump);
    }

    void write_summary(const json& summary) const {
        if (!options_.write_outputs) return;
        std::ofstream out(dir_ / "summary.json");
        out << summary.dump(2) << '\n';
    }

private:
    const ScenarioConfig& config_;
    RunOptions options_;
    fs::path dir_;
    std::vector<Property> properties_;
    json diagnostics_ = json::object();
    std::map<std::string, CsvTable> tables_;
};

// ---------------------------------------------------------------------------
// shared pieces

MapField target_map(const ScenarioConfig& c, const Grid& g) { return to_chart(c.target, g); }

MapField initial_map(const ScenarioConfig& c, const Grid& g) { return perturb(target_map(c, g), c.perturbation); }

EvolveOptions main_run_options(const ScenarioConfig& c) {
    EvolveOptions eo;
    eo.integrator = c.run.integrator;
    eo.dt = c.run.dt;
    eo.checkpoint_every = c.run.checkpoint_every;
    return eo;
}

std::vector<double> energy_row(const EnergyReport& r) {
    return {r.t, r.E1, r.E2, r.E3, r.tau_l2, r.dissipation_residual};
}

std::vector<double> gauge_row(double t, const GaugeResiduals& r, double at_limit) {
    return {t, r.torsion, r.commutator, r.w_norm, r.heat_tension, at_limit};
}

// Residuals on a Theta-frame bundle; they do not depend on the gauge choice.
GaugeResiduals theta_residuals(const MapField& u, const FlowParams& params) {
    const TangentField ut = ll_rhs(u, params);
    return gauge_residuals(make_bundle(u, theta_frame(u), &ut), params);
}

using CheckpointHook = std::function<void(const FlowState&, const EnergyReport&)>;

// Records energy<suffix>.csv, optionally gauge<suffix>.csv, and snapshots
// u<suffix>_NNNNN.txt for every checkpoint of a run.
std::function<void(const FlowState&)> run_recorder(Context& ctx, const FlowParams& params, const std::string& suffix,
                                                   bool with_gauge, CheckpointHook hook = {}) {
    auto prev = std::make_shared<std::unique_ptr<FlowState>>();
    auto index = std::make_shared<std::size_t>(0);
    return [&ctx, params, suffix, with_gauge, hook, prev, index](const FlowState& s) {
        const EnergyReport e = energy_report(s, prev->get(), params);
        ctx.table("energy" + suffix + ".csv", kEnergyColumns).add_row(energy_row(e));
        if (with_gauge) {
            ctx.table("gauge" + suffix + ".csv", kGaugeColumns)
                .add_row(gauge_row(s.t, theta_residuals(s.u, params), std::numeric_limits<double>::quiet_NaN()));
        }
        ctx.snapshot("u" + suffix, (*index)++, dump_of(s.u));
        if (hook) hook(s, e);
        *prev = std::make_unique<FlowState>(s);
    };
}

// Heat limit of a map through its tower; `tower_out` receives the tower.
MapField heat_flow_limit(const MapField& u, const ScenarioConfig& c, HeatTower* tower_out = nullptr) {
    HeatTower tower = build_heat_tower(u, c.tower);
    MapField limit = heat_limit(tower.limit(), c.options.stationary_tol);
    if (tower_out) *tower_out = std::move(tower);
    return limit;
}

double discretization_floor(const ScenarioConfig& c, const Grid& g) {
    const MapField Q = target_map(c, g);
    return sup_distance(Q, heat_limit(Q, c.options.stationary_tol));
}

double trapezoid(const std::vector<double>& t, const std::vector<double>& f, double lo, double hi) {
    double sum = 0.0;
    for (std::size_t k = 0; k + 1 < t.size(); ++k) {
        if (t[k] < lo - 1e-12 || t[k + 1] > hi + 1e-12) continue;
        sum += 0.5 * (t[k + 1] - t[k]) * (f[k] + f[k + 1]);
    }
    return sum;
}

// L2 norm over nodes at least one node away from the boundary.
double interior_l2(const Grid& g, const std::vector<double>& a, const std::vector<double>& b) {
    const std::vector<double> w = quadrature_weights(g);
    double sum = 0.0;
    for (int j = 1; j < g.n2 - 1; ++j) {
        for (int i = 1; i < g.n1 - 1; ++i) {
            const std::size_t k = g.index(i, j);
            const double d = a[k] - (b.empty() ? 0.0 : b[k]);
            sum += w[k] * d * d;
        }
    }
    return std::sqrt(sum);
}

TangentField central_velocity(const MapField& before, const MapField& after, double dt) {
    TangentField v(before.grid);
    for (std::size_t k = 0; k < before.grid.size(); ++k) {
        v.X1[k] = (after.u1[k] - before.u1[k]) / (2.0 * dt);
        v.X2[k] = (after.u2[k] - before.u2[k]) / (2.0 * dt);
    }
    return v;
}

TangentField subtract(const TangentField& a, const TangentField& b) {
    TangentField d(a.grid);
    for (std::size_t k = 0; k < a.grid.size(); ++k) {
        d.X1[k] = a.X1[k] - b.X1[k];
        d.X2[k] = a.X2[k] - b.X2[k];
    }
    return d;
}

const FlowState& state_at(const std::vector<FlowState>& traj, double t) {
    const FlowState* best = &traj.front();
    for (const FlowState& s : traj) {
        if (std::abs(s.t - t) < std::abs(best->t - t)) best = &s;
    }
    if (std::abs(best->t - t) > 1e-9 * std::max(1.0, std::abs(t))) {
        throw ConfigError("no checkpoint at t = " + format_double(t) + "; adjust run.checkpoint_every");
    }
    return *best;
}

// ---------------------------------------------------------------------------
// stationary: heat flow started at the harmonic map itself

void run_stationary(Context& ctx) {
    const ScenarioConfig& c = ctx.config();
    const Grid base = c.grid.make();
    std::vector<Grid> grids = {base};
    if (c.options.refine) grids.push_back(base.refined());

    std::vector<double> drift(grids.size()), floor(grids.size());
    for (std::size_t level = 0; level < grids.size(); ++level) {
        const Grid& g = grids[level];
        const MapField Q = target_map(c, g);
        floor[level] = discretization_floor(c, g);
        EvolveOptions eo = main_run_options(c);
        const std::string suffix = level == 0 ? "" : "_refined";
        eo.on_checkpoint = run_recorder(ctx, c.flow, suffix, true);
        eo.keep_trajectory = false;
        const FlowState final_state = evolve(FlowState{Q, {}, 0.0}, c.flow, c.run.t_final, eo).back();
        drift[level] = sup_distance(final_state.u, Q);
        const std::string tag = "n" + std::to_string(g.n1) + "x" + std::to_string(g.n2);
        ctx.note("floor_" + tag, floor[level], "sup_distance(Q, heat limit of Q)");
        ctx.check("drift_within_floor_" + tag, 1, drift[level], "<=", floor[level],
                  "sup_distance(u(T), Q) against the discretization floor");
        if (level == 0) {
            const AdmissibilityReport adm = admissibility_report(Q);
            ctx.note("admissibility_d_l2", adm.d_l2);
            ctx.note("admissibility_grad_d_l2", adm.grad_d_l2);
            ctx.note("admissibility_grad2_d_l2", adm.grad2_d_l2);
            ctx.note("admissibility_range_radius", adm.range_radius);
            ctx.note("admissibility_weighted_sup", adm.weighted_sup);
            ctx.note("tension_l2", lp_norm(tension_field(Q), Q, Norm::L2));
        }
    }
    if (grids.size() == 2) {
        ctx.check("drift_refinement_ratio", 1, drift[0] / drift[1], ">=", 3.0, "drift(h) / drift(h/2)");
    }
}

// ---------------------------------------------------------------------------
// heat_relax: the heat tower of the perturbed map

void run_heat_relax(Context& ctx) {
    const ScenarioConfig& c = ctx.config();
    const Grid g = c.grid.make();
    const MapField Q = target_map(c, g);
    const MapField u0 = perturb(Q, c.perturbation);
    const HeatTower tower = build_heat_tower(u0, c.tower);
    ctx.note("s_end", tower.s_end());
    ctx.note("decay_rate", tower.decay_rate);
    ctx.note("tail_bound", tower.tail_bound);

    FlowParams heat;
    heat.alpha = 1.0;
    heat.beta = 0.0;
    double e1_increase = 0.0;
    for (std::size_t k = 0; k < tower.u.size(); ++k) {
        const FlowState cur{tower.u[k], {}, tower.s[k]};
        const FlowState prev = k ? FlowState{tower.u[k - 1], {}, tower.s[k - 1]} : cur;
        const EnergyReport e = energy_report(cur, k ? &prev : nullptr, heat);
        ctx.table("energy.csv", kEnergyColumns).add_row(energy_row(e));
        if (k) e1_increase = std::max(e1_increase, e.E1 - dirichlet_energy(tower.u[k - 1]));
        ctx.snapshot("tower", k, dump_of(tower.u[k]));
    }
    ctx.note("E1_max_increase_along_s", e1_increase);

    const BochnerReport br = bochner_monitor(tower);
    ctx.check("sup_ds_non_increasing", 7, br.max_increase, "<=", 1e-8, "largest increase of max|d_s u| between checkpoints");
    const double s_end = tower.s_end();
    const double slope = log_linear_slope(tower.s, tower.sup_ds, 0.1 * s_end, s_end);
    ctx.check("final_decade_log_slope", 7, slope, "<=", -0.1, "log-linear fit of max|d_s u| over [s_end/10, s_end]");
    ctx.note("bochner_K_empirical", br.K_empirical, "smallest K in the Bochner inequality for |du|^2");
    ctx.note("bochner_lhs_sq_normalized", br.lhs_sq_normalized);

    // Caloric frame along the tower and residuals of each slice.
    TransportReport rep;
    const std::vector<Frame> frames = transport_frame(tower, theta_frame(tower.limit()), &rep);
    ctx.note("transport_norm_drift", rep.max_norm_drift);
    double as_max = 0.0;
    for (std::size_t k = 0; k < tower.u.size(); ++k) {
        const TangentField tau = tension_field(tower.u[k]);
        const GaugeResiduals r = gauge_residuals(make_bundle(tower.u[k], frames[k], &tau), heat);
        double as_k = std::numeric_limits<double>::quiet_NaN();
        if (k + 1 < tower.u.size()) {
            as_k = 0.0;
            for (double v : connection_between(frames[k], tower.u[k], frames[k + 1], tower.u[k + 1],
                                               tower.s[k + 1] - tower.s[k])) {
                as_k = std::max(as_k, std::abs(v));
            }
            as_max = std::max(as_max, as_k);
        }
        ctx.table("gauge.csv", kGaugeSColumns).add_row(gauge_row(tower.s[k], r, as_k));
    }
    ctx.check("A_s_vanishes", 0, as_max, "<=", 1e-6, "max |<nabla_s e1, J e1>| of the transported frame");
    const MapField Qinf = heat_limit(tower.limit(), c.options.stationary_tol);
    ctx.note("limit_distance_to_Q", sup_distance(Qinf, Q), "empirical check that the limit is Q (not asserted)");
    ctx.note("floor", discretization_floor(c, g));
}

// ---------------------------------------------------------------------------
// theorem1: LL flow from Q + bump, its energy identity and its limit

void run_theorem1(Context& ctx) {
    const ScenarioConfig& c = ctx.config();
    const Grid g = c.grid.make();
    const MapField Q = target_map(c, g);
    const MapField u0 = perturb(Q, c.perturbation);

    // Short explicit segment at a fraction of the CFL bound for the dissipation identity.
    {
        EvolveOptions eo;
        eo.integrator = Integrator::RK4;
        eo.dt = c.options.dissipation_cfl * cfl_bound(g, c.flow);
        eo.checkpoint_every = c.options.dissipation_every;
        const std::vector<FlowState> traj = evolve(FlowState{u0, {}, 0.0}, c.flow, c.options.dissipation_window, eo);
        double worst_ratio = 0.0, worst_increase = -std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < traj.size(); ++k) {
            const EnergyReport e = energy_report(traj[k], k ? &traj[k - 1] : nullptr, c.flow);
            ctx.table("dissipation.csv", kEnergyColumns).add_row(energy_row(e));
            if (k == 0) continue;
            worst_ratio = std::max(worst_ratio, e.dissipation_residual / e.dissipation_scale);
            worst_increase = std::max(worst_increase, e.E1 - dirichlet_energy(traj[k - 1].u));
        }
        ctx.note("dissipation_dt", eo.dt);
        ctx.check("E1_non_increasing", 2, worst_increase, "<=", 0.0, "largest E1(t_k+1) - E1(t_k) in the RK4 segment");
        ctx.check("dissipation_relative_residual", 2, worst_ratio, "<=", 0.05,
                  "max |dE1/dt + alpha |tau|^2| / (alpha |tau|^2) over checkpoint intervals");
    }

    const MapField Q_heat = heat_flow_limit(u0, c);
    const double floor = discretization_floor(c, g);
    ctx.note("floor", floor);
    ctx.note("Q_heat_distance_to_Q", sup_distance(Q_heat, Q), "empirical check that the limit is Q (not asserted)");

    std::vector<double> t, d, e2, e3, e1;
    EvolveOptions eo = main_run_options(c);
    eo.on_checkpoint = run_recorder(ctx, c.flow, "", true, [&](const FlowState& s, const EnergyReport& e) {
        t.push_back(s.t);
        d.push_back(sup_distance(s.u, Q_heat));
        e1.push_back(e.E1);
        e2.push_back(e.E2);
        e3.push_back(e.E3);
    });
    eo.keep_trajectory = false;
    const FlowState final_state = evolve(FlowState{u0, {}, 0.0}, c.flow, c.run.t_final, eo).back();
    ctx.note("final_distance_to_Q_heat", d.back());
    ctx.note("final_distance_to_Q", sup_distance(final_state.u, Q));

    {
        CsvTable& dist = ctx.table("distance.csv", {"t", "distance_to_Q_heat"});
        for (std::size_t k = 0; k < t.size(); ++k) dist.add_row({t[k], d[k]});
    }

    // Last checkpoint after which the distance never increases by more than round-off.
    double t_monotone = 0.0, largest_late_increase = 0.0;
    for (std::size_t k = 0; k + 1 < d.size(); ++k) {
        const double rise = d[k + 1] - d[k];
        if (rise > kDistanceNoise) t_monotone = t[k + 1];
        if (t[k] >= 0.5 * c.run.t_final) largest_late_increase = std::max(largest_late_increase, rise);
    }
    ctx.note("largest_increase_second_half", largest_late_increase);
    const double T = c.run.t_final;
    ctx.check("distance_monotone_from", 3, t_monotone, "<=", 0.5 * T,
              "time after which sup_distance(u(t), Q_heat) is non-increasing");
    ctx.check("distance_below_10_floor", 3, *std::min_element(d.begin(), d.end()), "<", 10.0 * floor,
              "min_t sup_distance(u(t), Q_heat) against 10x the floor");

    double e1_increase = 0.0;
    for (std::size_t k = 0; k + 1 < e1.size(); ++k) e1_increase = std::max(e1_increase, e1[k + 1] - e1[k]);
    ctx.note("E1_max_increase_semi_implicit", e1_increase);

    // |u_t|^2 = 2 E2 and |nabla u_t|^2 = 2 E3.
    std::vector<double> ut2(t.size()), gut2(t.size());
    for (std::size_t k = 0; k < t.size(); ++k) {
        ut2[k] = 2.0 * e2[k];
        gut2[k] = 2.0 * e3[k];
    }
    const double total_ut = trapezoid(t, ut2, 0.0, T), tail_ut = trapezoid(t, ut2, 0.5 * T, T);
    const double total_gut = trapezoid(t, gut2, 0.0, T), tail_gut = trapezoid(t, gut2, 0.5 * T, T);
    ctx.note("int_ut_sq", total_ut);
    ctx.note("int_grad_ut_sq", total_gut);
    ctx.check("ut_sq_second_half_fraction", 10, tail_ut / total_ut, "<", 0.1,
              "int_{T/2}^T |u_t|^2 / int_0^T |u_t|^2");
    ctx.check("grad_ut_sq_second_half_fraction", 10, tail_gut / total_gut, "<", 0.1,
              "int_{T/2}^T |nabla u_t|^2 / int_0^T |nabla u_t|^2");
}

// ---------------------------------------------------------------------------
// lemma36_sametower: towers from three times of one LL run share their limit

void run_lemma36(Context& ctx) {
    const ScenarioConfig& c = ctx.config();
    const Grid g = c.grid.make();
    const MapField u0 = initial_map(c, g);
    std::vector<FlowState> traj;
    EvolveOptions eo = main_run_options(c);
    eo.on_checkpoint = run_recorder(ctx, c.flow, "", false,
                                    [&](const FlowState& s, const EnergyReport&) { traj.push_back(s); });
    eo.keep_trajectory = false;
    evolve(FlowState{u0, {}, 0.0}, c.flow, c.run.t_final, eo);

    const double T = c.run.t_final;
    const std::vector<double> times = {0.0, 0.5 * T, T};
    std::vector<HeatTower> towers;
    for (double t : times) {
        towers.push_back(build_heat_tower(state_at(traj, t).u, c.tower, t));
        const HeatTower& tw = towers.back();
        ctx.log("tower at t = " + format_double(t) + ": s_end = " + format_double(tw.s_end()));
        CsvTable& tt = ctx.table("towers.csv", {"t", "s_end", "checkpoints", "sup_ds_end", "decay_rate", "tail_bound"});
        tt.add_row({t, tw.s_end(), static_cast<double>(tw.u.size()), tw.sup_ds.back(), tw.decay_rate, tw.tail_bound});
    }
    double worst = 0.0;
    for (std::size_t a = 0; a < towers.size(); ++a) {
        for (std::size_t b = a + 1; b < towers.size(); ++b) {
            const double dist = sup_distance(towers[a].limit(), towers[b].limit());
            ctx.note("limit_distance_t" + format_double(times[a]) + "_t" + format_double(times[b]), dist);
            worst = std::max(worst, dist);
        }
    }
    ctx.check("pairwise_limit_distance", 4, worst, "<=", 3.0 * c.tower.tail_tol,
              "max pairwise sup_distance of tower limits against 3x tail tolerance");

    // Caloric-gauge residuals along the middle tower.
    const HeatTower& mid = towers[1];
    const std::vector<Frame> frames = transport_frame(mid, theta_frame(mid.limit()));
    FlowParams heat;
    for (std::size_t k = 0; k < mid.u.size(); ++k) {
        const TangentField tau = tension_field(mid.u[k]);
        const GaugeResiduals r = gauge_residuals(make_bundle(mid.u[k], frames[k], &tau), heat);
        ctx.table("gauge.csv", kGaugeSColumns).add_row(gauge_row(mid.s[k], r, std::numeric_limits<double>::quiet_NaN()));
    }
}

// ---------------------------------------------------------------------------
// gauge_check: caloric gauge at one time of the LL flow, two routes to A

struct GapResult {
    double gap = 0.0;  // L2 norm of (A1, A2) frame route minus integral route at s = 0
    double a_norm = 0.0;
    double tail_bound = 0.0;
};

GapResult connection_gap(const MapField& u, const TowerSpec& spec, double limit_tol) {
    const HeatTower tower = build_heat_tower(u, spec);
    const MapField Qinf = heat_limit(tower.limit(), limit_tol);
    const std::vector<Frame> frames = transport_frame(tower, theta_frame(tower.limit()));
    const IntegralConnection ic = connection_from_integral(tower, frames, Qinf);
    const Grid& g = u.grid;
    const std::vector<double> A1 = connection_from_frame(frames[0], u, 1);
    const std::vector<double> A2 = connection_from_frame(frames[0], u, 2);
    GapResult r;
    r.gap = std::hypot(interior_l2(g, A1, ic.A1[0]), interior_l2(g, A2, ic.A2[0]));
    r.a_norm = std::hypot(interior_l2(g, A1, {}), interior_l2(g, A2, {}));
    r.tail_bound = ic.tail_bound;
    return r;
}

struct GaugeLevel {
    std::vector<double> s;
    std::vector<double> torsion, commutator;
    double w_norm = 0.0, w_budget = 0.0;
    GapResult gap;
    std::optional<MapField> center;  // u(gauge_time)
};

GaugeLevel gauge_level(Context& ctx, const Grid& g, bool primary) {
    const ScenarioConfig& c = ctx.config();
    const double tc = c.options.gauge_time, dt = c.options.gauge_dt;
    const MapField u0 = initial_map(c, g);
    const std::string tag = "n" + std::to_string(g.n1) + "x" + std::to_string(g.n2);

    EvolveOptions eo = main_run_options(c);
    eo.checkpoint_every = dt;
    const std::vector<FlowState> traj = evolve(FlowState{u0, {}, 0.0}, c.flow, tc + 2.0 * dt, eo);
    EvolveOptions eo_half = eo;
    if (eo_half.dt > 0.0) eo_half.dt *= 0.5;
    const std::vector<FlowState> traj_half = evolve(FlowState{u0, {}, 0.0}, c.flow, tc + 2.0 * dt, eo_half);

    const MapField& u_bb = state_at(traj, tc - 2.0 * dt).u;
    const MapField& u_b = state_at(traj, tc - dt).u;
    const MapField& u_c = state_at(traj, tc).u;
    const MapField& u_a = state_at(traj, tc + dt).u;
    const MapField& u_aa = state_at(traj, tc + 2.0 * dt).u;

    GaugeLevel level;
    level.center = u_c;
    level.gap = connection_gap(u_c, c.tower, 1e-3 * c.tower.tail_tol);

    HeatTower Tb = build_heat_tower(u_b, c.tower, tc - dt);
    HeatTower Tc = build_heat_tower(u_c, c.tower, tc);
    HeatTower Ta = build_heat_tower(u_a, c.tower, tc + dt);
    align_towers({&Tb, &Tc, &Ta}, c.tower);
    TransportReport rep;
    const std::vector<Frame> Fb = transport_frame(Tb, theta_frame(Tb.limit()));
    const std::vector<Frame> Fc = transport_frame(Tc, theta_frame(Tc.limit()), &rep);
    const std::vector<Frame> Fa = transport_frame(Ta, theta_frame(Ta.limit()));

    const std::string file = primary ? "gauge.csv" : "gauge_refined.csv";
    double at_end = 0.0;
    for (std::size_t k = 0; k < Tc.u.size(); ++k) {
        const TangentField phit = central_velocity(Tb.u[k], Ta.u[k], dt);
        GaugeBundle b = make_bundle(Tc.u[k], Fc[k], &phit);
        const GaugeResiduals r = gauge_residuals(b, c.flow);
        double at_k = 0.0;
        for (double v : connection_between(Fb[k], Tb.u[k], Fa[k], Ta.u[k], 2.0 * dt)) at_k = std::max(at_k, std::abs(v));
        ctx.table(file, kGaugeSColumns).add_row(gauge_row(Tc.s[k], r, at_k));
        level.s.push_back(Tc.s[k]);
        level.torsion.push_back(r.torsion);
        level.commutator.push_back(r.commutator);
        if (k + 1 == Tc.u.size()) at_end = at_k;
    }

    // w at s = 0 with u_t from the trajectory, and the budget it is held to:
    // |z| |phi_s - H| (spatial) plus Richardson estimates of the integrator
    // error (dt vs dt/2) and of the central difference (dt vs 2 dt).
    {
        const TangentField v = central_velocity(u_b, u_a, dt);
        const GaugeResiduals r = gauge_residuals(make_bundle(u_c, Fc[0], &v), c.flow);
        const TangentField v_half = central_velocity(state_at(traj_half, tc - dt).u, state_at(traj_half, tc + dt).u, dt);
        const TangentField v_wide = central_velocity(u_bb, u_aa, 2.0 * dt);
        const double integrator_est = 2.0 * lp_norm(subtract(v, v_half), u_c, Norm::L2);
        const double difference_est = lp_norm(subtract(v_wide, v), u_c, Norm::L2) / 3.0;
        level.w_norm = r.w_norm;
        level.w_budget = c.flow.z_abs() * r.heat_tension + 2.0 * (integrator_est + difference_est);
        ctx.note("w_integrator_estimate_" + tag, integrator_est);
        ctx.note("w_difference_estimate_" + tag, difference_est);
        ctx.note("heat_tension_" + tag, r.heat_tension);
    }

    ctx.note("transport_norm_drift_" + tag, rep.max_norm_drift);
    if (!primary) return level;

    ctx.check("At_at_s_max", 6, at_end, "<=", 3.0 * c.tower.tail_tol, "max |A_t| at the end of the tower (frame route)");
    {
        const std::vector<std::vector<double>> at_int = time_connection_from_integral(Tb, Tc, Ta, Fb, Fc, Fa, dt);
        const std::vector<double> at_frame = connection_between(Fb[0], u_b, Fa[0], u_a, 2.0 * dt);
        ctx.note("At_two_route_gap", interior_l2(g, at_frame, at_int[0]));
        ctx.note("At_norm", interior_l2(g, at_frame, {}));
    }
    double as_max = 0.0;
    for (std::size_t k = 0; k + 1 < Tc.u.size(); ++k) {
        for (double v : connection_between(Fc[k], Tc.u[k], Fc[k + 1], Tc.u[k + 1], Tc.s[k + 1] - Tc.s[k])) {
            as_max = std::max(as_max, std::abs(v));
        }
    }
    ctx.check("A_s_vanishes", 0, as_max, "<=", 1e-6, "max |<nabla_s e1, J e1>| of the transported frame");

    // Evolution equations along s, with the curvature-term ablation.
    for (std::size_t k : {std::size_t{3}, std::size_t{10}, std::size_t{30}}) {
        if (k + 2 >= Tc.u.size()) continue;
        const EvolutionResiduals e = evolution_residuals(Tb, Tc, Ta, Fb, Fc, Fa, dt, k, c.flow);
        CsvTable& et = ctx.table("evolution.csv", {"s", "phis_equation", "phis_without_curvature", "w_equation", "phis_scale"});
        et.add_row({Tc.s[k], e.phis_equation, e.phis_without_curvature, e.w_equation, e.phis_scale});
        ctx.check("curvature_term_needed_k" + std::to_string(k), 0, e.phis_without_curvature, ">", e.phis_equation,
                  "dropping the curvature term raises the D_t phi_s residual");
    }

    const BochnerReport br = bochner_monitor(Tc);
    ctx.note("bochner_K_empirical", br.K_empirical, "smallest K in the Bochner inequality for |du|^2");
    const TimeBochnerReport tb = bochner_time_monitor(Tb, Ta, 2.0 * dt);
    ctx.note("time_bochner_lhs_normalized", tb.lhs_normalized);
    return level;
}

void run_gauge_check(Context& ctx) {
    const ScenarioConfig& c = ctx.config();
    const Grid base = c.grid.make();
    const GaugeLevel lv = gauge_level(ctx, base, true);
    ctx.check("w_within_budget_n" + std::to_string(base.n1), 5, lv.w_norm, "<=", lv.w_budget,
              "|w| with u_t from the trajectory against |z| |phi_s - H| + integrator estimate");

    // Documented budget of the two-route gap: 0.01 |A| (h1^2 + h2^2) + ds^2 + tail bound.
    const double h2 = base.h1 * base.h1 + base.h2 * base.h2;
    const double budget = 0.01 * lv.gap.a_norm * h2 + c.tower.ds * c.tower.ds + lv.gap.tail_bound;
    ctx.note("connection_norm", lv.gap.a_norm);
    ctx.check("two_route_gap", 6, lv.gap.gap, "<=", budget, "L2 gap of (A1, A2) at s = 0 against the budget");
    {
        TowerSpec finer = c.tower;
        finer.scale *= 0.5;
        const MapField& u_c = *lv.center;
        const GapResult ds_half = connection_gap(u_c, finer, 1e-3 * c.tower.tail_tol);
        ctx.check("two_route_gap_ds_halved", 6, ds_half.gap, "<", lv.gap.gap, "gap with every s-step halved");
        TowerSpec tighter = c.tower;
        tighter.tail_tol *= 0.1;
        const GapResult tail = connection_gap(u_c, tighter, 1e-3 * tighter.tail_tol);
        ctx.check("two_route_gap_tail_tightened", 6, tail.gap, "<", lv.gap.gap, "gap with the tail tolerance / 10");
    }

    if (!c.options.refine) return;
    const Grid fine = base.refined();
    const GaugeLevel lf = gauge_level(ctx, fine, false);
    ctx.check("w_within_budget_n" + std::to_string(fine.n1), 5, lf.w_norm, "<=", lf.w_budget,
              "|w| with u_t from the trajectory against |z| |phi_s - H| + integrator estimate");
    ctx.check("two_route_gap_h_halved", 6, lf.gap.gap, "<", lv.gap.gap, "gap on the refined grid");

    // Compare the bundles at shared checkpoints of the two towers.
    const std::size_t K = std::min(lv.s.size(), lf.s.size());
    double torsion_ratio = std::numeric_limits<double>::infinity(), commutator_ratio = torsion_ratio;
    for (std::size_t k : {std::size_t{0}, K / 4, K / 2, 3 * K / 4, K - 1}) {
        torsion_ratio = std::min(torsion_ratio, lv.torsion[k] / lf.torsion[k]);
        commutator_ratio = std::min(commutator_ratio, lv.commutator[k] / lf.commutator[k]);
    }
    ctx.check("torsion_refinement_ratio", 5, torsion_ratio, ">=", 3.0, "min over sampled s of torsion(h) / torsion(h/2)");
    ctx.check("commutator_refinement_ratio", 5, commutator_ratio, ">=", 3.0,
              "min over sampled s of commutator(h) / commutator(h/2)");
}

// ---------------------------------------------------------------------------
// mcgahagan_delta: damped wave approximation against the LL flow

void run_mcgahagan(Context& ctx) {
    const ScenarioConfig& c = ctx.config();
    const Grid g = c.grid.make();
    const MapField u0 = initial_map(c, g);
    const double T = c.run.t_final;

    EvolveOptions ref_opts;
    ref_opts.integrator = Integrator::RK4;
    ref_opts.checkpoint_every = c.run.checkpoint_every;
    ref_opts.on_checkpoint = run_recorder(ctx, c.flow, "", false);
    ref_opts.keep_trajectory = false;
    const FlowState ref = evolve(FlowState{u0, {}, 0.0}, c.flow, T, ref_opts).back();
    ctx.note("reference_dt", cfl_dt(g, c.flow));

    std::vector<double> deltas = c.options.deltas;
    std::sort(deltas.begin(), deltas.end(), std::greater<>());
    std::vector<double> dist;
    CsvTable& table = ctx.table("delta.csv", {"delta", "dt", "sup_distance", "E1_final"});
    for (double delta : deltas) {
        FlowParams p = c.flow;
        p.delta = delta;
        EvolveOptions wo;
        wo.equation = Equation::Wave;
        wo.integrator = Integrator::RK4;
        wo.checkpoint_every = c.run.checkpoint_every;
        wo.keep_trajectory = false;
        const FlowState w = evolve(FlowState{u0, {}, 0.0}, p, T, wo).back();
        dist.push_back(sup_distance(w.u, ref.u));
        table.add_row({delta, wave_dt(g, p), dist.back(), dirichlet_energy(w.u)});
        ctx.log("delta = " + format_double(delta) + ": sup_distance = " + format_double(dist.back()));
    }
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k + 1 < dist.size(); ++k) worst = std::max(worst, dist[k + 1] / dist[k]);
    ctx.check("distance_decreases_with_delta", 9, worst, "<", 1.0,
              "largest ratio of consecutive sup_distances as delta decreases");
}

// ---------------------------------------------------------------------------
// kernel_check: semigroup smoothing of an interior bump

ScalarField bump_function(const Grid& g, const BumpSpec& bump) {
    return scalar_from_function(g, [&](const ChartPoint& x) {
        const double q = geodesic_distance(x, bump.center) / bump.radius;
        return q < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - q * q)) : 0.0;
    });
}

void run_kernel_check(Context& ctx) {
    const ScenarioConfig& c = ctx.config();
    const Grid base = c.grid.make();
    std::vector<Grid> grids = {base};
    if (c.options.refine) grids.push_back(base.refined());
    SemigroupOptions so;
    so.ds = c.options.semigroup_ds;

    std::vector<double> max_ratio;
    for (std::size_t level = 0; level < grids.size(); ++level) {
        const ScalarField f = bump_function(grids[level], c.perturbation);
        const SmoothingReport r = smoothing_diagnostics(f, c.options.s_samples, so);
        CsvTable& t = ctx.table(level == 0 ? "kernel.csv" : "kernel_refined.csv", kKernelColumns);
        for (const SmoothingRow& row : r.rows) t.add_row({row.s, row.sup_norm, row.l1_norm, row.envelope, row.ratio});
        max_ratio.push_back(r.max_ratio);
        const std::string tag = "n" + std::to_string(grids[level].n1) + "x" + std::to_string(grids[level].n2);
        ctx.note("max_ratio_" + tag, r.max_ratio);
        ctx.note("small_s_sup_ratio_" + tag, r.sup_ratio_small_s, "|e^{s0 Delta} f|_inf / |f|_inf at the first step");
        if (level == 0) {
            ctx.check("ratio_finite", 8, std::isfinite(r.max_ratio) ? 0.0 : 1.0, "<=", 0.0,
                      "every ratio over the sampled s is finite");
            ctx.check("lemma25_tail_fraction", 8, r.tail_fraction, "<", 0.1,
                      "(I(2S) - I(S)) / I(2S) for the largest sample S");
            CsvTable& it = ctx.table("lemma25.csv", {"S", "integral"});
            for (std::size_t k = 0; k < r.integral_s.size(); ++k) it.add_row({r.integral_s[k], r.integral_value[k]});
            double min_value = 0.0;
            for (double v : apply_heat_semigroup(f, c.options.s_samples.back(), so).values) {
                min_value = std::min(min_value, v);
            }
            ctx.check("semigroup_positive", 0, min_value, ">=", -1e-12, "min of e^{s Delta} f for f >= 0");
        }
    }
    for (double t : {0.5, 1.0, 4.0}) ctx.note("envelope_peak_t" + format_double(t), kernel_envelope_peak(t));
    if (max_ratio.size() == 2) {
        ctx.check("max_ratio_refinement_change", 8, std::abs(max_ratio[1] - max_ratio[0]) / max_ratio[0], "<=", 0.2,
                  "relative change of the max ratio under one refinement");
    }
}

json property_json(const Property& p) {
    return json{{"name", p.name},          {"criterion", p.criterion}, {"asserted", p.asserted},
                {"pass", p.pass},          {"value", json_number(p.value)}, {"relation", p.relation},
                {"threshold", json_number(p.threshold)}, {"detail", p.detail}};
}

}  // namespace

std::string scenario_description(const std::string& name) {
    static const std::map<std::string, std::string> text = {
        {"stationary", "heat flow started at the harmonic map Q; drift against the discretization floor"},
        {"heat_relax", "heat tower of Q + bump; maximum principle and exponential decay of |d_s u|"},
        {"theorem1", "LL flow from Q + bump; energy identity, convergence to the heat-flow limit, time tails"},
        {"gauge_check", "caloric gauge at one time of the LL flow; gauge identities and two-route connection"},
        {"lemma36_sametower", "heat towers from three times of one LL run share their limit"},
        {"mcgahagan_delta", "damped wave approximation of the LL flow as delta decreases"},
        {"kernel_check", "heat semigroup smoothing of an interior bump against the kernel envelope"},
    };
    auto it = text.find(name);
    return it == text.end() ? std::string() : it->second;
}

ScenarioResult run_scenario(const ScenarioConfig& config, const RunOptions& options) {
    ScenarioResult result;
    json summary = {{"schema_version", 1}, {"scenario", config.scenario}, {"config", config_to_json(config)}};
    std::unique_ptr<Context> ctx;
    try {
        ctx = std::make_unique<Context>(config, options);
        const std::string& name = config.scenario;
        if (name == "stationary") {
            run_stationary(*ctx);
        } else if (name == "heat_relax") {
            run_heat_relax(*ctx);
        } else if (name == "theorem1") {
            run_theorem1(*ctx);
        } else if (name == "gauge_check") {
            run_gauge_check(*ctx);
        } else if (name == "lemma36_sametower") {
            run_lemma36(*ctx);
        } else if (name == "mcgahagan_delta") {
            run_mcgahagan(*ctx);
        } else if (name == "kernel_check") {
            run_kernel_check(*ctx);
        } else {
            throw ConfigError("unknown scenario '" + name + "'");
        }
        bool all = true;
        for (const Property& p : ctx->properties()) all = all && (p.pass || !p.asserted);
        result.exit_code = all ? kExitPass : kExitPropertyFailure;
    } catch (const ConfigError& e) {
        result.exit_code = kExitConfigError;
        result.error = e.what();
    } catch (const DomainError& e) {
        result.exit_code = kExitConfigError;
        result.error = e.what();
    } catch (const std::exception& e) {
        result.exit_code = kExitNumericalFailure;
        result.error = e.what();
    }
    if (ctx) {
        result.properties = ctx->properties();
        json props = json::array();
        for (const Property& p : result.properties) props.push_back(property_json(p));
        summary["properties"] = props;
        summary["diagnostics"] = ctx->diagnostics();
    }
    static const char* status[] = {"pass", "config_error", "numerical_failure", "property_failure"};
    summary["status"] = status[result.exit_code];
    summary["exit_code"] = result.exit_code;
    if (!result.error.empty()) summary["error"] = result.error;
    result.summary = summary;
    if (ctx) {
        try {
            ctx->flush_tables();
            ctx->write_summary(summary);
        } catch (const std::exception& e) {
            if (result.exit_code == kExitPass) result.exit_code = kExitNumericalFailure;
            result.error = std::string("writing outputs failed: ") + e.what();
        }
    }
    return result;
}

}  // namespace hyperflow
