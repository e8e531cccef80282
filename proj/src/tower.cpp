#include "hyperflow/tower.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <sstream>

#include "hyperflow/errors.hpp"
#include "hyperflow/fields.hpp"
#include "hyperflow/flows.hpp"
#include "hyperflow/implicit_solver.hpp"

namespace hyperflow {

void TowerSpec::validate() const {
    if (!(ds > 0.0) || !std::isfinite(ds)) throw DomainError("TowerSpec: ds must be > 0");
    if (!(ds_growth >= 1.0) || !std::isfinite(ds_growth)) throw DomainError("TowerSpec: ds_growth must be >= 1");
    if (!(ds_max >= ds)) throw DomainError("TowerSpec: ds_max must be >= ds");
    if (!(s_max > 0.0) || !std::isfinite(s_max)) throw DomainError("TowerSpec: s_max must be > 0");
    if (ds > s_max) throw DomainError("TowerSpec: ds must not exceed s_max");
    if (!(tail_tol > 0.0)) throw DomainError("TowerSpec: tail_tol must be > 0");
    if (!(scale > 0.0) || !std::isfinite(scale)) throw DomainError("TowerSpec: scale must be > 0");
}

double TowerSpec::step(std::size_t k) const {
    return scale * std::min(ds * std::pow(ds_growth, static_cast<double>(k)), ds_max);
}

namespace {

double sup_norm(const TangentField& X, const MapField& u) { return lp_norm(X, u, Norm::Linf); }

// Semi-implicit heat steps; factorizations are cached per distinct step size.
class HeatStepper {
public:
    explicit HeatStepper(const Grid& g) : grid_(g) {}

    // Returns u advanced by ds, given its precomputed tension field.
    MapField advance(const MapField& u, const TangentField& tau, double ds) {
        auto it = solvers_.find(ds);
        if (it == solvers_.end()) {
            if (solvers_.size() > 8) solvers_.clear();
            it = solvers_.emplace(ds, std::make_unique<ImplicitLaplacian>(grid_, ds)).first;
        }
        std::vector<double> d1 = tau.X1;
        std::vector<double> d2 = tau.X2;
        for (std::size_t k = 0; k < d1.size(); ++k) {
            d1[k] *= ds;
            d2[k] *= ds;
        }
        it->second->solve(d1);
        it->second->solve(d2);
        MapField out = u;
        for (std::size_t k = 0; k < d1.size(); ++k) {
            out.u1[k] += d1[k];
            out.u2[k] += d2[k];
        }
        require_finite(out, "heat step");
        return out;
    }

private:
    Grid grid_;
    std::map<double, std::unique_ptr<ImplicitLaplacian>> solvers_;
};

}  // namespace

double log_linear_slope(const std::vector<double>& s, const std::vector<double>& values, double s_lo,
                        double s_hi) {
    double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t k = 0; k < s.size(); ++k) {
        if (s[k] < s_lo || s[k] > s_hi || !(values[k] > 0.0)) continue;
        const double y = std::log(values[k]);
        n += 1;
        sx += s[k];
        sy += y;
        sxx += s[k] * s[k];
        sxy += s[k] * y;
    }
    const double den = n * sxx - sx * sx;
    if (n < 2 || den <= 0.0) return 0.0;
    return (n * sxy - sx * sy) / den;
}

namespace {

// Appends checkpoints until `done` holds for the newest one. The tower must
// already contain its first checkpoint.
template <class Done>
void run_tower(HeatTower& tower, const TowerSpec& spec, Done done) {
    HeatStepper stepper(tower.u[0].grid);
    MapField u = tower.u.back();
    double s = tower.s.back();
    TangentField tau = tension_field(u);
    for (std::size_t k = tower.s.size() - 1;; ++k) {
        const double sup = tower.sup_ds.back();
        // Fit the decay rate on the most recent unit of s (at least 4 checkpoints).
        double rate = 0.0;
        if (tower.s.size() >= 4) {
            const std::size_t first = tower.s.size() - 4;
            const double lo = std::min(tower.s[first], s - 1.0);
            rate = -log_linear_slope(tower.s, tower.sup_ds, lo, s);
        }
        tower.decay_rate = rate;
        tower.tail_bound = sup == 0.0 ? 0.0 : (rate > 0.0 ? sup / rate : INFINITY);
        if (done(tower)) return;
        const double ds = spec.step(k);
        if (s + ds > spec.s_max * (1.0 + 1e-12)) {
            std::ostringstream msg;
            msg << "tower not converged: max|d_s u| = " << sup << " at s = " << s << " (s_max = " << spec.s_max
                << ", tail tolerance = " << spec.tail_tol << ")";
            throw NumericalError(msg.str());
        }
        u = stepper.advance(u, tau, ds);
        s += ds;
        tau = tension_field(u);
        tower.s.push_back(s);
        tower.u.push_back(u);
        tower.sup_ds.push_back(sup_norm(tau, u));
    }
}

}  // namespace

HeatTower build_heat_tower(const MapField& u0, const TowerSpec& spec, double source_time, double min_s_end) {
    spec.validate();
    HeatTower tower;
    tower.source_time = source_time;
    tower.s.push_back(0.0);
    tower.u.push_back(u0);
    tower.sup_ds.push_back(sup_norm(tension_field(u0), u0));
    run_tower(tower, spec, [&](const HeatTower& t) {
        const double sup = t.sup_ds.back();
        return sup == 0.0 || (sup < spec.tail_tol && t.tail_bound < spec.tail_tol && t.s.back() >= min_s_end);
    });
    return tower;
}

void extend_heat_tower(HeatTower& tower, const TowerSpec& spec, double s_end) {
    spec.validate();
    run_tower(tower, spec, [&](const HeatTower& t) { return t.s.back() >= s_end * (1.0 - 1e-12); });
}

void align_towers(const std::vector<HeatTower*>& towers, const TowerSpec& spec) {
    double end = 0.0;
    for (const HeatTower* t : towers) end = std::max(end, t->s_end());
    for (HeatTower* t : towers) extend_heat_tower(*t, spec, end);
}

MapField heat_limit(const MapField& u0, double tol, double s_cap, double* achieved) {
    HeatStepper stepper(u0.grid);
    MapField u = u0;
    double s = 0.0;
    TangentField tau = tension_field(u);
    double sup = sup_norm(tau, u);
    double best = sup;
    int stalled = 0;
    // Below the round-off floor of the stencil the residual stops decreasing;
    // accept the map there if the floor is within kFloorSlack of tol.
    constexpr int kStallSteps = 10;
    constexpr double kFloorSlack = 1e3;
    while (sup >= tol) {
        if (stalled >= kStallSteps && sup < kFloorSlack * tol) break;
        if (s > s_cap || stalled >= kStallSteps) {
            std::ostringstream msg;
            msg << "heat_limit: tolerance " << tol << " not reached (max|tau| = " << sup << " at s = " << s << ")";
            throw NumericalError(msg.str());
        }
        u = stepper.advance(u, tau, 1.0);
        s += 1.0;
        tau = tension_field(u);
        sup = sup_norm(tau, u);
        if (sup < 0.99 * best) {
            best = sup;
            stalled = 0;
        } else {
            ++stalled;
        }
    }
    if (achieved) *achieved = sup;
    return u;
}

}  // namespace hyperflow
