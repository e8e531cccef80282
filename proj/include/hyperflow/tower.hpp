#pragma once

#include <vector>

#include "hyperflow/grid.hpp"

namespace hyperflow {

// Step k has size min(ds * growth^k, ds_max), all multiplied by `scale`, so
// towers built with the same spec share one s-grid.
struct TowerSpec {
    double ds = 0.01;
    double ds_growth = 1.05;
    double ds_max = 0.5;
    double s_max = 400.0;
    double tail_tol = 1e-8;
    double scale = 1.0;

    void validate() const;
    double step(std::size_t k) const;
};

// Heat-flow resolution s -> u(s) of a map, one checkpoint per step.
struct HeatTower {
    std::vector<double> s;
    std::vector<MapField> u;
    std::vector<double> sup_ds;  // max_x |d_s u|_g at each checkpoint (discrete RHS)
    double source_time = 0.0;
    double decay_rate = 0.0;     // fitted exponential rate of sup_ds near the end
    double tail_bound = 0.0;     // sup_ds(s_end) / decay_rate

    const MapField& limit() const { return u.back(); }
    double s_end() const { return s.back(); }
};

// Runs until sup_ds < tail_tol and tail_bound < tail_tol and s >= min_s_end.
// Throws NumericalError("tower not converged ...") if s_max is reached first.
HeatTower build_heat_tower(const MapField& u0, const TowerSpec& spec, double source_time = 0.0,
                           double min_s_end = 0.0);

// Continues the tower on its own s-grid until s_end() >= s_end.
void extend_heat_tower(HeatTower& tower, const TowerSpec& spec, double s_end);

// Extends every tower to the largest end point so they share one s-grid.
void align_towers(const std::vector<HeatTower*>& towers, const TowerSpec& spec);

// Continues the heat flow from `u` until max |tau|_g < tol, or until the
// residual stalls at the round-off floor within 1e3 * tol. The final max |tau|_g
// is stored in *achieved when given.
MapField heat_limit(const MapField& u, double tol, double s_cap = 2000.0, double* achieved = nullptr);

// Slope of a least-squares fit of log(values) against s over [s_lo, s_hi].
double log_linear_slope(const std::vector<double>& s, const std::vector<double>& values, double s_lo,
                        double s_hi);

}  // namespace hyperflow
