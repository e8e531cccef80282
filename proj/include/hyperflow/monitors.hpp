#pragma once

#include <vector>

#include "hyperflow/flows.hpp"
#include "hyperflow/tower.hpp"

namespace hyperflow {

// 1/2 int |du|^2 with difference quotients on grid edges: each edge carries
// the volume weight at its midpoint and e^{-2 u2} at the mean of its end values.
// Its gradient reproduces the compact second differences of tension_field, so
// the discrete dissipation identity holds to high accuracy.
double dirichlet_energy(const MapField& u);

struct EnergyReport {
    double t = 0.0;
    double E1 = 0.0;
    double E2 = 0.0;  // 1/2 |u_t|^2
    double E3 = 0.0;  // 1/2 |nabla u_t|^2
    double tau_l2 = 0.0;
    double dissipation_residual = 0.0;  // |dE1/dt + alpha <|tau|^2>|, zero without a previous state
    double dissipation_scale = 0.0;     // alpha <|tau|^2>, the trapezoid mean over the interval
};

enum class VelocitySource { Rhs, Difference };

// u_t is the discrete right-hand side by default (the carried velocity for the
// wave scheme); VelocitySource::Difference uses (u - prev.u) / (t - prev.t).
EnergyReport energy_report(const FlowState& state, const FlowState* prev, const FlowParams& params,
                           Equation equation = Equation::LandauLifshitz,
                           VelocitySource source = VelocitySource::Rhs);

struct BochnerReport {
    std::vector<double> s;
    std::vector<double> sup_ds;      // max_x |d_s u|_g
    double max_increase = 0.0;       // largest sup_ds[k+1] - sup_ds[k]
    double lhs_sq_max = 0.0;         // max of (d_s - Delta)|d_s u|^2 + 2 |nabla d_s u|^2
    double lhs_sq_normalized = 0.0;  // the same divided by max(|Delta|d_s u|^2| + 2 |nabla d_s u|^2)
    double lhs_abs_normalized = 0.0; // (d_s - Delta)|d_s u| over nodes where |d_s u| > 1e-3 max
    double K_empirical = 0.0;        // smallest K with (d_s - Delta)|du|^2 + 2 |nabla du|^2 <= K e(u)
};

// Interior nodes two rings away from the boundary; backward differences in s
// with the spatial terms at the later checkpoint.
BochnerReport bochner_monitor(const HeatTower& tower);

struct TimeBochnerReport {
    std::vector<double> sup_dt;      // max_x |d_t u|_g along s
    double lhs_normalized = 0.0;     // (d_s - Delta)|d_t u|^2 + |nabla d_t u|^2, normalized as above
};

// d_t u from two towers on the same s-grid started from states `dt` apart.
TimeBochnerReport bochner_time_monitor(const HeatTower& a, const HeatTower& b, double dt);

}  // namespace hyperflow
