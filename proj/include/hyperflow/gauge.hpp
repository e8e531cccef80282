#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "hyperflow/flows.hpp"
#include "hyperflow/grid.hpp"
#include "hyperflow/tower.hpp"

namespace hyperflow {

using ComplexField = std::vector<std::complex<double>>;

// First leg of an orthonormal frame along a map; the second leg is J e1.
struct Frame {
    TangentField e1;
};

Frame theta_frame(const MapField& u);
TangentField second_leg(const Frame& frame, const MapField& u);

struct TransportReport {
    double max_norm_drift = 0.0;  // largest ||e1|_g - 1| over all checkpoints
};

// Solves nabla_s e1 = 0 backward along the tower from the seed at the last
// checkpoint. In Theta coordinates e1 = cos(theta) Theta_1 + sin(theta) Theta_2
// and the equation is theta_s = -e^{-u2} d_s u1, integrated by the midpoint rule,
// so the frame stays unit length. Throws NumericalError if the seed is not unit.
std::vector<Frame> transport_frame(const HeatTower& tower, const Frame& seed, TransportReport* report = nullptr);

// Per-node angle chi with U e1 = Theta_1(Q) in Theta coordinates, where
// U e1 = cos(chi) e1 + sin(chi) J e1.
ScalarField limit_gauge_rotation(const Frame& frame_at_smax, const MapField& u_at_smax, const MapField& Q);
Frame rotate_frame(const Frame& frame, const MapField& u, const ScalarField& chi);

// phi = <X, e1> + i <X, J e1>
ComplexField differential_field(const TangentField& X, const Frame& frame, const MapField& u);
TangentField coordinate_derivative(const MapField& u, int dir);

// <nabla_i e1, J e1> along a grid direction.
std::vector<double> connection_from_frame(const Frame& frame, const MapField& u, int dir);
// <nabla e1, J e1> along a parameter (s or t) from two samples a, b at distance `step`,
// evaluated at their midpoint: (theta_b - theta_a + e^{-u2} (u1_b - u1_a)) / step.
std::vector<double> connection_between(const Frame& fa, const MapField& ua, const Frame& fb, const MapField& ub,
                                       double step);

double wedge(const std::complex<double>& a, const std::complex<double>& b);

// Spatial connection from the curvature integral
//   A_i(s_k) = A_i^Xi - sum_{m >= k} ds_m (phi_s ^ phi_i)(s_{m+1/2}),
// with the boundary term A_i^Xi = <nabla_i Theta_1(Q), J Theta_1(Q)>. Midpoint
// values use the averaged map and frame; phi_s uses the checkpoint difference quotient.
struct IntegralConnection {
    std::vector<std::vector<double>> A1;  // one per checkpoint
    std::vector<std::vector<double>> A2;
    double tail_bound = 0.0;
};
IntegralConnection connection_from_integral(const HeatTower& tower, const std::vector<Frame>& frames,
                                            const MapField& Q);

// A_t(s_k) = - sum_{m >= k} ds_m (phi_s ^ phi_t)(s_{m+1/2}) on the middle of three
// towers at t - dt, t, t + dt sharing one s-grid (phi_t by central differences).
std::vector<std::vector<double>> time_connection_from_integral(const HeatTower& before,
                                                               const HeatTower& center,
                                                               const HeatTower& after,
                                                               const std::vector<Frame>& frames_before,
                                                               const std::vector<Frame>& frames_center,
                                                               const std::vector<Frame>& frames_after, double dt);

struct GaugeBundle {
    Grid grid;
    ComplexField phi1, phi2, phit, phis;
    std::vector<double> A1, A2, At;
};

// Spatial fields at one map with its frame; phis from tension_field(u) and
// phit from `ut` when given (otherwise zero).
GaugeBundle make_bundle(const MapField& u, const Frame& frame, const TangentField* ut = nullptr);

struct GaugeResiduals {
    double torsion = 0.0;       // D1 phi2 - D2 phi1
    double commutator = 0.0;    // d1 A2 - d2 A1 - phi1 ^ phi2
    double w_norm = 0.0;        // phit - z H
    double heat_tension = 0.0;  // phis - H
    double At_limit = 0.0;      // max |At|
};

// H = h^{ij} D_i phi_j - h^{ij} Gamma^k_ij phi_k = e^{2x2} D1 phi1 + D2 phi2 - phi2.
ComplexField gauged_tension(const GaugeBundle& b);

// L2 norms over nodes away from the boundary ring, in invariant form
// (2-forms carry the factor e^{x2}).
GaugeResiduals gauge_residuals(const GaugeBundle& bundle, const FlowParams& params);

// Residuals of the evolution equations for phi_s and w at checkpoint k of the
// center tower, using towers at t - dt and t + dt on the same s-grid.
struct EvolutionResiduals {
    double phis_equation = 0.0;           // L2 residual of the D_t phi_s equation
    double phis_without_curvature = 0.0;  // same with the curvature term dropped
    double w_equation = 0.0;              // L2 residual of the d_s w equation
    double phis_scale = 0.0;              // L2 norm of D_t phi_s, for normalization
};
EvolutionResiduals evolution_residuals(const HeatTower& before, const HeatTower& center, const HeatTower& after,
                                       const std::vector<Frame>& frames_before,
                                       const std::vector<Frame>& frames_center,
                                       const std::vector<Frame>& frames_after, double dt, std::size_t k,
                                       const FlowParams& params);

}  // namespace hyperflow
