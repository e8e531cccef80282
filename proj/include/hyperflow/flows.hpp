#pragma once

#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "hyperflow/grid.hpp"

namespace hyperflow {

class ImplicitLaplacian;

struct FlowParams {
    double alpha = 1.0;
    double beta = 0.0;
    double delta = 1.0;  // wave scheme only
    double cfl = 0.9;    // safety factor c in (0, 1]

    double z_abs() const;
    void validate_ll() const;
    void validate_wave() const;
};

// u_t is carried only by the wave scheme.
struct FlowState {
    MapField u;
    TangentField ut;
    double t = 0.0;
};

enum class Equation { LandauLifshitz, Wave };

// RK4 is the classical explicit scheme. SemiImplicit is the linearly implicit
// Euler step (I - dt k L)(u^{n+1} - u^n) = dt F(u^n), with L the scalar
// Laplace-Beltrami operator and k = |z|^2 / alpha; it is used for long runs
// where the explicit step limit is too small.
enum class Integrator { RK4, SemiImplicit };

// alpha tau - beta J tau, zero on the boundary ring.
TangentField ll_rhs(const MapField& u, const FlowParams& params);
TangentField heat_rhs(const MapField& u);

// First-order form of delta nabla_t u_t - alpha tau + c1 J u_t + c2 u_t = 0 with
// c1 = alpha beta / |z|^2 and c2 = alpha^2 / |z|^2. Returns (du/dt, du_t/dt).
std::pair<TangentField, TangentField> wave_rhs(const FlowState& state, const FlowParams& params);

// Initial velocity for the wave scheme: ll_rhs(u0), for which the damping
// terms balance alpha tau exactly.
TangentField wave_initial_velocity(const MapField& u0, const FlowParams& params);

// min(h1, h2)^2 / (2 |z| max e^{2 x2}); multiply by params.cfl for the RK4 step.
double cfl_bound(const Grid& grid, const FlowParams& params);
double cfl_dt(const Grid& grid, const FlowParams& params);
// RK4 step for the wave system from the linearized spectrum at the largest
// Laplacian eigenvalue, scaled by params.cfl.
double wave_dt(const Grid& grid, const FlowParams& params);
// Upper estimate of the spectral radius of the discrete Laplace-Beltrami operator.
double laplacian_spectral_bound(const Grid& grid);

class Stepper {
public:
    Stepper(const Grid& grid, const FlowParams& params, Equation equation, Integrator integrator, double dt);
    ~Stepper();
    Stepper(const Stepper&) = delete;
    Stepper& operator=(const Stepper&) = delete;

    FlowState step(const FlowState& state) const;
    double dt() const { return dt_; }

private:
    FlowState rk4(const FlowState& s) const;
    FlowState semi_implicit(const FlowState& s) const;

    Grid grid_;
    FlowParams params_;
    Equation equation_;
    Integrator integrator_;
    double dt_;
    std::unique_ptr<ImplicitLaplacian> solver_;
};

// One RK4 step of the LL flow.
FlowState step(const FlowState& state, const FlowParams& params, double dt);

struct EvolveOptions {
    Equation equation = Equation::LandauLifshitz;
    Integrator integrator = Integrator::RK4;
    double dt = 0.0;                // 0 selects the stability-based default
    double checkpoint_every = 0.0;  // 0 keeps only the initial and final states
    // Called with every checkpoint, including t = 0 and the final state.
    std::function<void(const FlowState&)> on_checkpoint;
    bool keep_trajectory = true;  // false returns only the final state
};

// Checkpoint times are exact multiples of checkpoint_every; the step is
// shrunk so that an integer number of steps lands on each.
std::vector<FlowState> evolve(const FlowState& initial, const FlowParams& params, double T,
                              const EvolveOptions& options = {});

}  // namespace hyperflow
