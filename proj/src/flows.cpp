#include "hyperflow/flows.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

#include "hyperflow/errors.hpp"
#include "hyperflow/fields.hpp"
#include "hyperflow/implicit_solver.hpp"

namespace hyperflow {

namespace {

void axpy(std::vector<double>& y, double a, const std::vector<double>& x) {
    for (std::size_t k = 0; k < y.size(); ++k) y[k] += a * x[k];
}

MapField shifted(const MapField& u, double a, const TangentField& d) {
    MapField out = u;
    axpy(out.u1, a, d.X1);
    axpy(out.u2, a, d.X2);
    return out;
}

TangentField shifted(const TangentField& v, double a, const TangentField& d) {
    TangentField out = v;
    axpy(out.X1, a, d.X1);
    axpy(out.X2, a, d.X2);
    return out;
}

}  // namespace

double FlowParams::z_abs() const { return std::hypot(alpha, beta); }

void FlowParams::validate_ll() const {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw DomainError("FlowParams: alpha must be > 0");
    if (!std::isfinite(beta)) throw DomainError("FlowParams: beta must be finite");
    if (!(cfl > 0.0) || cfl > 1.0) throw DomainError("FlowParams: cfl must lie in (0, 1]");
}

void FlowParams::validate_wave() const {
    validate_ll();
    if (!(delta > 0.0) || !std::isfinite(delta)) throw DomainError("FlowParams: delta must be > 0");
}

TangentField ll_rhs(const MapField& u, const FlowParams& params) {
    if (!(params.alpha >= 0.0)) throw DomainError("ll_rhs: alpha must be >= 0");
    const TangentField tau = tension_field(u);
    if (params.beta == 0.0) {
        if (params.alpha == 1.0) return tau;
        TangentField out(u.grid);
        for (std::size_t k = 0; k < u.grid.size(); ++k) {
            out.X1[k] = params.alpha * tau.X1[k];
            out.X2[k] = params.alpha * tau.X2[k];
        }
        return out;
    }
    TangentField out(u.grid);
    for (std::size_t k = 0; k < u.grid.size(); ++k) {
        // J(X1, X2) = (-e^{u2} X2, e^{-u2} X1)
        const double e = std::exp(u.u2[k]);
        const double j1 = -e * tau.X2[k];
        const double j2 = tau.X1[k] / e;
        out.X1[k] = params.alpha * tau.X1[k] - params.beta * j1;
        out.X2[k] = params.alpha * tau.X2[k] - params.beta * j2;
    }
    return out;
}

TangentField heat_rhs(const MapField& u) { return ll_rhs(u, FlowParams{1.0, 0.0, 1.0, 0.9}); }

std::pair<TangentField, TangentField> wave_rhs(const FlowState& state, const FlowParams& params) {
    params.validate_wave();
    const MapField& u = state.u;
    const TangentField& v = state.ut;
    const double z2 = params.alpha * params.alpha + params.beta * params.beta;
    const double c1 = params.alpha * params.beta / z2;
    const double c2 = params.alpha * params.alpha / z2;
    const TangentField tau = tension_field(u);
    TangentField dv(u.grid);
    const Grid& g = u.grid;
    for (int j = 1; j < g.n2 - 1; ++j) {
        for (int i = 1; i < g.n1 - 1; ++i) {
            const std::size_t k = g.index(i, j);
            const double e = std::exp(u.u2[k]);
            const double jv1 = -e * v.X2[k];
            const double jv2 = v.X1[k] / e;
            const double a1 = (params.alpha * tau.X1[k] - c1 * jv1 - c2 * v.X1[k]) / params.delta;
            const double a2 = (params.alpha * tau.X2[k] - c1 * jv2 - c2 * v.X2[k]) / params.delta;
            // Gamma(v, v): component 1 is -2 v1 v2, component 2 is e^{-2 u2} v1^2.
            dv.X1[k] = a1 + 2.0 * v.X1[k] * v.X2[k];
            dv.X2[k] = a2 - v.X1[k] * v.X1[k] / (e * e);
        }
    }
    TangentField du = v;
    for (int j = 0; j < g.n2; ++j) {
        for (int i = 0; i < g.n1; ++i) {
            if (g.on_boundary(i, j)) {
                du.X1[g.index(i, j)] = 0.0;
                du.X2[g.index(i, j)] = 0.0;
            }
        }
    }
    return {du, dv};
}

TangentField wave_initial_velocity(const MapField& u0, const FlowParams& params) {
    return ll_rhs(u0, params);
}

double laplacian_spectral_bound(const Grid& grid) {
    return 4.0 * (std::exp(2.0 * grid.x2_max) / (grid.h1 * grid.h1) + 1.0 / (grid.h2 * grid.h2));
}

double cfl_bound(const Grid& grid, const FlowParams& params) {
    const double h = std::min(grid.h1, grid.h2);
    return h * h / (2.0 * params.z_abs() * std::exp(2.0 * grid.x2_max));
}

double cfl_dt(const Grid& grid, const FlowParams& params) { return params.cfl * cfl_bound(grid, params); }

double wave_dt(const Grid& grid, const FlowParams& params) {
    params.validate_wave();
    // Frozen coefficients with J acting as i: mu^2 + (c2 + i c1) mu / delta + alpha lambda / delta = 0
    // for every Laplacian eigenvalue -lambda. Scan lambda up to the bound.
    const double z2 = params.alpha * params.alpha + params.beta * params.beta;
    const std::complex<double> damp(params.alpha * params.alpha / z2, params.alpha * params.beta / z2);
    const double lmax = laplacian_spectral_bound(grid);
    double mu_max = 0.0;
    for (int k = 0; k <= 400; ++k) {
        const double lambda = lmax * std::pow(10.0, -8.0 * (1.0 - k / 400.0));
        const std::complex<double> b = damp / params.delta;
        const std::complex<double> c = params.alpha * lambda / params.delta;
        const std::complex<double> disc = std::sqrt(b * b - 4.0 * c);
        mu_max = std::max({mu_max, std::abs(0.5 * (-b + disc)), std::abs(0.5 * (-b - disc))});
    }
    // 2.5 lies inside the RK4 stability region in every left half-plane direction.
    return params.cfl * 2.5 / mu_max;
}

Stepper::Stepper(const Grid& grid, const FlowParams& params, Equation equation, Integrator integrator, double dt)
    : grid_(grid), params_(params), equation_(equation), integrator_(integrator), dt_(dt) {
    if (equation == Equation::Wave) {
        params.validate_wave();
        if (integrator != Integrator::RK4) throw DomainError("Stepper: the wave system supports RK4 only");
    } else {
        params.validate_ll();
    }
    if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("Stepper: dt must be > 0");
    if (integrator == Integrator::RK4) {
        FlowParams unit = params;
        unit.cfl = 1.0;
        const double limit = equation == Equation::Wave ? wave_dt(grid, unit) : cfl_bound(grid, params);
        if (dt > limit * (1.0 + 1e-12)) {
            throw DomainError("Stepper: dt = " + std::to_string(dt) + " exceeds the RK4 stability bound " +
                              std::to_string(limit));
        }
    }
    if (integrator == Integrator::SemiImplicit) {
        const double kappa = (params.alpha * params.alpha + params.beta * params.beta) / params.alpha;
        solver_ = std::make_unique<ImplicitLaplacian>(grid, dt * kappa);
    }
}

Stepper::~Stepper() = default;

FlowState Stepper::step(const FlowState& state) const {
    if (state.u.grid != grid_) throw DomainError("Stepper::step: grid mismatch");
    FlowState next = integrator_ == Integrator::RK4 ? rk4(state) : semi_implicit(state);
    next.t = state.t + dt_;
    require_finite(next.u, "step");
    if (equation_ == Equation::Wave) require_finite(next.ut, "step");
    return next;
}

FlowState Stepper::rk4(const FlowState& s) const {
    const double h = dt_;
    FlowState out = s;
    if (equation_ == Equation::LandauLifshitz) {
        const TangentField k1 = ll_rhs(s.u, params_);
        const TangentField k2 = ll_rhs(shifted(s.u, 0.5 * h, k1), params_);
        const TangentField k3 = ll_rhs(shifted(s.u, 0.5 * h, k2), params_);
        const TangentField k4 = ll_rhs(shifted(s.u, h, k3), params_);
        for (std::size_t k = 0; k < grid_.size(); ++k) {
            out.u.u1[k] += h / 6.0 * (k1.X1[k] + 2.0 * k2.X1[k] + 2.0 * k3.X1[k] + k4.X1[k]);
            out.u.u2[k] += h / 6.0 * (k1.X2[k] + 2.0 * k2.X2[k] + 2.0 * k3.X2[k] + k4.X2[k]);
        }
        return out;
    }
    auto stage = [&](const FlowState& base, double a, const std::pair<TangentField, TangentField>& d) {
        FlowState st;
        st.u = shifted(base.u, a, d.first);
        st.ut = shifted(base.ut, a, d.second);
        return st;
    };
    const auto k1 = wave_rhs(s, params_);
    const auto k2 = wave_rhs(stage(s, 0.5 * h, k1), params_);
    const auto k3 = wave_rhs(stage(s, 0.5 * h, k2), params_);
    const auto k4 = wave_rhs(stage(s, h, k3), params_);
    for (std::size_t k = 0; k < grid_.size(); ++k) {
        out.u.u1[k] += h / 6.0 * (k1.first.X1[k] + 2.0 * k2.first.X1[k] + 2.0 * k3.first.X1[k] + k4.first.X1[k]);
        out.u.u2[k] += h / 6.0 * (k1.first.X2[k] + 2.0 * k2.first.X2[k] + 2.0 * k3.first.X2[k] + k4.first.X2[k]);
        out.ut.X1[k] +=
            h / 6.0 * (k1.second.X1[k] + 2.0 * k2.second.X1[k] + 2.0 * k3.second.X1[k] + k4.second.X1[k]);
        out.ut.X2[k] +=
            h / 6.0 * (k1.second.X2[k] + 2.0 * k2.second.X2[k] + 2.0 * k3.second.X2[k] + k4.second.X2[k]);
    }
    return out;
}

FlowState Stepper::semi_implicit(const FlowState& s) const {
    TangentField f = ll_rhs(s.u, params_);
    for (std::size_t k = 0; k < grid_.size(); ++k) {
        f.X1[k] *= dt_;
        f.X2[k] *= dt_;
    }
    solver_->solve(f.X1);
    solver_->solve(f.X2);
    FlowState out = s;
    axpy(out.u.u1, 1.0, f.X1);
    axpy(out.u.u2, 1.0, f.X2);
    return out;
}

FlowState step(const FlowState& state, const FlowParams& params, double dt) {
    return Stepper(state.u.grid, params, Equation::LandauLifshitz, Integrator::RK4, dt).step(state);
}

std::vector<FlowState> evolve(const FlowState& initial, const FlowParams& params, double T,
                              const EvolveOptions& options) {
    if (!(T >= 0.0) || !std::isfinite(T)) throw DomainError("evolve: T must be >= 0");
    const Grid& grid = initial.u.grid;
    double dt = options.dt;
    if (dt <= 0.0) {
        if (options.equation == Equation::Wave) {
            dt = wave_dt(grid, params);
        } else if (options.integrator == Integrator::RK4) {
            params.validate_ll();
            dt = cfl_dt(grid, params);
        } else {
            throw DomainError("evolve: the semi-implicit integrator needs an explicit dt");
        }
    }
    const double every = options.checkpoint_every > 0.0 ? std::min(options.checkpoint_every, T) : T;
    std::vector<FlowState> trajectory;
    auto emit = [&](const FlowState& s) {
        if (options.on_checkpoint) options.on_checkpoint(s);
        if (options.keep_trajectory) trajectory.push_back(s);
    };
    FlowState state = initial;
    if (options.equation == Equation::Wave && state.ut.X1.size() != grid.size()) {
        state.ut = wave_initial_velocity(state.u, params);
    }
    emit(state);
    if (T == 0.0) return {state};
    const long n_checkpoints = std::max(1L, std::lround(T / every));
    const long steps_per = std::max(1L, static_cast<long>(std::ceil(every / dt - 1e-9)));
    const double dt_eff = (T / n_checkpoints) / steps_per;
    Stepper stepper(grid, params, options.equation, options.integrator, dt_eff);
    const double t0 = initial.t;
    for (long c = 1; c <= n_checkpoints; ++c) {
        for (long k = 0; k < steps_per; ++k) state = stepper.step(state);
        state.t = t0 + T * static_cast<double>(c) / static_cast<double>(n_checkpoints);
        emit(state);
    }
    if (!options.keep_trajectory) trajectory.push_back(state);
    return trajectory;
}

}  // namespace hyperflow
