#include <cmath>
#include <complex>
#include <numbers>

#include <gtest/gtest.h>

#include "hyperflow/errors.hpp"
#include "hyperflow/fields.hpp"
#include "hyperflow/flows.hpp"
#include "hyperflow/gauge.hpp"
#include "hyperflow/harmonic.hpp"
#include "hyperflow/tower.hpp"

using namespace hyperflow;

namespace {

Grid small_grid(int n = 32) { return Grid::make(-2.0, 2.0, -1.5, 1.5, n, n); }

MapField harmonic(const Grid& g) { return to_chart(HolomorphicMapSpec::linear(0.5), g); }

MapField bumped(const Grid& g, double amplitude = 0.1) {
    return perturb(harmonic(g), BumpSpec{{0.0, 0.0}, 0.6, amplitude});
}

// Smooth non-harmonic map with the same boundary behaviour as the harmonic one.
MapField smooth(const Grid& g) {
    MapField u = harmonic(g);
    for (int j = 0; j < g.n2; ++j)
        for (int i = 0; i < g.n1; ++i) {
            const std::size_t k = g.index(i, j);
            u.u1[k] += 0.05 * std::sin(g.x1(i)) * std::exp(u.u2[k]);
            u.u2[k] += 0.05 * std::cos(0.7 * g.x2(j) + g.x1(i));
        }
    return u;
}

ScalarField smooth_angle(const Grid& g) {
    return scalar_from_function(g, [](const ChartPoint& p) { return 0.7 * std::sin(p.x1) * std::cos(0.5 * p.x2); });
}

// Max over nodes at least `ring` away from the boundary.
double interior_max(const Grid& g, const std::vector<double>& f, int ring) {
    double m = 0.0;
    for (int j = ring; j < g.n2 - ring; ++j)
        for (int i = ring; i < g.n1 - ring; ++i) m = std::max(m, std::abs(f[g.index(i, j)]));
    return m;
}

struct TransportedTower {
    HeatTower tower;
    std::vector<Frame> frames;
    TransportReport report;
};

TransportedTower transported(const MapField& u0) {
    TransportedTower t;
    t.tower = build_heat_tower(u0, TowerSpec{});
    t.frames = transport_frame(t.tower, theta_frame(t.tower.limit()), &t.report);
    return t;
}

}  // namespace

TEST(Frame, ThetaFrameIsOrthonormal) {
    const Grid g = small_grid(16);
    const MapField u = bumped(g);
    const Frame f = theta_frame(u);
    const TangentField j = second_leg(f, u);
    for (std::size_t k = 0; k < g.size(); ++k) {
        const Tangent e{f.e1.X1[k], f.e1.X2[k]}, je{j.X1[k], j.X2[k]};
        EXPECT_NEAR(metric_norm(u.at(k), e), 1.0, 1e-14);
        EXPECT_NEAR(metric_norm(u.at(k), je), 1.0, 1e-14);
        EXPECT_NEAR(metric_inner(u.at(k), e, je), 0.0, 1e-14);
    }
}

TEST(Frame, DifferentialFieldReconstructsTheVector) {
    const Grid g = small_grid(16);
    const MapField u = bumped(g);
    const Frame f = rotate_frame(theta_frame(u), u, smooth_angle(g));
    const TangentField X = coordinate_derivative(u, 1);
    const ComplexField phi = differential_field(X, f, u);
    const TangentField j = second_leg(f, u);
    for (std::size_t k = 0; k < g.size(); ++k) {
        EXPECT_NEAR(phi[k].real() * f.e1.X1[k] + phi[k].imag() * j.X1[k], X.X1[k], 1e-12);
        EXPECT_NEAR(phi[k].real() * f.e1.X2[k] + phi[k].imag() * j.X2[k], X.X2[k], 1e-12);
    }
}

TEST(Frame, WedgeIsTheAreaForm) {
    using c = std::complex<double>;
    EXPECT_EQ(wedge(c(1, 0), c(0, 1)), 1.0);
    EXPECT_EQ(wedge(c(0, 1), c(1, 0)), -1.0);
    EXPECT_EQ(wedge(c(2, 3), c(2, 3)), 0.0);
    EXPECT_NEAR(wedge(c(1, 2), c(-3, 0.5)), -wedge(c(-3, 0.5), c(1, 2)), 0.0);
}

TEST(GaugeRotation, PhiPicksUpAPhaseAndAShiftsByTheGradient) {
    auto errors = [](int n) {
        const Grid g = small_grid(n);
        const MapField u = bumped(g);
        const Frame f = theta_frame(u);
        const ScalarField chi = smooth_angle(g);
        const Frame r = rotate_frame(f, u, chi);
        const TangentField X = coordinate_derivative(u, 2);
        const ComplexField phi = differential_field(X, f, u), phir = differential_field(X, r, u);
        double phase = 0.0;
        for (std::size_t k = 0; k < g.size(); ++k) {
            phase = std::max(phase, std::abs(phir[k] - std::exp(std::complex<double>(0, -chi.values[k])) * phi[k]));
        }
        EXPECT_LT(phase, 1e-13);
        std::vector<double> diff(g.size());
        const std::vector<double> A = connection_from_frame(f, u, 1), Ar = connection_from_frame(r, u, 1);
        const std::vector<double> dchi = partial(g, chi.values, 1);
        for (std::size_t k = 0; k < g.size(); ++k) diff[k] = Ar[k] - A[k] - dchi[k];
        return interior_max(g, diff, 1);
    };
    const double coarse = errors(32), fine = errors(63);
    EXPECT_LT(coarse, 0.05);
    EXPECT_GE(coarse / fine, 3.0);
}

TEST(GaugeRotation, LimitRotationInvertsAKnownAngle) {
    const Grid g = small_grid(16);
    const MapField Q = harmonic(g);
    const Frame xi = theta_frame(Q);
    const ScalarField zero = limit_gauge_rotation(xi, Q, Q);
    for (double v : zero.values) EXPECT_EQ(v, 0.0);
    const ScalarField chi = smooth_angle(g);
    const Frame turned = rotate_frame(xi, Q, chi);
    const ScalarField back = limit_gauge_rotation(turned, Q, Q);
    for (std::size_t k = 0; k < g.size(); ++k) EXPECT_NEAR(back.values[k], -chi.values[k], 1e-13);
    const Frame restored = rotate_frame(turned, Q, back);
    for (std::size_t k = 0; k < g.size(); ++k) {
        EXPECT_NEAR(restored.e1.X1[k], xi.e1.X1[k], 1e-13);
        EXPECT_NEAR(restored.e1.X2[k], xi.e1.X2[k], 1e-13);
    }
    EXPECT_THROW(limit_gauge_rotation(xi, Q, harmonic(small_grid(17))), DomainError);
}

TEST(GaugeIdentities, TorsionCommutatorAndTensionConverge) {
    auto residuals = [](int n) {
        const Grid g = small_grid(n);
        const MapField u = smooth(g);
        const Frame f = rotate_frame(theta_frame(u), u, smooth_angle(g));
        return gauge_residuals(make_bundle(u, f), FlowParams{1.0, 1.0});
    };
    const GaugeResiduals a = residuals(32), b = residuals(63);
    EXPECT_GE(a.torsion / b.torsion, 3.5);
    EXPECT_GE(a.commutator / b.commutator, 3.5);
    EXPECT_GE(a.heat_tension / b.heat_tension, 2.8);
    EXPECT_EQ(b.At_limit, 0.0);
}

TEST(GaugeIdentities, WIsZTimesTheTensionDefectForTheFlowVelocity) {
    // phi(J X) = i phi(X), so u_t = alpha tau - beta J tau gives phi_t = z phi_s
    // and w = z (phi_s - H).
    const Grid g = small_grid(48);
    const MapField u = smooth(g);
    for (const FlowParams p : {FlowParams{1.0, 1.0}, FlowParams{2.0, -0.5}}) {
        const TangentField ut = ll_rhs(u, p);
        const Frame f = rotate_frame(theta_frame(u), u, smooth_angle(g));
        const GaugeResiduals r = gauge_residuals(make_bundle(u, f, &ut), p);
        EXPECT_NEAR(r.w_norm, p.z_abs() * r.heat_tension, 1e-10 * r.w_norm);
        const GaugeResiduals at_rest = gauge_residuals(make_bundle(u, f), p);
        EXPECT_LT(r.w_norm, 0.1 * at_rest.w_norm);
    }
}

TEST(Transport, FrameStaysOrthonormalAndParallel) {
    const Grid g = small_grid();
    const TransportedTower t = transported(smooth(g));
    EXPECT_LT(t.report.max_norm_drift, 1e-12);
    const auto& tower = t.tower;
    for (std::size_t k = 0; k < tower.u.size(); k += 7) {
        for (std::size_t n = 0; n < g.size(); ++n) {
            EXPECT_NEAR(metric_norm(tower.u[k].at(n), {t.frames[k].e1.X1[n], t.frames[k].e1.X2[n]}), 1.0, 1e-12);
        }
    }
    double As = 0.0;
    for (std::size_t k = 0; k + 1 < tower.u.size(); ++k) {
        const double ds = tower.s[k + 1] - tower.s[k];
        const auto a = connection_between(t.frames[k], tower.u[k], t.frames[k + 1], tower.u[k + 1], ds);
        As = std::max(As, interior_max(g, a, 0));
    }
    EXPECT_LT(As, 1e-12);
    Frame doubled = theta_frame(tower.limit());
    for (double& x : doubled.e1.X1) x *= 2.0;
    EXPECT_THROW(transport_frame(tower, doubled), NumericalError);
}

TEST(IntegralConnection, MatchesTheFrameConnectionWithTheMinusSign) {
    const Grid g = small_grid();
    const TransportedTower t = transported(bumped(g, 0.2));
    const MapField& Q = t.tower.limit();
    const IntegralConnection ic = connection_from_integral(t.tower, t.frames, Q);
    ASSERT_EQ(ic.A1.size(), t.tower.u.size());
    const std::vector<double> A1 = connection_from_frame(t.frames[0], t.tower.u[0], 1);
    const std::vector<double> A2 = connection_from_frame(t.frames[0], t.tower.u[0], 2);
    const std::vector<double> X1 = connection_from_frame(theta_frame(Q), Q, 1);
    const std::vector<double> X2 = connection_from_frame(theta_frame(Q), Q, 2);
    std::vector<double> minus(g.size()), plus(g.size());
    for (std::size_t n = 0; n < g.size(); ++n) {
        minus[n] = std::hypot(ic.A1[0][n] - A1[n], ic.A2[0][n] - A2[n]);
        // Flipping the sign of the curvature integral gives 2 A^Xi - A.
        plus[n] = std::hypot(2.0 * X1[n] - ic.A1[0][n] - A1[n], 2.0 * X2[n] - ic.A2[0][n] - A2[n]);
    }
    const double gap = interior_max(g, minus, 1), flipped = interior_max(g, plus, 1);
    EXPECT_LT(gap, 0.1 * flipped);
    EXPECT_LT(ic.tail_bound, 1e-6);
}

TEST(IntegralConnection, RejectsAMismatchedFrameList) {
    const Grid g = small_grid(16);
    const HeatTower tower = build_heat_tower(bumped(g), TowerSpec{});
    std::vector<Frame> frames(1, theta_frame(tower.u[0]));
    EXPECT_THROW(connection_from_integral(tower, frames, tower.limit()), DomainError);
}

TEST(Evolution, CurvatureTermIsNeeded) {
    const Grid g = small_grid();
    const FlowParams p{1.0, 1.0};
    const double dt = 1e-3;
    const MapField u0 = smooth(g);
    const auto traj = evolve(FlowState{u0, {}, 0.0}, p, 2.0 * dt, EvolveOptions{.checkpoint_every = dt});
    ASSERT_EQ(traj.size(), 3u);
    const TowerSpec spec;
    HeatTower b = build_heat_tower(traj[0].u, spec), c = build_heat_tower(traj[1].u, spec),
              a = build_heat_tower(traj[2].u, spec);
    align_towers({&b, &c, &a}, spec);
    const auto fb = transport_frame(b, theta_frame(b.limit()));
    const auto fc = transport_frame(c, theta_frame(c.limit()));
    const auto fa = transport_frame(a, theta_frame(a.limit()));
    const EvolutionResiduals r = evolution_residuals(b, c, a, fb, fc, fa, dt, 10, p);
    EXPECT_GT(r.phis_scale, 0.0);
    EXPECT_LT(r.phis_equation, 0.5 * r.phis_without_curvature);
    EXPECT_THROW(evolution_residuals(b, c, a, fb, fc, fa, dt, 1, p), DomainError);

    const auto At = time_connection_from_integral(b, c, a, fb, fc, fa, dt);
    for (double v : At.back()) EXPECT_EQ(v, 0.0);
}

namespace {

EvolutionResiduals residuals_at(const MapField& u0, double dt, double s_target) {
    const FlowParams p{1.0, 1.0};
    const auto traj = evolve(FlowState{u0, {}, 0.0}, p, 2.0 * dt, EvolveOptions{.checkpoint_every = dt});
    const TowerSpec spec;
    HeatTower b = build_heat_tower(traj[0].u, spec), c = build_heat_tower(traj[1].u, spec),
              a = build_heat_tower(traj[2].u, spec);
    align_towers({&b, &c, &a}, spec);
    const auto fb = transport_frame(b, theta_frame(b.limit()));
    const auto fc = transport_frame(c, theta_frame(c.limit()));
    const auto fa = transport_frame(a, theta_frame(a.limit()));
    std::size_t k = 2;
    while (k + 3 < c.s.size() && c.s[k] < s_target) ++k;
    return evolution_residuals(b, c, a, fb, fc, fa, dt, k, p);
}

}  // namespace

TEST(Evolution, PhiSEquationResidualDecreasesUnderRefinement) {
    const EvolutionResiduals coarse = residuals_at(smooth(small_grid(32)), 1e-3, 0.2);
    const EvolutionResiduals fine = residuals_at(smooth(small_grid(63)), 1e-3, 0.2);
    EXPECT_LT(fine.phis_equation, 0.5 * coarse.phis_equation);
    EXPECT_LT(fine.phis_equation, 1e-3 * fine.phis_scale);
}
