#include "hyperflow/gauge.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "hyperflow/errors.hpp"
#include "hyperflow/fields.hpp"

namespace hyperflow {

namespace {

using cplx = std::complex<double>;
constexpr cplx I1(0.0, 1.0);

ComplexField complex_partial(const Grid& g, const ComplexField& f, int dir) {
    std::vector<double> re(f.size()), im(f.size());
    for (std::size_t k = 0; k < f.size(); ++k) {
        re[k] = f[k].real();
        im[k] = f[k].imag();
    }
    const std::vector<double> dre = partial(g, re, dir);
    const std::vector<double> dim = partial(g, im, dir);
    ComplexField out(f.size());
    for (std::size_t k = 0; k < f.size(); ++k) out[k] = {dre[k], dim[k]};
    return out;
}

ComplexField complex_second_partial(const Grid& g, const ComplexField& f, int dir) {
    std::vector<double> re(f.size()), im(f.size());
    for (std::size_t k = 0; k < f.size(); ++k) {
        re[k] = f[k].real();
        im[k] = f[k].imag();
    }
    const std::vector<double> dre = second_partial(g, re, dir);
    const std::vector<double> dim = second_partial(g, im, dir);
    ComplexField out(f.size());
    for (std::size_t k = 0; k < f.size(); ++k) out[k] = {dre[k], dim[k]};
    return out;
}

// D_i psi = d_i psi + i A_i psi
ComplexField covariant(const Grid& g, const ComplexField& psi, const std::vector<double>& A, int dir) {
    ComplexField out = complex_partial(g, psi, dir);
    for (std::size_t k = 0; k < psi.size(); ++k) out[k] += I1 * A[k] * psi[k];
    return out;
}

// e^{2x2} D1 D1 psi + D2 D2 psi - D2 psi, with D_i D_i expanded on the compact stencil.
ComplexField covariant_laplacian(const Grid& g, const ComplexField& psi, const std::vector<double>& A1,
                                 const std::vector<double>& A2) {
    const ComplexField p1 = complex_partial(g, psi, 1);
    const ComplexField p2 = complex_partial(g, psi, 2);
    const ComplexField p11 = complex_second_partial(g, psi, 1);
    const ComplexField p22 = complex_second_partial(g, psi, 2);
    const std::vector<double> dA1 = partial(g, A1, 1);
    const std::vector<double> dA2 = partial(g, A2, 2);
    ComplexField out(psi.size());
    for (int j = 0; j < g.n2; ++j) {
        const double e = std::exp(2.0 * g.x2(j));
        for (int i = 0; i < g.n1; ++i) {
            const std::size_t k = g.index(i, j);
            const cplx d11 = p11[k] + I1 * dA1[k] * psi[k] + 2.0 * I1 * A1[k] * p1[k] - A1[k] * A1[k] * psi[k];
            const cplx d22 = p22[k] + I1 * dA2[k] * psi[k] + 2.0 * I1 * A2[k] * p2[k] - A2[k] * A2[k] * psi[k];
            const cplx d2 = p2[k] + I1 * A2[k] * psi[k];
            out[k] = e * d11 + d22 - d2;
        }
    }
    return out;
}

// i sum_i h^{ii} (a ^ phi_i) phi_i
ComplexField curvature_term(const Grid& g, const ComplexField& a, const ComplexField& phi1,
                            const ComplexField& phi2) {
    ComplexField out(a.size());
    for (int j = 0; j < g.n2; ++j) {
        const double e = std::exp(2.0 * g.x2(j));
        for (int i = 0; i < g.n1; ++i) {
            const std::size_t k = g.index(i, j);
            out[k] = I1 * (e * wedge(a[k], phi1[k]) * phi1[k] + wedge(a[k], phi2[k]) * phi2[k]);
        }
    }
    return out;
}

// L2 norm over nodes at least `ring` away from the boundary, optionally with
// the 2-form factor e^{2 x2} on |r|^2.
double interior_l2(const Grid& g, const ComplexField& r, int ring, bool two_form) {
    const std::vector<double> w = quadrature_weights(g);
    double sum = 0.0;
    for (int j = ring; j < g.n2 - ring; ++j) {
        const double f = two_form ? std::exp(2.0 * g.x2(j)) : 1.0;
        for (int i = ring; i < g.n1 - ring; ++i) {
            const std::size_t k = g.index(i, j);
            sum += w[k] * f * std::norm(r[k]);
        }
    }
    return std::sqrt(sum);
}

MapField average(const MapField& a, const MapField& b) {
    MapField m(a.grid);
    for (std::size_t k = 0; k < a.grid.size(); ++k) {
        m.u1[k] = 0.5 * (a.u1[k] + b.u1[k]);
        m.u2[k] = 0.5 * (a.u2[k] + b.u2[k]);
    }
    return m;
}

TangentField difference(const MapField& b, const MapField& a, double step) {
    TangentField d(a.grid);
    for (std::size_t k = 0; k < a.grid.size(); ++k) {
        d.X1[k] = (b.u1[k] - a.u1[k]) / step;
        d.X2[k] = (b.u2[k] - a.u2[k]) / step;
    }
    return d;
}

// Normalized average of two frames, as a frame at `u`.
Frame midpoint_frame(const Frame& a, const Frame& b, const MapField& u) {
    Frame m{TangentField(u.grid)};
    for (std::size_t k = 0; k < u.grid.size(); ++k) {
        const double x1 = 0.5 * (a.e1.X1[k] + b.e1.X1[k]);
        const double x2 = 0.5 * (a.e1.X2[k] + b.e1.X2[k]);
        const double n = std::sqrt(std::exp(-2.0 * u.u2[k]) * x1 * x1 + x2 * x2);
        m.e1.X1[k] = x1 / n;
        m.e1.X2[k] = x2 / n;
    }
    return m;
}

// Derivative at s[k] from three neighbouring samples on a nonuniform grid.
struct ThreePoint {
    double cm, c0, cp;
};
ThreePoint three_point(const std::vector<double>& s, std::size_t k) {
    const double ha = s[k] - s[k - 1];
    const double hb = s[k + 1] - s[k];
    return {-hb / (ha * (ha + hb)), (hb - ha) / (ha * hb), ha / (hb * (ha + hb))};
}

TangentField s_derivative(const HeatTower& t, std::size_t k) {
    const ThreePoint c = three_point(t.s, k);
    TangentField d(t.u[k].grid);
    for (std::size_t n = 0; n < d.X1.size(); ++n) {
        d.X1[n] = c.cm * t.u[k - 1].u1[n] + c.c0 * t.u[k].u1[n] + c.cp * t.u[k + 1].u1[n];
        d.X2[n] = c.cm * t.u[k - 1].u2[n] + c.c0 * t.u[k].u2[n] + c.cp * t.u[k + 1].u2[n];
    }
    return d;
}

// Angle of e1 against Theta_1 in the orthonormal Theta coordinates.
std::vector<double> frame_angle(const Frame& f, const MapField& u) {
    std::vector<double> theta(u.grid.size());
    for (std::size_t k = 0; k < theta.size(); ++k) {
        theta[k] = std::atan2(f.e1.X2[k], std::exp(-u.u2[k]) * f.e1.X1[k]);
    }
    return theta;
}

Frame frame_from_angle(const std::vector<double>& theta, const MapField& u) {
    Frame f{TangentField(u.grid)};
    for (std::size_t k = 0; k < theta.size(); ++k) {
        f.e1.X1[k] = std::exp(u.u2[k]) * std::cos(theta[k]);
        f.e1.X2[k] = std::sin(theta[k]);
    }
    return f;
}

void require_aligned(const HeatTower& a, const HeatTower& b, std::size_t k) {
    if (a.s.size() <= k || b.s.size() <= k || a.s[k] != b.s[k]) {
        throw DomainError("gauge: towers do not share the requested s-grid");
    }
}

}  // namespace

double wedge(const cplx& a, const cplx& b) { return a.real() * b.imag() - a.imag() * b.real(); }

Frame theta_frame(const MapField& u) {
    Frame f{TangentField(u.grid)};
    for (std::size_t k = 0; k < u.grid.size(); ++k) f.e1.X1[k] = std::exp(u.u2[k]);
    return f;
}

TangentField second_leg(const Frame& frame, const MapField& u) {
    TangentField j(u.grid);
    for (std::size_t k = 0; k < u.grid.size(); ++k) {
        const double e = std::exp(u.u2[k]);
        j.X1[k] = -e * frame.e1.X2[k];
        j.X2[k] = frame.e1.X1[k] / e;
    }
    return j;
}

std::vector<Frame> transport_frame(const HeatTower& tower, const Frame& seed, TransportReport* report) {
    const std::size_t K = tower.u.size() - 1;
    const Grid& g = tower.u[0].grid;
    std::vector<Frame> frames(K + 1);
    frames[K] = seed;
    // With e1 = cos(theta) Theta_1 + sin(theta) Theta_2, nabla_X Theta_1 = e^{-u2} X1 Theta_2
    // turns nabla_s e1 = 0 into theta_s = -e^{-u2} d_s u1, integrated by the midpoint rule.
    const MapField& top = tower.u[K];
    double seed_defect = 0.0;
    for (std::size_t n = 0; n < g.size(); ++n) {
        const double norm = std::hypot(std::exp(-top.u2[n]) * seed.e1.X1[n], seed.e1.X2[n]);
        seed_defect = std::max(seed_defect, std::abs(norm - 1.0));
    }
    if (seed_defect > 1e-6) {
        std::ostringstream msg;
        msg << "transport_frame: seed is not a unit vector (norm defect " << seed_defect << ")";
        throw NumericalError(msg.str());
    }
    std::vector<double> theta = frame_angle(seed, top);
    for (std::size_t k = K; k-- > 0;) {
        const MapField& a = tower.u[k];
        const MapField& b = tower.u[k + 1];
        for (std::size_t n = 0; n < g.size(); ++n) {
            theta[n] += std::exp(-0.5 * (a.u2[n] + b.u2[n])) * (b.u1[n] - a.u1[n]);
        }
        frames[k] = frame_from_angle(theta, a);
    }
    double max_drift = 0.0;
    for (std::size_t k = 0; k <= K; ++k) {
        const MapField& u = tower.u[k];
        for (std::size_t n = 0; n < g.size(); ++n) {
            const double norm = std::hypot(std::exp(-u.u2[n]) * frames[k].e1.X1[n], frames[k].e1.X2[n]);
            max_drift = std::max(max_drift, std::abs(norm - 1.0));
        }
    }
    if (report) report->max_norm_drift = max_drift;
    return frames;
}

ScalarField limit_gauge_rotation(const Frame& frame_at_smax, const MapField& u_at_smax, const MapField& Q) {
    if (Q.grid != u_at_smax.grid) throw DomainError("limit_gauge_rotation: grid mismatch");
    ScalarField chi(Q.grid);
    for (std::size_t k = 0; k < Q.grid.size(); ++k) {
        // Theta coordinates of e1 at u(s_max); compared with Theta_1(Q), whose coordinates are (1, 0).
        const double a = std::exp(-u_at_smax.u2[k]) * frame_at_smax.e1.X1[k];
        const double b = frame_at_smax.e1.X2[k];
        chi.values[k] = -std::atan2(b, a);
    }
    return chi;
}

Frame rotate_frame(const Frame& frame, const MapField& u, const ScalarField& chi) {
    const TangentField j = second_leg(frame, u);
    Frame out{TangentField(u.grid)};
    for (std::size_t k = 0; k < u.grid.size(); ++k) {
        const double c = std::cos(chi.values[k]);
        const double s = std::sin(chi.values[k]);
        out.e1.X1[k] = c * frame.e1.X1[k] + s * j.X1[k];
        out.e1.X2[k] = c * frame.e1.X2[k] + s * j.X2[k];
    }
    return out;
}

ComplexField differential_field(const TangentField& X, const Frame& frame, const MapField& u) {
    ComplexField phi(u.grid.size());
    for (std::size_t k = 0; k < u.grid.size(); ++k) {
        const double e = std::exp(u.u2[k]);
        const double m = 1.0 / (e * e);
        const double j1 = -e * frame.e1.X2[k];
        const double j2 = frame.e1.X1[k] / e;
        phi[k] = {m * X.X1[k] * frame.e1.X1[k] + X.X2[k] * frame.e1.X2[k], m * X.X1[k] * j1 + X.X2[k] * j2};
    }
    return phi;
}

TangentField coordinate_derivative(const MapField& u, int dir) {
    TangentField d(u.grid);
    d.X1 = partial(u.grid, u.u1, dir);
    d.X2 = partial(u.grid, u.u2, dir);
    return d;
}

std::vector<double> connection_from_frame(const Frame& frame, const MapField& u, int dir) {
    const TangentField de = pullback_covariant_derivative(frame.e1, u, dir);
    const TangentField j = second_leg(frame, u);
    std::vector<double> A(u.grid.size());
    for (std::size_t k = 0; k < u.grid.size(); ++k) {
        A[k] = std::exp(-2.0 * u.u2[k]) * de.X1[k] * j.X1[k] + de.X2[k] * j.X2[k];
    }
    return A;
}

std::vector<double> connection_between(const Frame& fa, const MapField& ua, const Frame& fb, const MapField& ub,
                                       double step) {
    // <nabla e1, J e1> = d theta + e^{-u2} d u1 in the angle form of transport_frame.
    const std::vector<double> ta = frame_angle(fa, ua);
    const std::vector<double> tb = frame_angle(fb, ub);
    std::vector<double> A(ua.grid.size());
    for (std::size_t k = 0; k < A.size(); ++k) {
        const double dtheta = std::remainder(tb[k] - ta[k], 2.0 * std::numbers::pi);
        A[k] = (dtheta + std::exp(-0.5 * (ua.u2[k] + ub.u2[k])) * (ub.u1[k] - ua.u1[k])) / step;
    }
    return A;
}

IntegralConnection connection_from_integral(const HeatTower& tower, const std::vector<Frame>& frames,
                                            const MapField& Q) {
    const std::size_t K = tower.u.size() - 1;
    if (frames.size() != K + 1) throw DomainError("connection_from_integral: one frame per checkpoint required");
    IntegralConnection out;
    out.A1.resize(K + 1);
    out.A2.resize(K + 1);
    const Frame xi = theta_frame(Q);
    out.A1[K] = connection_from_frame(xi, Q, 1);
    out.A2[K] = connection_from_frame(xi, Q, 2);
    const Grid& g = Q.grid;
    for (std::size_t k = K; k-- > 0;) {
        const double ds = tower.s[k + 1] - tower.s[k];
        const MapField um = average(tower.u[k], tower.u[k + 1]);
        const Frame em = midpoint_frame(frames[k], frames[k + 1], um);
        const ComplexField ps = differential_field(difference(tower.u[k + 1], tower.u[k], ds), em, um);
        const ComplexField p1 = differential_field(coordinate_derivative(um, 1), em, um);
        const ComplexField p2 = differential_field(coordinate_derivative(um, 2), em, um);
        out.A1[k] = out.A1[k + 1];
        out.A2[k] = out.A2[k + 1];
        for (std::size_t n = 0; n < g.size(); ++n) {
            out.A1[k][n] -= ds * wedge(ps[n], p1[n]);
            out.A2[k][n] -= ds * wedge(ps[n], p2[n]);
        }
    }
    const MapField& last = tower.u[K];
    const ScalarField g1 = pointwise_norm(coordinate_derivative(last, 1), last);
    const ScalarField g2 = pointwise_norm(coordinate_derivative(last, 2), last);
    double gmax = 0.0;
    for (int j = 0; j < g.n2; ++j) {
        const double e = std::exp(g.x2(j));
        for (int i = 0; i < g.n1; ++i) {
            const std::size_t k = g.index(i, j);
            gmax = std::max({gmax, e * g1.values[k], g2.values[k]});
        }
    }
    out.tail_bound = tower.tail_bound * gmax;
    return out;
}

std::vector<std::vector<double>> time_connection_from_integral(const HeatTower& before, const HeatTower& center,
                                                               const HeatTower& after,
                                                               const std::vector<Frame>& frames_before,
                                                               const std::vector<Frame>& frames_center,
                                                               const std::vector<Frame>& frames_after, double dt) {
    (void)frames_before;
    (void)frames_after;
    const std::size_t K = center.u.size() - 1;
    require_aligned(before, center, K);
    require_aligned(after, center, K);
    const Grid& g = center.u[0].grid;
    std::vector<std::vector<double>> At(K + 1, std::vector<double>(g.size(), 0.0));
    for (std::size_t k = K; k-- > 0;) {
        const double ds = center.s[k + 1] - center.s[k];
        const MapField um = average(center.u[k], center.u[k + 1]);
        const Frame em = midpoint_frame(frames_center[k], frames_center[k + 1], um);
        const ComplexField ps = differential_field(difference(center.u[k + 1], center.u[k], ds), em, um);
        const MapField bm = average(before.u[k], before.u[k + 1]);
        const MapField am = average(after.u[k], after.u[k + 1]);
        const ComplexField pt = differential_field(difference(am, bm, 2.0 * dt), em, um);
        At[k] = At[k + 1];
        for (std::size_t n = 0; n < g.size(); ++n) At[k][n] -= ds * wedge(ps[n], pt[n]);
    }
    return At;
}

GaugeBundle make_bundle(const MapField& u, const Frame& frame, const TangentField* ut) {
    GaugeBundle b;
    b.grid = u.grid;
    b.phi1 = differential_field(coordinate_derivative(u, 1), frame, u);
    b.phi2 = differential_field(coordinate_derivative(u, 2), frame, u);
    b.phis = differential_field(tension_field(u), frame, u);
    b.phit = ut ? differential_field(*ut, frame, u) : ComplexField(u.grid.size());
    b.A1 = connection_from_frame(frame, u, 1);
    b.A2 = connection_from_frame(frame, u, 2);
    b.At.assign(u.grid.size(), 0.0);
    return b;
}

ComplexField gauged_tension(const GaugeBundle& b) {
    const ComplexField d11 = covariant(b.grid, b.phi1, b.A1, 1);
    const ComplexField d22 = covariant(b.grid, b.phi2, b.A2, 2);
    ComplexField H(b.phi1.size());
    for (int j = 0; j < b.grid.n2; ++j) {
        const double e = std::exp(2.0 * b.grid.x2(j));
        for (int i = 0; i < b.grid.n1; ++i) {
            const std::size_t k = b.grid.index(i, j);
            H[k] = e * d11[k] + d22[k] - b.phi2[k];
        }
    }
    return H;
}

GaugeResiduals gauge_residuals(const GaugeBundle& b, const FlowParams& params) {
    const Grid& g = b.grid;
    const std::size_t n = g.size();
    const ComplexField d12 = covariant(g, b.phi2, b.A1, 1);
    const ComplexField d21 = covariant(g, b.phi1, b.A2, 2);
    const std::vector<double> dA2 = partial(g, b.A2, 1);
    const std::vector<double> dA1 = partial(g, b.A1, 2);
    const ComplexField H = gauged_tension(b);
    const cplx z(params.alpha, -params.beta);
    ComplexField torsion(n), commutator(n), w(n), heat(n);
    GaugeResiduals r;
    for (std::size_t k = 0; k < n; ++k) {
        torsion[k] = d12[k] - d21[k];
        commutator[k] = dA2[k] - dA1[k] - wedge(b.phi1[k], b.phi2[k]);
        w[k] = b.phit[k] - z * H[k];
        heat[k] = b.phis[k] - H[k];
        r.At_limit = std::max(r.At_limit, std::abs(b.At[k]));
    }
    r.torsion = interior_l2(g, torsion, 1, true);
    r.commutator = interior_l2(g, commutator, 1, true);
    r.w_norm = interior_l2(g, w, 1, false);
    r.heat_tension = interior_l2(g, heat, 1, false);
    return r;
}

EvolutionResiduals evolution_residuals(const HeatTower& before, const HeatTower& center, const HeatTower& after,
                                       const std::vector<Frame>& frames_before,
                                       const std::vector<Frame>& frames_center,
                                       const std::vector<Frame>& frames_after, double dt, std::size_t k,
                                       const FlowParams& params) {
    if (k < 2 || k + 2 >= center.u.size()) throw DomainError("evolution_residuals: checkpoint index out of range");
    require_aligned(before, center, k + 2);
    require_aligned(after, center, k + 2);
    const Grid& g = center.u[k].grid;
    const cplx z(params.alpha, -params.beta);

    // phi_s on each tower at s_k, in that tower's own frame.
    const ComplexField ps_b = differential_field(s_derivative(before, k), frames_before[k], before.u[k]);
    const ComplexField ps_a = differential_field(s_derivative(after, k), frames_after[k], after.u[k]);
    const ComplexField ps = differential_field(s_derivative(center, k), frames_center[k], center.u[k]);
    const std::vector<double> At =
        connection_between(frames_before[k], before.u[k], frames_after[k], after.u[k], 2.0 * dt);

    // w and the spatial bundle at s_{k-1}, s_k, s_{k+1}.
    auto w_at = [&](std::size_t m, GaugeBundle* keep) {
        GaugeBundle b = make_bundle(center.u[m], frames_center[m]);
        b.phit = differential_field(difference(after.u[m], before.u[m], 2.0 * dt), frames_center[m], center.u[m]);
        // w = phi_t - z phi_s: along the discrete tower phi_s is the compact
        // tension that drives it, which agrees with H only up to O(h^2).
        ComplexField w(g.size());
        for (std::size_t n = 0; n < g.size(); ++n) w[n] = b.phit[n] - z * b.phis[n];
        if (keep) *keep = std::move(b);
        return w;
    };
    GaugeBundle bk;
    const ComplexField wm = w_at(k - 1, nullptr);
    const ComplexField w0 = w_at(k, &bk);
    const ComplexField wp = w_at(k + 1, nullptr);
    const ThreePoint c = three_point(center.s, k);

    const ComplexField lap_ps = covariant_laplacian(g, ps, bk.A1, bk.A2);
    const ComplexField lap_w = covariant_laplacian(g, w0, bk.A1, bk.A2);
    const ComplexField curv_s = curvature_term(g, ps, bk.phi1, bk.phi2);
    const ComplexField curv_t = curvature_term(g, bk.phit, bk.phi1, bk.phi2);

    ComplexField r53(g.size()), r53_flat(g.size()), r54(g.size()), dtps(g.size());
    for (std::size_t n = 0; n < g.size(); ++n) {
        const cplx dw = c.cm * wm[n] + c.c0 * w0[n] + c.cp * wp[n];
        dtps[n] = (ps_a[n] - ps_b[n]) / (2.0 * dt) + I1 * At[n] * ps[n];
        r53_flat[n] = dtps[n] - (z * lap_ps[n] + dw);
        r53[n] = r53_flat[n] - z * curv_s[n];
        r54[n] = dw - (lap_w[n] + curv_t[n] - z * curv_s[n]);
    }
    // Second derivatives of first-derivative fields pick up the one-sided
    // stencils of the boundary ring in a layer a few nodes wide.
    constexpr int kRing = 4;
    EvolutionResiduals out;
    out.phis_equation = interior_l2(g, r53, kRing, false);
    out.phis_without_curvature = interior_l2(g, r53_flat, kRing, false);
    out.w_equation = interior_l2(g, r54, kRing, false);
    out.phis_scale = interior_l2(g, dtps, kRing, false);
    return out;
}

}  // namespace hyperflow
