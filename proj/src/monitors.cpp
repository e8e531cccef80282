#include "hyperflow/monitors.hpp"

#include <algorithm>
#include <cmath>

#include "hyperflow/errors.hpp"
#include "hyperflow/fields.hpp"

namespace hyperflow {

double dirichlet_energy(const MapField& u) {
    const Grid& g = u.grid;
    double E = 0.0;
    for (int j = 0; j < g.n2; ++j) {
        const double cj = (j == 0 || j == g.n2 - 1) ? 0.5 : 1.0;
        const double w = std::exp(g.x2(j)) * g.h2 * cj / g.h1;  // e^{-x2} e^{2 x2} h1 h2 / h1^2
        for (int i = 0; i + 1 < g.n1; ++i) {
            const std::size_t a = g.index(i, j), b = g.index(i + 1, j);
            const double m = std::exp(-(u.u2[a] + u.u2[b]));
            const double d1 = u.u1[b] - u.u1[a];
            const double d2 = u.u2[b] - u.u2[a];
            E += 0.5 * w * (m * d1 * d1 + d2 * d2);
        }
    }
    for (int j = 0; j + 1 < g.n2; ++j) {
        const double w = std::exp(-(g.x2(j) + 0.5 * g.h2)) * g.h1 / g.h2;
        for (int i = 0; i < g.n1; ++i) {
            const double ci = (i == 0 || i == g.n1 - 1) ? 0.5 : 1.0;
            const std::size_t a = g.index(i, j), b = g.index(i, j + 1);
            const double m = std::exp(-(u.u2[a] + u.u2[b]));
            const double d1 = u.u1[b] - u.u1[a];
            const double d2 = u.u2[b] - u.u2[a];
            E += 0.5 * w * ci * (m * d1 * d1 + d2 * d2);
        }
    }
    return E;
}

EnergyReport energy_report(const FlowState& state, const FlowState* prev, const FlowParams& params,
                           Equation equation, VelocitySource source) {
    EnergyReport r;
    r.t = state.t;
    r.E1 = dirichlet_energy(state.u);
    TangentField ut;
    if (source == VelocitySource::Difference) {
        if (!prev) throw DomainError("energy_report: difference velocity needs a previous state");
        const double dt = state.t - prev->t;
        ut = TangentField(state.u.grid);
        for (std::size_t k = 0; k < ut.X1.size(); ++k) {
            ut.X1[k] = (state.u.u1[k] - prev->u.u1[k]) / dt;
            ut.X2[k] = (state.u.u2[k] - prev->u.u2[k]) / dt;
        }
    } else if (equation == Equation::Wave) {
        ut = state.ut;
    } else {
        ut = ll_rhs(state.u, params);
    }
    const double ut_l2 = lp_norm(ut, state.u, Norm::L2);
    r.E2 = 0.5 * ut_l2 * ut_l2;
    r.E3 = 0.5 * integrate(covariant_gradient_sq(ut, state.u));
    r.tau_l2 = lp_norm(tension_field(state.u), state.u, Norm::L2);
    if (prev) {
        const double dt = state.t - prev->t;
        if (!(dt > 0.0)) throw DomainError("energy_report: checkpoints must be increasing in t");
        const double prev_tau = lp_norm(tension_field(prev->u), prev->u, Norm::L2);
        r.dissipation_scale = params.alpha * 0.5 * (r.tau_l2 * r.tau_l2 + prev_tau * prev_tau);
        r.dissipation_residual = std::abs((r.E1 - dirichlet_energy(prev->u)) / dt + r.dissipation_scale);
    }
    return r;
}

namespace {

struct Lhs {
    double max = 0.0;
    double normalized = 0.0;
};

// max over interior nodes of (f_b - f_a)/ds - Delta f_b + c G_b, and the same
// divided by max(|Delta f_b| + c G_b).
Lhs parabolic_lhs(const Grid& g, const std::vector<double>& fa, const std::vector<double>& fb,
                  const std::vector<double>& G, double c, double ds, const std::vector<double>* mask) {
    const std::vector<double> lap = laplace_beltrami(g, fb);
    Lhs out;
    out.max = -INFINITY;
    double scale = 0.0;
    for (int j = 2; j < g.n2 - 2; ++j) {
        for (int i = 2; i < g.n1 - 2; ++i) {
            const std::size_t k = g.index(i, j);
            if (mask && (*mask)[k] == 0.0) continue;
            const double v = (fb[k] - fa[k]) / ds - lap[k] + c * G[k];
            out.max = std::max(out.max, v);
            scale = std::max(scale, std::abs(lap[k]) + c * G[k] + std::abs(fb[k] - fa[k]) / ds);
        }
    }
    if (out.max == -INFINITY) out.max = 0.0;
    out.normalized = scale > 0.0 ? std::max(0.0, out.max) / scale : 0.0;
    return out;
}

std::vector<double> squared(const ScalarField& f) {
    std::vector<double> v(f.values.size());
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = f.values[k] * f.values[k];
    return v;
}

}  // namespace

BochnerReport bochner_monitor(const HeatTower& tower) {
    BochnerReport rep;
    rep.s = tower.s;
    const Grid& g = tower.u[0].grid;
    std::vector<TangentField> tau;
    tau.reserve(tower.u.size());
    for (const MapField& u : tower.u) tau.push_back(tension_field(u));
    std::vector<ScalarField> norm;
    for (std::size_t k = 0; k < tau.size(); ++k) {
        norm.push_back(pointwise_norm(tau[k], tower.u[k]));
        rep.sup_ds.push_back(lp_norm(norm.back(), Norm::Linf));
    }
    for (std::size_t k = 0; k + 1 < rep.sup_ds.size(); ++k) {
        rep.max_increase = std::max(rep.max_increase, rep.sup_ds[k + 1] - rep.sup_ds[k]);
    }
    rep.lhs_sq_max = tower.u.size() > 1 ? -INFINITY : 0.0;
    for (std::size_t k = 0; k + 1 < tower.u.size(); ++k) {
        const double ds = tower.s[k + 1] - tower.s[k];
        const MapField& ub = tower.u[k + 1];
        const std::vector<double> fa = squared(norm[k]);
        const std::vector<double> fb = squared(norm[k + 1]);
        const ScalarField G = covariant_gradient_sq(tau[k + 1], ub);
        const Lhs sq = parabolic_lhs(g, fa, fb, G.values, 2.0, ds, nullptr);
        rep.lhs_sq_max = std::max(rep.lhs_sq_max, sq.max);
        rep.lhs_sq_normalized = std::max(rep.lhs_sq_normalized, sq.normalized);

        std::vector<double> mask(g.size(), 0.0);
        const double cut = 1e-3 * rep.sup_ds[k + 1];
        for (std::size_t n = 0; n < mask.size(); ++n) {
            mask[n] = (norm[k + 1].values[n] > cut && norm[k].values[n] > cut) ? 1.0 : 0.0;
        }
        const std::vector<double> zero(g.size(), 0.0);
        const Lhs ab = parabolic_lhs(g, norm[k].values, norm[k + 1].values, zero, 0.0, ds, &mask);
        rep.lhs_abs_normalized = std::max(rep.lhs_abs_normalized, ab.normalized);

        // |du|^2 = 2 e(u)
        const ScalarField ea = energy_density(tower.u[k]);
        const ScalarField eb = energy_density(ub);
        std::vector<double> da(g.size()), db(g.size());
        for (std::size_t n = 0; n < g.size(); ++n) {
            da[n] = 2.0 * ea.values[n];
            db[n] = 2.0 * eb.values[n];
        }
        const ScalarField hb = hessian_norm_sq(covariant_hessian(ub), ub);
        const std::vector<double> lap = laplace_beltrami(g, db);
        for (int j = 2; j < g.n2 - 2; ++j) {
            for (int i = 2; i < g.n1 - 2; ++i) {
                const std::size_t n = g.index(i, j);
                if (eb.values[n] < 1e-12) continue;
                const double v = (db[n] - da[n]) / ds - lap[n] + 2.0 * hb.values[n];
                rep.K_empirical = std::max(rep.K_empirical, v / eb.values[n]);
            }
        }
    }
    if (rep.lhs_sq_max == -INFINITY) rep.lhs_sq_max = 0.0;
    return rep;
}

TimeBochnerReport bochner_time_monitor(const HeatTower& a, const HeatTower& b, double dt) {
    const std::size_t K = std::min(a.u.size(), b.u.size());
    for (std::size_t k = 0; k < K; ++k) {
        if (a.s[k] != b.s[k]) throw DomainError("bochner_time_monitor: towers do not share an s-grid");
    }
    const Grid& g = a.u[0].grid;
    TimeBochnerReport rep;
    std::vector<double> prev;
    for (std::size_t k = 0; k < K; ++k) {
        MapField um(g);
        TangentField d(g);
        for (std::size_t n = 0; n < g.size(); ++n) {
            um.u1[n] = 0.5 * (a.u[k].u1[n] + b.u[k].u1[n]);
            um.u2[n] = 0.5 * (a.u[k].u2[n] + b.u[k].u2[n]);
            d.X1[n] = (b.u[k].u1[n] - a.u[k].u1[n]) / dt;
            d.X2[n] = (b.u[k].u2[n] - a.u[k].u2[n]) / dt;
        }
        const ScalarField nrm = pointwise_norm(d, um);
        rep.sup_dt.push_back(lp_norm(nrm, Norm::Linf));
        std::vector<double> f = squared(nrm);
        if (k > 0) {
            const ScalarField G = covariant_gradient_sq(d, um);
            const Lhs l = parabolic_lhs(g, prev, f, G.values, 1.0, a.s[k] - a.s[k - 1], nullptr);
            rep.lhs_normalized = std::max(rep.lhs_normalized, l.normalized);
        }
        prev = std::move(f);
    }
    return rep;
}

}  // namespace hyperflow
