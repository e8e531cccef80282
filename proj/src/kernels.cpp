#include "hyperflow/kernels.hpp"

#include <algorithm>
#include <cmath>

#include "hyperflow/errors.hpp"
#include "hyperflow/fields.hpp"
#include "hyperflow/implicit_solver.hpp"

namespace hyperflow {

double kernel_envelope(const KernelQuery& q) {
    if (!(q.t > 0.0) || !std::isfinite(q.t)) throw DomainError("kernel_envelope: t must be > 0");
    if (!(q.rho >= 0.0) || !std::isfinite(q.rho)) throw DomainError("kernel_envelope: rho must be >= 0");
    const double t = q.t;
    const double r = q.rho;
    return std::exp(-0.25 * t - r * r / (4.0 * t) - 0.5 * r) * (1.0 + r) / (t * std::sqrt(1.0 + r + t));
}

double kernel_envelope_peak(double t) {
    if (!(t > 0.0)) throw DomainError("kernel_envelope_peak: t must be > 0");
    // d/drho log K = -rho/(2t) - 1/2 - 1/(2(1+rho+t)) + 1/(1+rho), decreasing in rho.
    auto dlog = [t](double r) { return -r / (2.0 * t) - 0.5 - 0.5 / (1.0 + r + t) + 1.0 / (1.0 + r); };
    double lo = 0.0, hi = 1.0;
    if (dlog(lo) <= 0.0) return 0.0;
    while (dlog(hi) > 0.0) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (dlog(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

namespace {

// Advances v by n implicit Euler steps of size ds, keeping the boundary ring.
void heat_steps(const ImplicitLaplacian& solver, std::vector<double>& v, long n) {
    const Grid& g = solver.grid();
    for (long step = 0; step < n; ++step) {
        // (I - ds L) v_new = v with v_new = v on the ring: move the ring
        // contribution to the right-hand side through the increment form.
        std::vector<double> lap = laplace_beltrami(g, v);
        for (std::size_t k = 0; k < lap.size(); ++k) lap[k] *= solver.coefficient();
        solver.solve(lap);
        for (std::size_t k = 0; k < v.size(); ++k) v[k] += lap[k];
    }
}

}  // namespace

ScalarField apply_heat_semigroup(const ScalarField& f, double s, const SemigroupOptions& options) {
    if (!(s >= 0.0) || !std::isfinite(s)) throw DomainError("apply_heat_semigroup: s must be >= 0");
    if (!(options.ds > 0.0)) throw DomainError("apply_heat_semigroup: ds must be > 0");
    ScalarField out = f;
    if (s == 0.0) return out;
    const long n = std::max(1L, static_cast<long>(std::ceil(s / options.ds - 1e-9)));
    const ImplicitLaplacian solver(f.grid, s / n);
    heat_steps(solver, out.values, n);
    return out;
}

SmoothingReport smoothing_diagnostics(const ScalarField& f, const std::vector<double>& s_samples,
                                      const SemigroupOptions& options) {
    if (s_samples.empty()) throw DomainError("smoothing_diagnostics: no samples");
    std::vector<double> samples = s_samples;
    std::sort(samples.begin(), samples.end());
    if (!(samples.front() > 0.0)) throw DomainError("smoothing_diagnostics: samples must be > 0");
    SmoothingReport rep;
    const double l1 = lp_norm(f, Norm::L1);
    const double f_sup = lp_norm(f, Norm::Linf);
    const double ds = options.ds;
    const double S_end = 2.0 * samples.back();
    const long n_total = std::max(1L, std::lround(S_end / ds));
    const double h = S_end / n_total;
    const ImplicitLaplacian solver(f.grid, h);

    std::vector<double> v = f.values;
    std::size_t next = 0;
    double integral = 0.0;
    double prev_sq = f_sup * f_sup;
    for (long step = 1; step <= n_total; ++step) {
        heat_steps(solver, v, 1);
        const double s = step * h;
        double sup = 0.0;
        for (double x : v) sup = std::max(sup, std::abs(x));
        if (step == 1) rep.sup_ratio_small_s = sup / f_sup;
        integral += 0.5 * h * (prev_sq + sup * sup);
        prev_sq = sup * sup;
        while (next < samples.size() && s >= samples[next] - 0.5 * h) {
            SmoothingRow row;
            row.s = s;
            row.sup_norm = sup;
            row.l1_norm = l1;
            row.envelope = std::exp(-0.25 * s) * l1 / s;
            row.ratio = sup / row.envelope;
            rep.max_ratio = std::max(rep.max_ratio, row.ratio);
            rep.rows.push_back(row);
            rep.integral_s.push_back(s);
            rep.integral_value.push_back(integral);
            ++next;
        }
    }
    rep.integral_s.push_back(S_end);
    rep.integral_value.push_back(integral);
    // I(S_max) is the value recorded at the largest sample.
    const double at_smax = rep.integral_value[rep.integral_value.size() - 2];
    rep.tail_fraction = integral > 0.0 ? (integral - at_smax) / integral : 0.0;
    return rep;
}

}  // namespace hyperflow
