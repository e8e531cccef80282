#include "hyperflow/harmonic.hpp"

#include <algorithm>
#include <cmath>

#include "hyperflow/errors.hpp"
#include "hyperflow/fields.hpp"

namespace hyperflow {

HolomorphicMapSpec HolomorphicMapSpec::linear(double lambda) {
    HolomorphicMapSpec s;
    s.coefficients = {{0.0, 0.0}, {lambda, 0.0}};
    return s;
}

double HolomorphicMapSpec::coefficient_sum() const {
    double s = 0.0;
    for (const auto& a : coefficients) s += std::abs(a);
    return s;
}

void HolomorphicMapSpec::validate() const {
    for (const auto& a : coefficients) {
        if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) {
            throw DomainError("HolomorphicMapSpec: coefficients must be finite");
        }
    }
    if (!(coefficient_sum() < 1.0)) throw DomainError("HolomorphicMapSpec: sum of |a_k| must be < 1");
}

DiskPoint eval_holomorphic(const HolomorphicMapSpec& spec, const DiskPoint& z) {
    spec.validate();
    const std::complex<double> w(z.re, z.im);
    std::complex<double> acc(0.0, 0.0);
    for (auto it = spec.coefficients.rbegin(); it != spec.coefficients.rend(); ++it) acc = acc * w + *it;
    return {acc.real(), acc.imag()};
}

MapField to_chart(const HolomorphicMapSpec& spec, const Grid& grid) {
    spec.validate();
    return map_from_function(grid, [&spec](const ChartPoint& p) {
        return disk_to_chart(eval_holomorphic(spec, chart_to_disk(p)));
    });
}

AdmissibilityReport admissibility_report(const MapField& Q) {
    const Grid& g = Q.grid;
    AdmissibilityReport r;
    TangentField d1(g), d2(g);
    d1.X1 = partial(g, Q.u1, 1);
    d1.X2 = partial(g, Q.u2, 1);
    d2.X1 = partial(g, Q.u1, 2);
    d2.X2 = partial(g, Q.u2, 2);
    const Hessian H = covariant_hessian(Q);
    // Third-order quantity: nabla applied once more to each Hessian component,
    // without a further domain correction (finiteness and stability only).
    const ScalarField t11 = covariant_gradient_sq(H.h11, Q);
    const ScalarField t12 = covariant_gradient_sq(H.h12, Q);
    const ScalarField t22 = covariant_gradient_sq(H.h22, Q);
    const ScalarField f2 = hessian_norm_sq(H, Q);
    ScalarField f1(g), f3(g);
    for (int j = 0; j < g.n2; ++j) {
        const double w = std::exp(2.0 * g.x2(j));
        for (int i = 0; i < g.n1; ++i) {
            const std::size_t k = g.index(i, j);
            const double m = std::exp(-2.0 * Q.u2[k]);
            f1.values[k] = w * (m * d1.X1[k] * d1.X1[k] + d1.X2[k] * d1.X2[k]) + m * d2.X1[k] * d2.X1[k] +
                           d2.X2[k] * d2.X2[k];
            f3.values[k] = w * w * t11.values[k] + 2.0 * w * t12.values[k] + t22.values[k];
        }
    }
    r.d_l2 = std::sqrt(integrate(f1));
    r.grad_d_l2 = std::sqrt(integrate(f2));
    r.grad2_d_l2 = std::sqrt(integrate(f3));
    const ChartPoint origin{0.0, 0.0};
    for (int j = 0; j < g.n2; ++j) {
        for (int i = 0; i < g.n1; ++i) {
            const std::size_t k = g.index(i, j);
            r.range_radius = std::max(r.range_radius, geodesic_distance(Q.at(k), origin));
            const double rx = geodesic_distance(g.point(i, j), origin);
            r.weighted_sup = std::max(r.weighted_sup, std::exp(rx) * std::sqrt(f1.values[k]));
        }
    }
    return r;
}

MapField perturb(const MapField& Q, const BumpSpec& bump) {
    const Grid& g = Q.grid;
    if (!(bump.radius > 0.0) || !std::isfinite(bump.radius)) throw DomainError("perturb: radius must be > 0");
    if (!std::isfinite(bump.amplitude)) throw DomainError("perturb: amplitude must be finite");
    // In y = e^{x2} the ball is a Euclidean disk spanning x2 in [c2 - r, c2 + r]
    // and x1 in c1 -/+ e^{c2} sinh r.
    const double w1 = std::exp(bump.center.x2) * std::sinh(bump.radius);
    if (bump.center.x2 - bump.radius <= g.x2_min || bump.center.x2 + bump.radius >= g.x2_max ||
        bump.center.x1 - w1 <= g.x1_min || bump.center.x1 + w1 >= g.x1_max) {
        throw DomainError("perturb: support ball touches the boundary ring");
    }
    MapField u = Q;
    for (int j = 0; j < g.n2; ++j) {
        for (int i = 0; i < g.n1; ++i) {
            const double r = geodesic_distance(g.point(i, j), bump.center);
            if (r >= bump.radius) continue;
            if (g.on_boundary(i, j)) throw DomainError("perturb: support ball touches the boundary ring");
            const double q = r / bump.radius;
            const double phi = std::exp(1.0 - 1.0 / (1.0 - q * q));
            const std::size_t k = g.index(i, j);
            const double a = bump.amplitude * phi;
            u.u1[k] += a * std::cos(bump.angle) * std::exp(Q.u2[k]);
            u.u2[k] += a * std::sin(bump.angle);
        }
    }
    return u;
}

}  // namespace hyperflow
