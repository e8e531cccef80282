#include "hyperflow/fields.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hyperflow/errors.hpp"

namespace hyperflow {

namespace {

void require_grid(const Grid& a, const Grid& b, const char* what) {
    if (a != b) throw DomainError(std::string(what) + ": grid mismatch");
}

// First derivative along a strided line of n samples.
void diff_line(const double* f, double* out, int n, std::size_t stride, double h) {
    const double c = 0.5 / h;
    out[0] = c * (-3.0 * f[0] + 4.0 * f[stride] - f[2 * stride]);
    for (int k = 1; k < n - 1; ++k) {
        out[k * stride] = c * (f[(k + 1) * stride] - f[(k - 1) * stride]);
    }
    const std::size_t last = static_cast<std::size_t>(n - 1) * stride;
    out[last] = c * (3.0 * f[last] - 4.0 * f[last - stride] + f[last - 2 * stride]);
}

void diff2_line(const double* f, double* out, int n, std::size_t stride, double h) {
    const double c = 1.0 / (h * h);
    out[0] = c * (2.0 * f[0] - 5.0 * f[stride] + 4.0 * f[2 * stride] - f[3 * stride]);
    for (int k = 1; k < n - 1; ++k) {
        out[k * stride] = c * (f[(k + 1) * stride] - 2.0 * f[k * stride] + f[(k - 1) * stride]);
    }
    const std::size_t last = static_cast<std::size_t>(n - 1) * stride;
    out[last] = c * (2.0 * f[last] - 5.0 * f[last - stride] + 4.0 * f[last - 2 * stride] -
                     f[last - 3 * stride]);
}

}  // namespace

std::vector<double> partial(const Grid& grid, const std::vector<double>& f, int dir) {
    std::vector<double> out(grid.size());
    if (dir == 1) {
        for (int j = 0; j < grid.n2; ++j) {
            const std::size_t row = grid.index(0, j);
            diff_line(f.data() + row, out.data() + row, grid.n1, 1, grid.h1);
        }
    } else if (dir == 2) {
        for (int i = 0; i < grid.n1; ++i) {
            diff_line(f.data() + i, out.data() + i, grid.n2, static_cast<std::size_t>(grid.n1), grid.h2);
        }
    } else {
        throw DomainError("partial: dir must be 1 or 2");
    }
    return out;
}

std::vector<double> second_partial(const Grid& grid, const std::vector<double>& f, int dir) {
    std::vector<double> out(grid.size());
    if (dir == 1) {
        for (int j = 0; j < grid.n2; ++j) {
            const std::size_t row = grid.index(0, j);
            diff2_line(f.data() + row, out.data() + row, grid.n1, 1, grid.h1);
        }
    } else if (dir == 2) {
        for (int i = 0; i < grid.n1; ++i) {
            diff2_line(f.data() + i, out.data() + i, grid.n2, static_cast<std::size_t>(grid.n1), grid.h2);
        }
    } else {
        throw DomainError("second_partial: dir must be 1 or 2");
    }
    return out;
}

std::vector<double> laplace_beltrami(const Grid& grid, const std::vector<double>& f) {
    const std::vector<double> f11 = second_partial(grid, f, 1);
    const std::vector<double> f22 = second_partial(grid, f, 2);
    const std::vector<double> f2 = partial(grid, f, 2);
    std::vector<double> out(grid.size());
    for (int j = 0; j < grid.n2; ++j) {
        const double a = std::exp(2.0 * grid.x2(j));
        for (int i = 0; i < grid.n1; ++i) {
            const std::size_t k = grid.index(i, j);
            out[k] = a * f11[k] + f22[k] - f2[k];
        }
    }
    return out;
}

ScalarField laplace_beltrami(const ScalarField& f) {
    ScalarField out(f.grid);
    out.values = laplace_beltrami(f.grid, f.values);
    return out;
}

TangentField pullback_covariant_derivative(const TangentField& X, const MapField& u, int dir) {
    require_grid(X.grid, u.grid, "pullback_covariant_derivative");
    const Grid& g = u.grid;
    const std::vector<double> du1 = partial(g, u.u1, dir);
    const std::vector<double> du2 = partial(g, u.u2, dir);
    const std::vector<double> dX1 = partial(g, X.X1, dir);
    const std::vector<double> dX2 = partial(g, X.X2, dir);
    TangentField out(g);
    for (std::size_t k = 0; k < g.size(); ++k) {
        // Gamma^1_12 = Gamma^1_21 = -1, Gamma^2_11 = e^{-2 u2}
        out.X1[k] = dX1[k] - (du1[k] * X.X2[k] + du2[k] * X.X1[k]);
        out.X2[k] = dX2[k] + std::exp(-2.0 * u.u2[k]) * du1[k] * X.X1[k];
    }
    return out;
}

Hessian covariant_hessian(const MapField& u) {
    const Grid& g = u.grid;
    TangentField d1(g), d2(g);
    d1.X1 = partial(g, u.u1, 1);
    d1.X2 = partial(g, u.u2, 1);
    d2.X1 = partial(g, u.u1, 2);
    d2.X2 = partial(g, u.u2, 2);
    Hessian H{pullback_covariant_derivative(d1, u, 1), pullback_covariant_derivative(d2, u, 1),
              pullback_covariant_derivative(d2, u, 2)};
    for (int j = 0; j < g.n2; ++j) {
        const double e = std::exp(-2.0 * g.x2(j));
        for (int i = 0; i < g.n1; ++i) {
            const std::size_t k = g.index(i, j);
            // Domain Christoffel symbols: Gamma^2_11 = e^{-2 x2}, Gamma^1_12 = -1.
            H.h11.X1[k] -= e * d2.X1[k];
            H.h11.X2[k] -= e * d2.X2[k];
            H.h12.X1[k] += d1.X1[k];
            H.h12.X2[k] += d1.X2[k];
        }
    }
    return H;
}

ScalarField hessian_norm_sq(const Hessian& H, const MapField& u) {
    const Grid& g = u.grid;
    ScalarField out(g);
    for (int j = 0; j < g.n2; ++j) {
        const double w = std::exp(2.0 * g.x2(j));
        for (int i = 0; i < g.n1; ++i) {
            const std::size_t k = g.index(i, j);
            const double m = std::exp(-2.0 * u.u2[k]);
            auto sq = [&](const TangentField& X) { return m * X.X1[k] * X.X1[k] + X.X2[k] * X.X2[k]; };
            out.values[k] = w * w * sq(H.h11) + 2.0 * w * sq(H.h12) + sq(H.h22);
        }
    }
    return out;
}

ScalarField covariant_gradient_sq(const TangentField& X, const MapField& u) {
    const Grid& g = u.grid;
    const TangentField a = pullback_covariant_derivative(X, u, 1);
    const TangentField b = pullback_covariant_derivative(X, u, 2);
    ScalarField out(g);
    for (int j = 0; j < g.n2; ++j) {
        const double w = std::exp(2.0 * g.x2(j));
        for (int i = 0; i < g.n1; ++i) {
            const std::size_t k = g.index(i, j);
            const double m = std::exp(-2.0 * u.u2[k]);
            out.values[k] = w * (m * a.X1[k] * a.X1[k] + a.X2[k] * a.X2[k]) + m * b.X1[k] * b.X1[k] + b.X2[k] * b.X2[k];
        }
    }
    return out;
}

TangentField tension_field(const MapField& u) {
    const Grid& g = u.grid;
    const std::vector<double> a1 = partial(g, u.u1, 1);
    const std::vector<double> a2 = partial(g, u.u1, 2);
    const std::vector<double> b1 = partial(g, u.u2, 1);
    const std::vector<double> b2 = partial(g, u.u2, 2);
    const std::vector<double> a11 = second_partial(g, u.u1, 1);
    const std::vector<double> a22 = second_partial(g, u.u1, 2);
    const std::vector<double> b11 = second_partial(g, u.u2, 1);
    const std::vector<double> b22 = second_partial(g, u.u2, 2);
    TangentField tau(g);
    for (int j = 1; j < g.n2 - 1; ++j) {
        const double e = std::exp(2.0 * g.x2(j));
        for (int i = 1; i < g.n1 - 1; ++i) {
            const std::size_t k = g.index(i, j);
            const double lap1 = e * a11[k] + a22[k] - a2[k];
            const double lap2 = e * b11[k] + b22[k] - b2[k];
            tau.X1[k] = lap1 - 2.0 * (e * a1[k] * b1[k] + a2[k] * b2[k]);
            tau.X2[k] = lap2 + std::exp(-2.0 * u.u2[k]) * (e * a1[k] * a1[k] + a2[k] * a2[k]);
        }
    }
    return tau;
}

ScalarField energy_density(const MapField& u) {
    const Grid& g = u.grid;
    const std::vector<double> a1 = partial(g, u.u1, 1);
    const std::vector<double> a2 = partial(g, u.u1, 2);
    const std::vector<double> b1 = partial(g, u.u2, 1);
    const std::vector<double> b2 = partial(g, u.u2, 2);
    ScalarField e(g);
    for (int j = 0; j < g.n2; ++j) {
        const double w = std::exp(2.0 * g.x2(j));
        for (int i = 0; i < g.n1; ++i) {
            const std::size_t k = g.index(i, j);
            const double m = std::exp(-2.0 * u.u2[k]);
            e.values[k] = 0.5 * (w * (m * a1[k] * a1[k] + b1[k] * b1[k]) + m * a2[k] * a2[k] + b2[k] * b2[k]);
        }
    }
    return e;
}

ScalarField pointwise_norm(const TangentField& X, const MapField& u) {
    require_grid(X.grid, u.grid, "pointwise_norm");
    ScalarField out(u.grid);
    for (std::size_t k = 0; k < u.grid.size(); ++k) {
        const double m = std::exp(-2.0 * u.u2[k]);
        out.values[k] = std::sqrt(m * X.X1[k] * X.X1[k] + X.X2[k] * X.X2[k]);
    }
    return out;
}

std::vector<double> quadrature_weights(const Grid& grid) {
    std::vector<double> w(grid.size());
    for (int j = 0; j < grid.n2; ++j) {
        const double cj = (j == 0 || j == grid.n2 - 1) ? 0.5 : 1.0;
        const double base = std::exp(-grid.x2(j)) * grid.h1 * grid.h2 * cj;
        for (int i = 0; i < grid.n1; ++i) {
            const double ci = (i == 0 || i == grid.n1 - 1) ? 0.5 : 1.0;
            w[grid.index(i, j)] = base * ci;
        }
    }
    return w;
}

double integrate(const ScalarField& f) {
    const std::vector<double> w = quadrature_weights(f.grid);
    double sum = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) sum += w[k] * f.values[k];
    return sum;
}

double lp_norm(const ScalarField& f, Norm p) {
    if (p == Norm::Linf) {
        double m = 0.0;
        for (double v : f.values) m = std::max(m, std::abs(v));
        return m;
    }
    const std::vector<double> w = quadrature_weights(f.grid);
    double sum = 0.0;
    if (p == Norm::L1) {
        for (std::size_t k = 0; k < w.size(); ++k) sum += w[k] * std::abs(f.values[k]);
        return sum;
    }
    for (std::size_t k = 0; k < w.size(); ++k) sum += w[k] * f.values[k] * f.values[k];
    return std::sqrt(sum);
}

double lp_norm(const TangentField& X, const MapField& u, Norm p) {
    return lp_norm(pointwise_norm(X, u), p);
}

double l2_inner(const TangentField& X, const TangentField& Y, const MapField& u) {
    require_grid(X.grid, u.grid, "l2_inner");
    require_grid(Y.grid, u.grid, "l2_inner");
    const std::vector<double> w = quadrature_weights(u.grid);
    double sum = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) {
        const double m = std::exp(-2.0 * u.u2[k]);
        sum += w[k] * (m * X.X1[k] * Y.X1[k] + X.X2[k] * Y.X2[k]);
    }
    return sum;
}

ScalarField pointwise_distance(const MapField& u, const MapField& q) {
    require_grid(u.grid, q.grid, "pointwise_distance");
    ScalarField d(u.grid);
    for (std::size_t k = 0; k < u.grid.size(); ++k) d.values[k] = geodesic_distance(u.at(k), q.at(k));
    return d;
}

double sup_distance(const MapField& u, const MapField& q) {
    return lp_norm(pointwise_distance(u, q), Norm::Linf);
}

MapField map_from_function(const Grid& grid, const std::function<ChartPoint(const ChartPoint&)>& fn) {
    MapField u(grid);
    for (int j = 0; j < grid.n2; ++j) {
        for (int i = 0; i < grid.n1; ++i) {
            const ChartPoint y = fn(grid.point(i, j));
            const std::size_t k = grid.index(i, j);
            u.u1[k] = y.x1;
            u.u2[k] = y.x2;
        }
    }
    return u;
}

MapField identity_map(const Grid& grid) {
    return map_from_function(grid, [](const ChartPoint& p) { return p; });
}

ScalarField scalar_from_function(const Grid& grid, const std::function<double(const ChartPoint&)>& fn) {
    ScalarField f(grid);
    for (int j = 0; j < grid.n2; ++j) {
        for (int i = 0; i < grid.n1; ++i) f.values[grid.index(i, j)] = fn(grid.point(i, j));
    }
    return f;
}

void require_finite(const MapField& u, const char* what) {
    for (std::size_t k = 0; k < u.u1.size(); ++k) {
        if (!std::isfinite(u.u1[k]) || !std::isfinite(u.u2[k])) {
            throw NumericalError(std::string(what) + ": non-finite map value at node " + std::to_string(k));
        }
    }
}

void require_finite(const TangentField& X, const char* what) {
    for (std::size_t k = 0; k < X.X1.size(); ++k) {
        if (!std::isfinite(X.X1[k]) || !std::isfinite(X.X2[k])) {
            throw NumericalError(std::string(what) + ": non-finite tangent value at node " + std::to_string(k));
        }
    }
}

Grid Grid::make(double x1_min, double x1_max, double x2_min, double x2_max, int n1, int n2) {
    if (n1 < 8 || n2 < 8) throw DomainError("Grid: n1 and n2 must be at least 8");
    if (!(x1_max > x1_min) || !(x2_max > x2_min) || !std::isfinite(x1_max - x1_min) ||
        !std::isfinite(x2_max - x2_min)) {
        throw DomainError("Grid: ranges must be finite and increasing");
    }
    Grid g;
    g.x1_min = x1_min;
    g.x1_max = x1_max;
    g.x2_min = x2_min;
    g.x2_max = x2_max;
    g.n1 = n1;
    g.n2 = n2;
    g.h1 = (x1_max - x1_min) / (n1 - 1);
    g.h2 = (x2_max - x2_min) / (n2 - 1);
    return g;
}

Grid Grid::refined() const {
    return make(x1_min, x1_max, x2_min, x2_max, 2 * n1 - 1, 2 * n2 - 1);
}

bool Grid::operator==(const Grid& o) const {
    return x1_min == o.x1_min && x1_max == o.x1_max && x2_min == o.x2_min && x2_max == o.x2_max &&
           n1 == o.n1 && n2 == o.n2;
}

}  // namespace hyperflow
