#pragma once

#include <functional>
#include <vector>

#include "hyperflow/grid.hpp"

namespace hyperflow {

enum class Norm { L1, L2, Linf };

// Centered second-order differences, one-sided second-order on the boundary ring.
// dir is 1 or 2.
std::vector<double> partial(const Grid& grid, const std::vector<double>& f, int dir);
std::vector<double> second_partial(const Grid& grid, const std::vector<double>& f, int dir);

// e^{2 x2} f_11 + f_22 - f_2
std::vector<double> laplace_beltrami(const Grid& grid, const std::vector<double>& f);
ScalarField laplace_beltrami(const ScalarField& f);

// (nabla_i X)^a = d_i X^a + Gamma^a_bc(u) d_i u^b X^c
TangentField pullback_covariant_derivative(const TangentField& X, const MapField& u, int dir);

// Covariant Hessian nabla du with the domain Christoffel correction:
// components (11, 12, 22) as tangent fields along u.
struct Hessian {
    TangentField h11, h12, h22;
};
Hessian covariant_hessian(const MapField& u);
// h^{ii} h^{jj} |(nabla du)_ij|_g^2 summed over i, j.
ScalarField hessian_norm_sq(const Hessian& H, const MapField& u);
// h^{ii} |nabla_i X|_g^2 summed over i.
ScalarField covariant_gradient_sq(const TangentField& X, const MapField& u);

// Interior values of the tension field; zero on the boundary ring.
TangentField tension_field(const MapField& u);

ScalarField energy_density(const MapField& u);

// |X|_g at every node.
ScalarField pointwise_norm(const TangentField& X, const MapField& u);

// Quadrature weights e^{-x2} h1 h2 with trapezoid factors on the boundary ring.
std::vector<double> quadrature_weights(const Grid& grid);

double integrate(const ScalarField& f);
double lp_norm(const ScalarField& f, Norm p);
double lp_norm(const TangentField& X, const MapField& u, Norm p);
double l2_inner(const TangentField& X, const TangentField& Y, const MapField& u);

double sup_distance(const MapField& u, const MapField& q);
ScalarField pointwise_distance(const MapField& u, const MapField& q);

MapField map_from_function(const Grid& grid, const std::function<ChartPoint(const ChartPoint&)>& fn);
MapField identity_map(const Grid& grid);
ScalarField scalar_from_function(const Grid& grid, const std::function<double(const ChartPoint&)>& fn);

// Throws NumericalError naming `what` if any value is non-finite.
void require_finite(const MapField& u, const char* what);
void require_finite(const TangentField& X, const char* what);

}  // namespace hyperflow
