#pragma once

#include <array>

// Pointwise geometry of the hyperbolic plane in the Iwasawa chart
//   Psi(x1, x2) = (cosh x2 + e^{-x2} x1^2 / 2, sinh x2 + e^{-x2} x1^2 / 2, e^{-x2} x1)
// with metric e^{-2 x2} dx1^2 + dx2^2, and in the Poincare disk.

namespace hyperflow {

struct ChartPoint {
    double x1 = 0.0;
    double x2 = 0.0;
};

struct MinkowskiVec {
    double x0 = 0.0;
    double x1 = 0.0;
    double x2 = 0.0;
};

struct DiskPoint {
    double re = 0.0;
    double im = 0.0;
};

// Components in the coordinate basis d/dx1, d/dx2 at some base point.
struct Tangent {
    double v1 = 0.0;
    double v2 = 0.0;
};

struct MetricData {
    double h11 = 1.0;
    double h22 = 1.0;
    double inv11 = 1.0;
    double inv22 = 1.0;
    double sqrt_det = 1.0;
};

// gamma[k][i][j] with zero-based indices; symmetric in (i, j).
struct ChristoffelSymbols {
    std::array<std::array<std::array<double, 2>, 2>, 2> gamma{};
};

struct ThetaFrame {
    Tangent theta1;
    Tangent theta2;
};

double minkowski_form(const MinkowskiVec& a, const MinkowskiVec& b);

MinkowskiVec embed_iwasawa(const ChartPoint& p);
ChartPoint chart_from_hyperboloid(const MinkowskiVec& v);

MetricData metric_at(const ChartPoint& p);
ChristoffelSymbols christoffel_at(const ChartPoint& p);

// <v, w>_g at the base point p.
double metric_inner(const ChartPoint& p, const Tangent& v, const Tangent& w);
double metric_norm(const ChartPoint& p, const Tangent& v);

// arccosh [P, Q], evaluated through the algebraically equal form
// 2 asinh(|P - Q|_M / 2) so that nearby points keep full relative precision.
double geodesic_distance(const ChartPoint& p, const ChartPoint& q);

Tangent apply_J(const ChartPoint& p, const Tangent& v);
ThetaFrame frame_theta(const ChartPoint& p);

// Disk <-> hyperboloid: X0 = (1+|z|^2)/(1-|z|^2), X1 = 2 Im z/(1-|z|^2),
// X2 = 2 Re z/(1-|z|^2). The origin goes to the apex and d/dx1, d/dx2 at the
// apex go to the real and imaginary directions, so the map preserves orientation.
ChartPoint disk_to_chart(const DiskPoint& z);
DiskPoint chart_to_disk(const ChartPoint& p);
double disk_distance(const DiskPoint& a, const DiskPoint& b);

}  // namespace hyperflow
