#include "hyperflow/geometry.hpp"

#include <cmath>

#include "hyperflow/errors.hpp"

namespace hyperflow {

double minkowski_form(const MinkowskiVec& a, const MinkowskiVec& b) {
    return a.x0 * b.x0 - a.x1 * b.x1 - a.x2 * b.x2;
}

MinkowskiVec embed_iwasawa(const ChartPoint& p) {
    const double e = std::exp(-p.x2);
    const double q = 0.5 * e * p.x1 * p.x1;
    return {std::cosh(p.x2) + q, std::sinh(p.x2) + q, e * p.x1};
}

ChartPoint chart_from_hyperboloid(const MinkowskiVec& v) {
    const double d = v.x0 - v.x1;
    if (!(d > 0.0)) throw DomainError("chart_from_hyperboloid: point is not on the upper sheet");
    return {v.x2 / d, -std::log(d)};
}

MetricData metric_at(const ChartPoint& p) {
    MetricData m;
    m.h11 = std::exp(-2.0 * p.x2);
    m.h22 = 1.0;
    m.inv11 = std::exp(2.0 * p.x2);
    m.inv22 = 1.0;
    m.sqrt_det = std::exp(-p.x2);
    return m;
}

ChristoffelSymbols christoffel_at(const ChartPoint& p) {
    ChristoffelSymbols c;
    c.gamma[0][0][1] = -1.0;
    c.gamma[0][1][0] = -1.0;
    c.gamma[1][0][0] = std::exp(-2.0 * p.x2);
    return c;
}

double metric_inner(const ChartPoint& p, const Tangent& v, const Tangent& w) {
    return std::exp(-2.0 * p.x2) * v.v1 * w.v1 + v.v2 * w.v2;
}

double metric_norm(const ChartPoint& p, const Tangent& v) {
    return std::sqrt(metric_inner(p, v, v));
}

double geodesic_distance(const ChartPoint& p, const ChartPoint& q) {
    // In y = e^{x2} the chart is the upper half plane, where
    // cosh d = 1 + (dx1^2 + dy^2) / (2 y y'), which equals [P, Q].
    const double yp = std::exp(p.x2);
    const double yq = std::exp(q.x2);
    const double dy = yp * std::expm1(q.x2 - p.x2);
    const double dx = q.x1 - p.x1;
    const double chord = std::sqrt(dx * dx + dy * dy) / std::sqrt(yp * yq);
    return 2.0 * std::asinh(0.5 * chord);
}

Tangent apply_J(const ChartPoint& p, const Tangent& v) {
    return {-std::exp(p.x2) * v.v2, std::exp(-p.x2) * v.v1};
}

ThetaFrame frame_theta(const ChartPoint& p) {
    return {{std::exp(p.x2), 0.0}, {0.0, 1.0}};
}

ChartPoint disk_to_chart(const DiskPoint& z) {
    const double r2 = z.re * z.re + z.im * z.im;
    if (!(r2 < 1.0)) throw DomainError("disk_to_chart: |z| must be < 1");
    // X0 - X1 = |z - i|^2 / (1 - |z|^2), X2 = 2 Re z / (1 - |z|^2).
    const double w = z.re * z.re + (z.im - 1.0) * (z.im - 1.0);
    return {2.0 * z.re / w, std::log((1.0 - r2) / w)};
}

DiskPoint chart_to_disk(const ChartPoint& p) {
    const MinkowskiVec v = embed_iwasawa(p);
    const double d = 1.0 + v.x0;
    return {v.x2 / d, v.x1 / d};
}

double disk_distance(const DiskPoint& a, const DiskPoint& b) {
    // |a - b| / |1 - conj(a) b|
    const double nr = a.re - b.re;
    const double ni = a.im - b.im;
    const double dr = 1.0 - (a.re * b.re + a.im * b.im);
    const double di = -(a.re * b.im - a.im * b.re);
    const double ratio = std::sqrt((nr * nr + ni * ni) / (dr * dr + di * di));
    return 2.0 * std::atanh(ratio);
}

}  // namespace hyperflow
