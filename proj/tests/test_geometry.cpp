#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "hyperflow/errors.hpp"
#include "hyperflow/geometry.hpp"

using namespace hyperflow;

namespace {

std::vector<ChartPoint> random_points(int n, unsigned seed, double r1 = 3.0, double r2 = 2.0) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> a(-r1, r1), b(-r2, r2);
    std::vector<ChartPoint> out;
    for (int k = 0; k < n; ++k) out.push_back({a(rng), b(rng)});
    return out;
}

// arccosh of the Minkowski form, the textbook expression.
double distance_oracle(const ChartPoint& p, const ChartPoint& q) {
    return std::acosh(std::max(1.0, minkowski_form(embed_iwasawa(p), embed_iwasawa(q))));
}

double metric_component(const ChartPoint& p, int i, int j) {
    const MetricData m = metric_at(p);
    if (i != j) return 0.0;
    return i == 0 ? m.h11 : m.h22;
}

// Levi-Civita formula with centered differences of metric_at.
double christoffel_oracle(const ChartPoint& p, int k, int i, int j, double h) {
    auto dg = [&](int l, int a, int b) {
        ChartPoint pp = p, pm = p;
        (l == 0 ? pp.x1 : pp.x2) += h;
        (l == 0 ? pm.x1 : pm.x2) -= h;
        return (metric_component(pp, a, b) - metric_component(pm, a, b)) / (2.0 * h);
    };
    const double ginv = 1.0 / metric_component(p, k, k);
    return 0.5 * ginv * (dg(i, j, k) + dg(j, i, k) - dg(k, i, j));
}

}  // namespace

TEST(Embedding, KnownPoints) {
    const MinkowskiVec o = embed_iwasawa({0.0, 0.0});
    EXPECT_DOUBLE_EQ(o.x0, 1.0);
    EXPECT_DOUBLE_EQ(o.x1, 0.0);
    EXPECT_DOUBLE_EQ(o.x2, 0.0);
    const MinkowskiVec v = embed_iwasawa({0.0, 1.0});
    EXPECT_NEAR(v.x0, std::cosh(1.0), 1e-15);
    EXPECT_NEAR(v.x1, std::sinh(1.0), 1e-15);
    EXPECT_NEAR(v.x2, 0.0, 1e-15);
}

TEST(Embedding, LandsOnHyperboloid) {
    for (const ChartPoint& p : random_points(200, 1)) {
        const MinkowskiVec v = embed_iwasawa(p);
        EXPECT_NEAR(minkowski_form(v, v), 1.0, 1e-12 * v.x0 * v.x0);
        EXPECT_GT(v.x0, 0.0);
        const ChartPoint back = chart_from_hyperboloid(v);
        EXPECT_NEAR(back.x1, p.x1, 1e-11);
        EXPECT_NEAR(back.x2, p.x2, 1e-11);
    }
}

TEST(Metric, ClosedForms) {
    EXPECT_DOUBLE_EQ(metric_at({2.5, 0.0}).h11, 1.0);
    EXPECT_DOUBLE_EQ(metric_at({-1.0, 0.0}).h22, 1.0);
    EXPECT_NEAR(metric_at({0.3, 1.0}).h11, std::exp(-2.0), 1e-16);
    for (const ChartPoint& p : random_points(50, 2)) {
        const MetricData m = metric_at(p);
        EXPECT_NEAR(m.inv11 * m.h11, 1.0, 1e-14);
        EXPECT_NEAR(m.inv22 * m.h22, 1.0, 1e-14);
        EXPECT_NEAR(m.sqrt_det * m.sqrt_det, m.h11 * m.h22, 1e-14 * m.h11);
    }
}

TEST(Christoffel, ClosedForms) {
    for (const ChartPoint& p : random_points(50, 3)) {
        const auto& g = christoffel_at(p).gamma;
        EXPECT_DOUBLE_EQ(g[0][0][1], -1.0);
        EXPECT_DOUBLE_EQ(g[0][1][0], -1.0);
        EXPECT_NEAR(g[1][0][0], std::exp(-2.0 * p.x2), 1e-15);
        EXPECT_DOUBLE_EQ(g[0][1][1], 0.0);
        EXPECT_DOUBLE_EQ(g[1][1][0], 0.0);
        EXPECT_DOUBLE_EQ(g[1][0][1], 0.0);
        EXPECT_DOUBLE_EQ(g[1][1][1], 0.0);
        EXPECT_DOUBLE_EQ(g[0][0][0], 0.0);
    }
    EXPECT_DOUBLE_EQ(christoffel_at({0.7, 0.0}).gamma[1][0][0], 1.0);
}

TEST(Christoffel, MatchesLeviCivitaOracleAtSecondOrder) {
    const ChartPoint p{0.4, 0.9};
    const auto& g = christoffel_at(p).gamma;
    double err_h = 0.0, err_h2 = 0.0;
    for (int k = 0; k < 2; ++k)
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                err_h = std::max(err_h, std::abs(christoffel_oracle(p, k, i, j, 1e-2) - g[k][i][j]));
                err_h2 = std::max(err_h2, std::abs(christoffel_oracle(p, k, i, j, 5e-3) - g[k][i][j]));
            }
    EXPECT_LT(err_h, 1e-4);
    EXPECT_GT(err_h / err_h2, 3.5);
}

TEST(Distance, KnownValuesAndSymmetry) {
    EXPECT_EQ(geodesic_distance({0.3, -0.2}, {0.3, -0.2}), 0.0);
    EXPECT_NEAR(geodesic_distance({0.0, 0.0}, {0.0, 1.0}), 1.0, 1e-15);
    const auto pts = random_points(60, 4);
    for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
        const double d = geodesic_distance(pts[k], pts[k + 1]);
        EXPECT_DOUBLE_EQ(d, geodesic_distance(pts[k + 1], pts[k]));
        EXPECT_NEAR(d, distance_oracle(pts[k], pts[k + 1]), 1e-9 * std::max(1.0, d));
    }
}

TEST(Distance, TriangleInequality) {
    const auto pts = random_points(90, 5);
    for (std::size_t k = 0; k + 2 < pts.size(); k += 3) {
        const double ab = geodesic_distance(pts[k], pts[k + 1]);
        const double bc = geodesic_distance(pts[k + 1], pts[k + 2]);
        const double ac = geodesic_distance(pts[k], pts[k + 2]);
        EXPECT_LE(ac, ab + bc + 1e-12);
    }
}

TEST(Distance, NearbyPointsKeepRelativePrecision) {
    const ChartPoint p{0.2, 0.5};
    const ChartPoint up{p.x1, p.x2 + 1e-9}, side{p.x1 + 1e-9, p.x2};
    // The offsets actually represented, exact by Sterbenz.
    const double d2 = up.x2 - p.x2, d1 = side.x1 - p.x1;
    EXPECT_NEAR(geodesic_distance(p, up) / d2, 1.0, 1e-12);
    EXPECT_NEAR(geodesic_distance(p, side) / (std::exp(-p.x2) * d1), 1.0, 1e-12);
}

TEST(ComplexStructure, KnownValueAndAlgebra) {
    const Tangent j = apply_J({0.0, 0.0}, {1.0, 0.0});
    EXPECT_NEAR(j.v1, 0.0, 1e-16);
    EXPECT_NEAR(j.v2, 1.0, 1e-16);
    std::mt19937 rng(6);
    std::normal_distribution<double> n;
    for (const ChartPoint& p : random_points(50, 7)) {
        const Tangent v{n(rng), n(rng)};
        const Tangent jj = apply_J(p, apply_J(p, v));
        EXPECT_NEAR(jj.v1, -v.v1, 1e-12 * std::max(1.0, std::abs(v.v1)));
        EXPECT_NEAR(jj.v2, -v.v2, 1e-12 * std::max(1.0, std::abs(v.v2)));
        const Tangent jv = apply_J(p, v);
        EXPECT_NEAR(metric_norm(p, jv), metric_norm(p, v), 1e-12 * metric_norm(p, v));
        EXPECT_NEAR(metric_inner(p, jv, v), 0.0, 1e-12 * metric_norm(p, v) * metric_norm(p, v));
    }
}

TEST(Frame, ThetaIsOrthonormalAndJRelated) {
    const ThetaFrame f0 = frame_theta({1.3, 0.0});
    EXPECT_DOUBLE_EQ(f0.theta1.v1, 1.0);
    EXPECT_DOUBLE_EQ(f0.theta1.v2, 0.0);
    EXPECT_NEAR(f0.theta2.v1, 0.0, 1e-16);
    EXPECT_NEAR(f0.theta2.v2, 1.0, 1e-16);
    for (const ChartPoint& p : random_points(50, 8)) {
        const ThetaFrame f = frame_theta(p);
        EXPECT_NEAR(metric_inner(p, f.theta1, f.theta1), 1.0, 1e-13);
        EXPECT_NEAR(metric_inner(p, f.theta2, f.theta2), 1.0, 1e-13);
        EXPECT_NEAR(metric_inner(p, f.theta1, f.theta2), 0.0, 1e-13);
        const Tangent j = apply_J(p, f.theta1);
        EXPECT_NEAR(j.v1, f.theta2.v1, 1e-13);
        EXPECT_NEAR(j.v2, f.theta2.v2, 1e-13);
    }
}

TEST(DiskModel, OriginAndOrientation) {
    const ChartPoint o = disk_to_chart({0.0, 0.0});
    EXPECT_NEAR(o.x1, 0.0, 1e-16);
    EXPECT_NEAR(o.x2, 0.0, 1e-16);
    // d/dx1 at the apex points along the real axis, d/dx2 along the imaginary axis.
    const double eps = 1e-6;
    const DiskPoint a = chart_to_disk({eps, 0.0});
    const DiskPoint b = chart_to_disk({0.0, eps});
    EXPECT_NEAR(a.re / eps, 0.5, 1e-6);
    EXPECT_NEAR(a.im / eps, 0.0, 1e-6);
    EXPECT_NEAR(b.re / eps, 0.0, 1e-6);
    EXPECT_NEAR(b.im / eps, 0.5, 1e-6);
}

TEST(DiskModel, RoundTripAndIsometry) {
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> r(0.0, 0.9), th(0.0, 2.0 * M_PI);
    std::vector<DiskPoint> zs;
    for (int k = 0; k < 100; ++k) {
        const double rad = r(rng), ang = th(rng);
        zs.push_back({rad * std::cos(ang), rad * std::sin(ang)});
    }
    for (const DiskPoint& z : zs) {
        const DiskPoint back = chart_to_disk(disk_to_chart(z));
        EXPECT_NEAR(back.re, z.re, 1e-12);
        EXPECT_NEAR(back.im, z.im, 1e-12);
    }
    for (std::size_t k = 0; k + 1 < zs.size(); ++k) {
        EXPECT_NEAR(disk_distance(zs[k], zs[k + 1]),
                    geodesic_distance(disk_to_chart(zs[k]), disk_to_chart(zs[k + 1])), 1e-10);
    }
}

TEST(DiskModel, RejectsPointsOutsideTheDisk) {
    EXPECT_THROW(disk_to_chart({1.0, 0.0}), DomainError);
    EXPECT_THROW(disk_to_chart({0.8, 0.7}), DomainError);
}
