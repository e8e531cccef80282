#include <cmath>
#include <complex>

#include <gtest/gtest.h>

#include "hyperflow/errors.hpp"
#include "hyperflow/fields.hpp"
#include "hyperflow/harmonic.hpp"
#include "hyperflow/monitors.hpp"

using namespace hyperflow;

namespace {

Grid base_grid(int n = 48) { return Grid::make(-4.0, 4.0, -3.0, 3.0, n, n); }

}  // namespace

TEST(HolomorphicMap, Validation) {
    EXPECT_NO_THROW(HolomorphicMapSpec::linear(0.5).validate());
    EXPECT_THROW(HolomorphicMapSpec::linear(1.0).validate(), DomainError);
    HolomorphicMapSpec s;
    s.coefficients = {{0.3, 0.0}, {0.0, 0.5}, {0.2, 0.2}};
    EXPECT_NEAR(s.coefficient_sum(), 0.8 + std::sqrt(0.08), 1e-15);
    EXPECT_THROW(s.validate(), DomainError);
    s.coefficients = {{NAN, 0.0}};
    EXPECT_THROW(s.validate(), DomainError);
}

TEST(HolomorphicMap, HornerMatchesDirectEvaluation) {
    HolomorphicMapSpec s;
    s.coefficients = {{0.1, -0.05}, {0.3, 0.1}, {0.0, 0.2}, {-0.1, 0.0}};
    const std::complex<double> z(0.4, -0.7);
    const std::complex<double> direct = s.coefficients[0] + s.coefficients[1] * z + s.coefficients[2] * z * z +
                                        s.coefficients[3] * z * z * z;
    const DiskPoint w = eval_holomorphic(s, {z.real(), z.imag()});
    EXPECT_NEAR(w.re, direct.real(), 1e-15);
    EXPECT_NEAR(w.im, direct.imag(), 1e-15);
}

TEST(HolomorphicMap, LinearMapScalesTheDiskPicture) {
    const Grid g = base_grid(24);
    const MapField Q = to_chart(HolomorphicMapSpec::linear(0.5), g);
    for (int j = 0; j < g.n2; ++j)
        for (int i = 0; i < g.n1; ++i) {
            const DiskPoint z = chart_to_disk(g.point(i, j));
            const DiskPoint w = chart_to_disk(Q.at(g.index(i, j)));
            EXPECT_NEAR(w.re, 0.5 * z.re, 1e-12);
            EXPECT_NEAR(w.im, 0.5 * z.im, 1e-12);
        }
    const MapField zero = to_chart(HolomorphicMapSpec::linear(0.0), g);
    for (std::size_t k = 0; k < g.size(); ++k) {
        EXPECT_NEAR(zero.u1[k], 0.0, 1e-15);
        EXPECT_NEAR(zero.u2[k], 0.0, 1e-15);
    }
}

TEST(Admissibility, RangeRadiusMatchesTheDiskOracle) {
    const Grid g = base_grid(24);
    const double lambda = 0.5;
    const AdmissibilityReport r = admissibility_report(to_chart(HolomorphicMapSpec::linear(lambda), g));
    double expected = 0.0;
    for (int j = 0; j < g.n2; ++j)
        for (int i = 0; i < g.n1; ++i) {
            const DiskPoint z = chart_to_disk(g.point(i, j));
            expected = std::max(expected, 2.0 * std::atanh(lambda * std::hypot(z.re, z.im)));
        }
    EXPECT_NEAR(r.range_radius, expected, 1e-10);
    EXPECT_LT(r.range_radius, 2.0 * std::atanh(lambda));
}

TEST(Admissibility, NormsGrowWithLambdaAndAreLinearForSmallLambda) {
    const Grid g = base_grid();
    double prev = 0.0, prev_weighted = 0.0;
    std::vector<double> per_lambda;
    for (double lambda : {0.01, 0.25, 0.5, 0.75}) {
        const AdmissibilityReport r = admissibility_report(to_chart(HolomorphicMapSpec::linear(lambda), g));
        EXPECT_TRUE(std::isfinite(r.d_l2) && std::isfinite(r.grad_d_l2) && std::isfinite(r.grad2_d_l2));
        EXPECT_GT(r.d_l2, prev);
        EXPECT_GT(r.weighted_sup, prev_weighted);
        prev = r.d_l2;
        prev_weighted = r.weighted_sup;
        per_lambda.push_back(r.d_l2 / lambda);
    }
    // |dQ| <= C lambda with C bounded by the largest lambda.
    for (double c : per_lambda) EXPECT_LE(c, per_lambda.back() * (1.0 + 1e-12));
}

TEST(Admissibility, WeightedSupIsStableUnderRefinement) {
    const Grid g = base_grid(48);
    const HolomorphicMapSpec spec = HolomorphicMapSpec::linear(0.5);
    const double a = admissibility_report(to_chart(spec, g)).weighted_sup;
    const double b = admissibility_report(to_chart(spec, g.refined())).weighted_sup;
    EXPECT_NEAR(a / b, 1.0, 0.05);
    const double d_a = admissibility_report(to_chart(spec, g)).d_l2;
    const double d_b = admissibility_report(to_chart(spec, g.refined())).d_l2;
    EXPECT_NEAR(d_a / d_b, 1.0, 0.02);
}

TEST(Perturb, ZeroAmplitudeIsExact) {
    const Grid g = base_grid();
    const MapField Q = to_chart(HolomorphicMapSpec::linear(0.5), g);
    const MapField u = perturb(Q, BumpSpec{{0.0, 0.0}, 1.0, 0.0});
    EXPECT_EQ(u.u1, Q.u1);
    EXPECT_EQ(u.u2, Q.u2);
}

TEST(Perturb, SupportAndDisplacementLength) {
    const Grid g = base_grid();
    const MapField Q = to_chart(HolomorphicMapSpec::linear(0.5), g);
    const BumpSpec bump{{0.5, -0.5}, 1.0, 0.2, 0.3};
    const MapField u = perturb(Q, bump);
    int inside = 0;
    for (int j = 0; j < g.n2; ++j)
        for (int i = 0; i < g.n1; ++i) {
            const std::size_t k = g.index(i, j);
            const double r = geodesic_distance(g.point(i, j), bump.center);
            const Tangent d{u.u1[k] - Q.u1[k], u.u2[k] - Q.u2[k]};
            if (r >= bump.radius) {
                EXPECT_EQ(d.v1, 0.0);
                EXPECT_EQ(d.v2, 0.0);
                continue;
            }
            ++inside;
            const double q = r / bump.radius;
            const double profile = bump.amplitude * std::exp(1.0 - 1.0 / (1.0 - q * q));
            EXPECT_NEAR(metric_norm(Q.at(k), d), profile, 1e-12);
            if (profile > 1e-4) EXPECT_NEAR(std::atan2(d.v2, std::exp(-Q.u2[k]) * d.v1), bump.angle, 1e-9);
        }
    EXPECT_GT(inside, 20);
    EXPECT_GT(dirichlet_energy(u), dirichlet_energy(Q));
}

TEST(Perturb, RejectsSupportTouchingTheBoundary) {
    const Grid g = base_grid();
    const MapField Q = to_chart(HolomorphicMapSpec::linear(0.5), g);
    EXPECT_THROW(perturb(Q, BumpSpec{{3.5, 0.0}, 1.0, 0.1}), DomainError);
    EXPECT_THROW(perturb(Q, BumpSpec{{0.0, 2.5}, 1.0, 0.1}), DomainError);
    EXPECT_THROW(perturb(Q, BumpSpec{{0.0, 0.0}, -1.0, 0.1}), DomainError);
}
