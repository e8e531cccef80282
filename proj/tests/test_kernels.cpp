#include <cmath>

#include <gtest/gtest.h>

#include "hyperflow/errors.hpp"
#include "hyperflow/fields.hpp"
#include "hyperflow/kernels.hpp"

using namespace hyperflow;

namespace {

Grid small_grid(int n = 32) { return Grid::make(-3.0, 3.0, -2.0, 2.0, n, n); }

// Nonnegative bump vanishing near the boundary.
ScalarField bump(const Grid& g, double cx = 0.0, double cy = 0.0) {
    return scalar_from_function(g, [=](const ChartPoint& p) {
        const double r2 = (p.x1 - cx) * (p.x1 - cx) + (p.x2 - cy) * (p.x2 - cy);
        return r2 < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - r2)) : 0.0;
    });
}

double max_abs_diff(const ScalarField& a, const ScalarField& b) {
    double m = 0.0;
    for (std::size_t k = 0; k < a.values.size(); ++k) m = std::max(m, std::abs(a.values[k] - b.values[k]));
    return m;
}

}  // namespace

TEST(KernelEnvelope, ClosedFormValues) {
    EXPECT_NEAR(kernel_envelope({1.0, 0.0}), std::exp(-0.25) / std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(kernel_envelope({4.0, 0.0}), std::exp(-1.0) / (4.0 * std::sqrt(5.0)), 1e-15);
    EXPECT_NEAR(kernel_envelope({2.0, 1.0}),
                std::exp(-0.5 - 1.0 / 8.0 - 0.5) * 2.0 / (2.0 * 2.0), 1e-15);
    EXPECT_THROW(kernel_envelope({0.0, 1.0}), DomainError);
    EXPECT_THROW(kernel_envelope({1.0, -1.0}), DomainError);
}

TEST(KernelEnvelope, IncreasesUpToThePeakAndDecreasesAfter) {
    for (double t : {0.1, 1.0, 4.0, 20.0}) {
        const double peak = kernel_envelope_peak(t);
        EXPECT_GT(peak, 0.0);
        double prev = kernel_envelope({t, 0.0});
        for (int k = 1; k <= 200; ++k) {
            const double rho = peak * k / 200.0;
            const double v = kernel_envelope({t, rho});
            EXPECT_GE(v, prev * (1.0 - 1e-14));
            prev = v;
        }
        for (int k = 1; k <= 200; ++k) {
            const double rho = peak + 0.1 * k;
            const double v = kernel_envelope({t, rho});
            EXPECT_LE(v, prev * (1.0 + 1e-14));
            prev = v;
        }
    }
    EXPECT_THROW(kernel_envelope_peak(0.0), DomainError);
}

TEST(KernelEnvelope, DecaysInTimeAtFixedRadius) {
    for (double rho : {0.0, 1.0, 5.0}) {
        EXPECT_LT(kernel_envelope({50.0, rho}), kernel_envelope({10.0, rho}));
    }
}

TEST(Semigroup, IdentityAtZeroAndLinearity) {
    const Grid g = small_grid();
    const ScalarField f = bump(g), h = bump(g, 0.5, -0.3);
    const ScalarField f0 = apply_heat_semigroup(f, 0.0);
    EXPECT_EQ(f0.values, f.values);
    ScalarField combo = f;
    for (std::size_t k = 0; k < g.size(); ++k) combo.values[k] = 2.0 * f.values[k] - 3.0 * h.values[k];
    const ScalarField a = apply_heat_semigroup(f, 0.5), b = apply_heat_semigroup(h, 0.5);
    const ScalarField c = apply_heat_semigroup(combo, 0.5);
    double err = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        err = std::max(err, std::abs(c.values[k] - (2.0 * a.values[k] - 3.0 * b.values[k])));
    }
    EXPECT_LT(err, 1e-12);
    EXPECT_THROW(apply_heat_semigroup(f, -1.0), DomainError);
    EXPECT_THROW(apply_heat_semigroup(f, 1.0, SemigroupOptions{0.0}), DomainError);
}

TEST(Semigroup, PositivityMaximumPrincipleAndL1Contraction) {
    const Grid g = small_grid();
    const ScalarField f = bump(g);
    double prev_sup = lp_norm(f, Norm::Linf), prev_l1 = lp_norm(f, Norm::L1);
    for (double s : {0.1, 0.5, 1.0, 3.0}) {
        const ScalarField v = apply_heat_semigroup(f, s);
        for (double x : v.values) EXPECT_GE(x, 0.0);
        const double sup = lp_norm(v, Norm::Linf), l1 = lp_norm(v, Norm::L1);
        EXPECT_LE(sup, prev_sup);
        EXPECT_LE(l1, prev_l1 * (1.0 + 1e-12));
        prev_sup = sup;
        prev_l1 = l1;
    }
}

TEST(Semigroup, CompositionWithAMatchingStep) {
    const Grid g = small_grid();
    const ScalarField f = bump(g);
    const ScalarField once = apply_heat_semigroup(f, 0.4);
    const ScalarField twice = apply_heat_semigroup(apply_heat_semigroup(f, 0.2), 0.2);
    EXPECT_LT(max_abs_diff(once, twice), 1e-12);
}

TEST(Semigroup, FirstOrderInTheStep) {
    const Grid g = small_grid();
    const ScalarField f = bump(g);
    const ScalarField a = apply_heat_semigroup(f, 0.5, {0.04});
    const ScalarField b = apply_heat_semigroup(f, 0.5, {0.02});
    const ScalarField c = apply_heat_semigroup(f, 0.5, {0.01});
    const double ratio = max_abs_diff(a, b) / max_abs_diff(b, c);
    EXPECT_GT(ratio, 1.7);
    EXPECT_LT(ratio, 2.3);
}

TEST(Smoothing, DiagnosticsAreConsistent) {
    const Grid g = small_grid();
    const ScalarField f = bump(g);
    const SmoothingReport r = smoothing_diagnostics(f, {2.0, 0.5, 1.0}, {0.01});
    ASSERT_EQ(r.rows.size(), 3u);
    EXPECT_NEAR(r.rows[0].s, 0.5, 1e-9);
    EXPECT_NEAR(r.rows[2].s, 2.0, 1e-9);
    const ScalarField direct = apply_heat_semigroup(f, 1.0, {0.01});
    EXPECT_NEAR(r.rows[1].sup_norm, lp_norm(direct, Norm::Linf), 1e-12);
    double max_ratio = 0.0;
    for (const SmoothingRow& row : r.rows) {
        EXPECT_NEAR(row.envelope, std::exp(-0.25 * row.s) * lp_norm(f, Norm::L1) / row.s, 1e-12);
        EXPECT_NEAR(row.ratio, row.sup_norm / row.envelope, 1e-12);
        max_ratio = std::max(max_ratio, row.ratio);
    }
    EXPECT_EQ(r.max_ratio, max_ratio);
    EXPECT_LE(r.sup_ratio_small_s, 1.0);
    for (std::size_t k = 1; k < r.integral_value.size(); ++k) {
        EXPECT_GE(r.integral_value[k], r.integral_value[k - 1]);
    }
    EXPECT_NEAR(r.integral_s.back(), 4.0, 1e-12);
    EXPECT_GE(r.tail_fraction, 0.0);
    EXPECT_LT(r.tail_fraction, 1.0);
    EXPECT_THROW(smoothing_diagnostics(f, {}), DomainError);
    EXPECT_THROW(smoothing_diagnostics(f, {0.0, 1.0}), DomainError);
}
