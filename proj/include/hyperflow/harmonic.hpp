#pragma once

#include <complex>
#include <vector>

#include "hyperflow/grid.hpp"

namespace hyperflow {

// f(z) = sum_k a_k z^k with sum |a_k| < 1, so that f maps the closed disk
// into a smaller disk.
struct HolomorphicMapSpec {
    std::vector<std::complex<double>> coefficients;

    static HolomorphicMapSpec linear(double lambda);
    double coefficient_sum() const;
    void validate() const;
};

struct AdmissibilityReport {
    double d_l2 = 0.0;         // |dQ| in L2
    double grad_d_l2 = 0.0;    // |nabla dQ| in L2
    double grad2_d_l2 = 0.0;   // |nabla^2 dQ| in L2
    double range_radius = 0.0; // max distance of Q(x) from the target origin
    double weighted_sup = 0.0; // max e^{r(x)} |dQ|(x), r = distance from the domain origin
};

struct BumpSpec {
    ChartPoint center;
    double radius = 1.0;     // geodesic radius in the domain
    double amplitude = 0.0;  // displacement along the unit vector cos(angle) Theta_1 + sin(angle) Theta_2
    double angle = 0.7853981633974483;
};

DiskPoint eval_holomorphic(const HolomorphicMapSpec& spec, const DiskPoint& z);
MapField to_chart(const HolomorphicMapSpec& spec, const Grid& grid);
AdmissibilityReport admissibility_report(const MapField& Q);

// Q plus amplitude * exp(1 - 1 / (1 - (r/radius)^2)) along a fixed unit
// direction at Q(x), for r < radius. Throws DomainError if the support ball
// reaches the boundary ring.
MapField perturb(const MapField& Q, const BumpSpec& bump);

}  // namespace hyperflow
