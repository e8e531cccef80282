#pragma once

#include <vector>

#include "hyperflow/grid.hpp"

namespace hyperflow {

struct KernelQuery {
    double t = 1.0;
    double rho = 0.0;
};

// t^{-1} e^{-t/4} e^{-rho^2/(4t)} e^{-rho/2} (1 + rho + t)^{-1/2} (1 + rho).
// The bare product; the envelope holds only up to absolute constants.
double kernel_envelope(const KernelQuery& q);

// Radius where d/drho log K changes sign: the envelope increases on [0, rho*]
// and decreases after it.
double kernel_envelope_peak(double t);

struct SemigroupOptions {
    double ds = 0.01;  // implicit Euler step; the step is shrunk to divide s exactly
};

// Discrete e^{s Delta} f: implicit Euler steps of f_s = Delta f with the
// boundary ring values of f held fixed.
ScalarField apply_heat_semigroup(const ScalarField& f, double s, const SemigroupOptions& options = {});

struct SmoothingRow {
    double s = 0.0;
    double sup_norm = 0.0;  // |e^{s Delta} f|_inf
    double l1_norm = 0.0;   // |f|_1
    double envelope = 0.0;  // e^{-s/4} s^{-1} |f|_1
    double ratio = 0.0;     // sup_norm / envelope
};

struct SmoothingReport {
    std::vector<SmoothingRow> rows;
    double max_ratio = 0.0;
    double sup_ratio_small_s = 0.0;      // |e^{s0 Delta} f|_inf / |f|_inf at s0 = first step
    std::vector<double> integral_s;      // S values
    std::vector<double> integral_value;  // int_0^S |e^{t Delta} f|_inf^2 dt
    double tail_fraction = 0.0;          // (I(2 S_max) - I(S_max)) / I(2 S_max)
};

// Ratios over the given samples and the partial integral of |e^{t Delta} f|_inf^2
// up to twice the largest sample.
SmoothingReport smoothing_diagnostics(const ScalarField& f, const std::vector<double>& s_samples,
                                      const SemigroupOptions& options = {});

}  // namespace hyperflow
