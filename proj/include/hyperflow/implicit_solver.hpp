#pragma once

#include <memory>
#include <vector>

#include "hyperflow/grid.hpp"

namespace hyperflow {

// Factorization of (I - c L) on interior nodes, where L is the discrete
// Laplace-Beltrami operator with homogeneous Dirichlet data on the boundary
// ring. Off-diagonal entries are nonnegative for h2 < 2, so the matrix is an
// M-matrix and solves preserve sign.
class ImplicitLaplacian {
public:
    ImplicitLaplacian(const Grid& grid, double c);
    ~ImplicitLaplacian();
    ImplicitLaplacian(const ImplicitLaplacian&) = delete;
    ImplicitLaplacian& operator=(const ImplicitLaplacian&) = delete;

    const Grid& grid() const { return grid_; }
    double coefficient() const { return c_; }

    // In-place solve on a full-grid array; boundary entries are set to zero.
    void solve(std::vector<double>& rhs) const;

private:
    struct Impl;
    Grid grid_;
    double c_;
    std::unique_ptr<Impl> impl_;
};

}  // namespace hyperflow
