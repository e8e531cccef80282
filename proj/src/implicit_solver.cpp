#include "hyperflow/implicit_solver.hpp"

#include <cmath>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "hyperflow/errors.hpp"

namespace hyperflow {

struct ImplicitLaplacian::Impl {
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    int m1 = 0;
    int m2 = 0;
};

ImplicitLaplacian::ImplicitLaplacian(const Grid& grid, double c)
    : grid_(grid), c_(c), impl_(std::make_unique<Impl>()) {
    if (!(c >= 0.0) || !std::isfinite(c)) throw DomainError("ImplicitLaplacian: coefficient must be >= 0");
    const int m1 = grid.n1 - 2;
    const int m2 = grid.n2 - 2;
    impl_->m1 = m1;
    impl_->m2 = m2;
    const int n = m1 * m2;
    auto id = [m1](int i, int j) { return (j - 1) * m1 + (i - 1); };
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(n) * 5);
    const double inv22 = 1.0 / (grid.h2 * grid.h2);
    const double half2 = 0.5 / grid.h2;
    for (int j = 1; j <= m2; ++j) {
        const double a = std::exp(2.0 * grid.x2(j)) / (grid.h1 * grid.h1);
        for (int i = 1; i <= m1; ++i) {
            const int r = id(i, j);
            trip.emplace_back(r, r, 1.0 + c * (2.0 * a + 2.0 * inv22));
            if (i > 1) trip.emplace_back(r, id(i - 1, j), -c * a);
            if (i < m1) trip.emplace_back(r, id(i + 1, j), -c * a);
            if (j > 1) trip.emplace_back(r, id(i, j - 1), -c * (inv22 + half2));
            if (j < m2) trip.emplace_back(r, id(i, j + 1), -c * (inv22 - half2));
        }
    }
    Eigen::SparseMatrix<double> A(n, n);
    A.setFromTriplets(trip.begin(), trip.end());
    A.makeCompressed();
    impl_->lu.compute(A);
    if (impl_->lu.info() != Eigen::Success) throw NumericalError("ImplicitLaplacian: factorization failed");
}

ImplicitLaplacian::~ImplicitLaplacian() = default;

void ImplicitLaplacian::solve(std::vector<double>& rhs) const {
    const int m1 = impl_->m1;
    const int m2 = impl_->m2;
    Eigen::VectorXd b(m1 * m2);
    for (int j = 1; j <= m2; ++j) {
        for (int i = 1; i <= m1; ++i) b[(j - 1) * m1 + (i - 1)] = rhs[grid_.index(i, j)];
    }
    const Eigen::VectorXd x = impl_->lu.solve(b);
    std::fill(rhs.begin(), rhs.end(), 0.0);
    for (int j = 1; j <= m2; ++j) {
        for (int i = 1; i <= m1; ++i) rhs[grid_.index(i, j)] = x[(j - 1) * m1 + (i - 1)];
    }
}

}  // namespace hyperflow
