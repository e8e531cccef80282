#pragma once

#include <cstddef>
#include <vector>

#include "hyperflow/geometry.hpp"

namespace hyperflow {

// Uniform node grid on [x1_min, x1_max] x [x2_min, x2_max]. Node (i, j) sits
// at (x1_min + i h1, x2_min + j h2) and is stored at j * n1 + i.
struct Grid {
    double x1_min = -4.0;
    double x1_max = 4.0;
    double x2_min = -3.0;
    double x2_max = 3.0;
    int n1 = 96;
    int n2 = 96;
    double h1 = 0.0;
    double h2 = 0.0;

    static Grid make(double x1_min, double x1_max, double x2_min, double x2_max, int n1, int n2);

    std::size_t size() const { return static_cast<std::size_t>(n1) * static_cast<std::size_t>(n2); }
    std::size_t index(int i, int j) const {
        return static_cast<std::size_t>(j) * static_cast<std::size_t>(n1) + static_cast<std::size_t>(i);
    }
    double x1(int i) const { return x1_min + i * h1; }
    double x2(int j) const { return x2_min + j * h2; }
    ChartPoint point(int i, int j) const { return {x1(i), x2(j)}; }
    bool on_boundary(int i, int j) const { return i == 0 || j == 0 || i == n1 - 1 || j == n2 - 1; }

    // Same rectangle with the spacing halved: n -> 2n - 1.
    Grid refined() const;

    bool operator==(const Grid& other) const;
    bool operator!=(const Grid& other) const { return !(*this == other); }
};

struct ScalarField {
    Grid grid;
    std::vector<double> values;

    ScalarField() = default;
    explicit ScalarField(const Grid& g) : grid(g), values(g.size(), 0.0) {}
};

// Target Iwasawa coordinates (u1, u2) per node.
struct MapField {
    Grid grid;
    std::vector<double> u1;
    std::vector<double> u2;

    MapField() = default;
    explicit MapField(const Grid& g) : grid(g), u1(g.size(), 0.0), u2(g.size(), 0.0) {}
    ChartPoint at(std::size_t k) const { return {u1[k], u2[k]}; }
};

// Components in the coordinate basis d/dy at u(x).
struct TangentField {
    Grid grid;
    std::vector<double> X1;
    std::vector<double> X2;

    TangentField() = default;
    explicit TangentField(const Grid& g) : grid(g), X1(g.size(), 0.0), X2(g.size(), 0.0) {}
};

}  // namespace hyperflow
