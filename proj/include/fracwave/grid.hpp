#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>

#include "errors.hpp"

namespace fracwave {

struct SpatialGrid {
    SpatialGrid(double L, std::size_t M) : L(L), M(M), h(L / static_cast<double>(M)) {
        detail::require(L > 0.0, "L must be positive");
        detail::require(M >= 2, "M must be at least 2");
    }

    double x(std::size_t i) const { return i == M ? L : static_cast<double>(i) * h; }

    double L;
    std::size_t M;
    double h;
};

struct FieldNorms {
    double l2 = 0.0;
    double h1_semi = 0.0;
    double inf = 0.0;
};

/// Discrete L2, H1-seminorm and max norm of a field u_0..u_M with zero ends.
inline FieldNorms norms(std::span<const double> u, double h) {
    detail::require(u.size() >= 2, "field needs at least two points");
    detail::require(u.front() == 0.0 && u.back() == 0.0, "norms require zero boundary values");
    const std::size_t M = u.size() - 1;
    double s2 = 0.0;
    double d2 = 0.0;
    double mx = 0.0;
    for (std::size_t i = 0; i < M; ++i) {
        const double d = (u[i + 1] - u[i]) / h;
        d2 += d * d;
        if (i >= 1) {
            s2 += u[i] * u[i];
            mx = std::max(mx, std::abs(u[i]));
        }
    }
    return {std::sqrt(h * s2), std::sqrt(h * d2), mx};
}

}  // namespace fracwave
