#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "errors.hpp"

namespace fracwave {

namespace detail {

constexpr double min_pivot = 1e-300;

inline void check_pivot(double pivot) {
    if (!(std::abs(pivot) >= min_pivot)) {
        throw numerical_error("tridiagonal pivot below 1e-300");
    }
}

}  // namespace detail

/// Thomas elimination.  lower[i] couples row i to i-1 (lower[0] unused),
/// upper[i] couples row i to i+1 (upper[n-1] unused).
inline std::vector<double> thomas_solve(std::span<const double> lower, std::span<const double> diag,
                                        std::span<const double> upper, std::span<const double> rhs) {
    const std::size_t n = diag.size();
    detail::require(n >= 1, "empty system");
    detail::require(lower.size() == n && upper.size() == n && rhs.size() == n, "system size mismatch");
    std::vector<double> c(n);
    std::vector<double> x(n);
    double pivot = diag[0];
    detail::check_pivot(pivot);
    c[0] = upper[0] / pivot;
    x[0] = rhs[0] / pivot;
    for (std::size_t i = 1; i < n; ++i) {
        pivot = diag[i] - lower[i] * c[i - 1];
        detail::check_pivot(pivot);
        c[i] = upper[i] / pivot;
        x[i] = (rhs[i] - lower[i] * x[i - 1]) / pivot;
    }
    for (std::size_t i = n - 1; i-- > 0;) {
        x[i] -= c[i] * x[i + 1];
    }
    return x;
}

/// In-place solve of the symmetric Toeplitz system (diag, off) x = rhs.
inline void thomas_solve_toeplitz(double diag, double off, std::span<double> rhs, std::vector<double>& work) {
    const std::size_t n = rhs.size();
    work.resize(n);
    double pivot = diag;
    detail::check_pivot(pivot);
    work[0] = off / pivot;
    rhs[0] /= pivot;
    for (std::size_t i = 1; i < n; ++i) {
        pivot = diag - off * work[i - 1];
        detail::check_pivot(pivot);
        work[i] = off / pivot;
        rhs[i] = (rhs[i] - off * rhs[i - 1]) / pivot;
    }
    for (std::size_t i = n - 1; i-- > 0;) {
        rhs[i] -= work[i] * rhs[i + 1];
    }
}

}  // namespace fracwave
