#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "errors.hpp"

namespace fracwave {

struct GaussRule {
    std::vector<long double> nodes;
    std::vector<long double> weights;
};

namespace detail {

/// Number of eigenvalues of the symmetric tridiagonal matrix below x (Sturm count).
inline std::size_t sturm_count(const std::vector<long double>& diag, const std::vector<long double>& off,
                               long double x) {
    std::size_t count = 0;
    long double d = 1.0L;
    for (std::size_t i = 0; i < diag.size(); ++i) {
        const long double b2 = i == 0 ? 0.0L : off[i - 1] * off[i - 1];
        d = (diag[i] - x) - (i == 0 ? 0.0L : b2 / d);
        if (d == 0.0L) {
            d = -std::numeric_limits<long double>::epsilon() * (std::abs(x) + 1.0L);
        }
        if (d < 0.0L) {
            ++count;
        }
    }
    return count;
}

/// Golub-Welsch style rule from recurrence coefficients: nodes by bisection
/// on the Jacobi matrix, weights as Christoffel numbers mu0 / sum p_j(x)^2
/// with orthonormal p_j.
inline GaussRule rule_from_recurrence(const std::vector<long double>& diag, const std::vector<long double>& off,
                                      long double mu0) {
    const std::size_t n = diag.size();
    long double lo = diag[0];
    long double hi = diag[0];
    for (std::size_t i = 0; i < n; ++i) {
        const long double r = (i > 0 ? std::abs(off[i - 1]) : 0.0L) + (i + 1 < n ? std::abs(off[i]) : 0.0L);
        lo = std::min(lo, diag[i] - r);
        hi = std::max(hi, diag[i] + r);
    }
    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        long double a = lo;
        long double b = hi;
        for (int it = 0; it < 200; ++it) {
            const long double mid = 0.5L * (a + b);
            if (mid <= a || mid >= b) {
                break;
            }
            if (sturm_count(diag, off, mid) > i) {
                b = mid;
            } else {
                a = mid;
            }
        }
        const long double x = 0.5L * (a + b);
        rule.nodes[i] = x;

        long double prev = 0.0L;
        long double cur = 1.0L;
        long double sum = 1.0L;
        for (std::size_t j = 0; j + 1 < n; ++j) {
            const long double next = ((x - diag[j]) * cur - (j > 0 ? off[j - 1] * prev : 0.0L)) / off[j];
            prev = cur;
            cur = next;
            sum += cur * cur;
        }
        rule.weights[i] = mu0 / sum;
    }
    return rule;
}

}  // namespace detail

/// n-point Gauss-Jacobi rule on [-1, 1] for the weight (1-x)^a (1+x)^b, a, b > -1.
inline GaussRule gauss_jacobi(std::size_t n, long double a, long double b) {
    detail::require(n >= 1, "rule needs at least one node");
    detail::require(a > -1.0L && b > -1.0L, "Jacobi parameters must exceed -1");
    std::vector<long double> diag(n);
    std::vector<long double> off(n > 0 ? n - 1 : 0);
    const long double ab = a + b;
    diag[0] = (b - a) / (ab + 2.0L);
    for (std::size_t k = 1; k < n; ++k) {
        const long double kk = static_cast<long double>(k);
        const long double s = 2.0L * kk + ab;
        diag[k] = (b * b - a * a) / (s * (s + 2.0L));
        off[k - 1] = std::sqrt(4.0L * kk * (kk + a) * (kk + b) * (kk + ab) / (s * s * (s + 1.0L) * (s - 1.0L)));
    }
    const long double mu0 =
        std::pow(2.0L, ab + 1.0L) * std::tgamma(a + 1.0L) * std::tgamma(b + 1.0L) / std::tgamma(ab + 2.0L);
    return detail::rule_from_recurrence(diag, off, mu0);
}

/// n-point Gauss-Legendre rule on [-1, 1].
inline GaussRule gauss_legendre(std::size_t n) { return gauss_jacobi(n, 0.0L, 0.0L); }

}  // namespace fracwave
