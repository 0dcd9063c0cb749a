#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "errors.hpp"
#include "gamma.hpp"
#include "kernel_coeffs.hpp"
#include "mesh.hpp"

namespace fracwave {

/// Samples p^0..p^n at mesh nodes plus the initial slope p'(t_0).
struct TimeHistory {
    std::span<const double> values;
    double slope = 0.0;
};

/// delta_t^2 p^0..p^k on a uniform mesh; level 0 uses the slope-corrected formula.
inline std::vector<double> uniform_second_differences(const TimeHistory& h, double tau, std::size_t k) {
    detail::require(h.values.size() >= k + 2, "history too short for requested level");
    const auto& p = h.values;
    std::vector<double> d(k + 1);
    d[0] = 2.0 / tau * ((p[1] - p[0]) / tau - h.slope);
    for (std::size_t j = 1; j <= k; ++j) {
        d[j] = (p[j + 1] - 2.0 * p[j] + p[j - 1]) / (tau * tau);
    }
    return d;
}

/// Divided second differences on a graded mesh, divisor tau_j + tau_{j+1}.
inline std::vector<double> graded_second_differences(const TimeHistory& h, const GradedTemporalMesh& mesh,
                                                     std::size_t k) {
    detail::require(h.values.size() >= k + 2 && k + 1 <= mesh.N(), "history too short for requested level");
    const auto& p = h.values;
    std::vector<double> d(k + 1);
    const double tau1 = mesh.tau(1);
    d[0] = 2.0 / tau1 * ((p[1] - p[0]) / tau1 - h.slope);
    for (std::size_t j = 1; j <= k; ++j) {
        const double up = (p[j + 1] - p[j]) / mesh.tau(j + 1);
        const double down = (p[j] - p[j - 1]) / mesh.tau(j);
        d[j] = (up - down) / mesh.tau_bar(j);
    }
    return d;
}

namespace detail {

inline double convolve(std::span<const double> c, std::span<const double> d2, double alpha) {
    const std::size_t k = c.size() - 1;
    double acc = 0.0;
    for (std::size_t l = 0; l <= k; ++l) {
        acc += c[l] * d2[k - l];
    }
    return acc / lanczos_gamma(2.0 - alpha);
}

/// Uniform operator evaluated at t_{k+s}; s = sigma gives the real formula.
inline double caputo_uniform_offset(const TimeHistory& h, double alpha, double tau, std::size_t k, double s) {
    const auto c = uniform_weights_with_offset(k, alpha, tau, s);
    const auto d2 = uniform_second_differences(h, tau, k);
    return convolve(c, d2, alpha);
}

}  // namespace detail

/// Discrete Caputo derivative at t_{k+sigma}, 1 <= k <= N-1.
inline double caputo_h3n3_uniform(const TimeHistory& h, double alpha, const UniformTemporalMesh& mesh,
                                  std::size_t k) {
    detail::require(k >= 1 && k + 1 <= mesh.N(), "level k must lie in [1, N-1]");
    return detail::caputo_uniform_offset(h, alpha, mesh.tau(), k, derive_sigma(alpha));
}

/// First-level operator at t_{1-alpha/3}.
inline double caputo_first_step(double p0, double p1, double slope, double alpha, double tau) {
    derive_sigma(alpha);
    detail::require(tau > 0.0, "tau must be positive");
    const double t = (1.0 - alpha / 3.0) * tau;
    const double d2 = 2.0 / tau * ((p1 - p0) / tau - slope);
    return std::pow(t, 2.0 - alpha) / lanczos_gamma(3.0 - alpha) * d2;
}

/// Discrete Caputo derivative at t_{k+sigma_k} on a graded mesh.
inline double caputo_h3n3_graded(const TimeHistory& h, double alpha, const GradedTemporalMesh& mesh,
                                 std::size_t k) {
    const auto c = graded_coeff_table(k, alpha, mesh);
    const auto d2 = graded_second_differences(h, mesh, k);
    return detail::convolve(c.weights, d2, alpha);
}

/// Baseline weights c_{l,k}, l = 0..k+1.  At k = 1 the l = 1 weight is 0,
/// the value the averaged-second-difference construction produces there.
inline std::vector<double> l2c_weights(std::size_t k, double alpha) {
    detail::require(k >= 1, "level k must be >= 1");
    derive_sigma(alpha);
    const double A = 2.0 - alpha;
    auto pw = [A](double x) { return x <= 0.0 ? 0.0 : std::pow(x, A); };
    std::vector<double> c(k + 2);
    for (std::size_t l = 0; l <= k + 1; ++l) {
        const double m = static_cast<double>(k) - static_cast<double>(l);
        if (l <= 1 && l + 1 <= k) {
            c[l] = pw(m - 1.0) - pw(m);
        } else if (l >= 2 && l + 1 <= k) {
            c[l] = pw(m + 2.0) - pw(m + 1.0) - pw(m) + pw(m - 1.0);
        } else if (k == 1 && l == 1) {
            c[l] = 0.0;
        } else {
            c[l] = pw(m + 2.0) - pw(m + 1.0);
        }
    }
    return c;
}

/// Baseline operator at t_k; the ghost value u^{-1} = u^1 - 2 tau slope is formed here.
inline double caputo_l2c(const TimeHistory& h, double alpha, double tau, std::size_t k) {
    detail::require(h.values.size() >= k + 2, "history too short for requested level");
    const auto c = l2c_weights(k, alpha);
    const auto& p = h.values;
    const double ghost = p[1] - 2.0 * tau * h.slope;
    double acc = 0.0;
    for (std::size_t l = 0; l <= k + 1; ++l) {
        const double prev = l == 0 ? ghost : p[l - 1];
        acc += c[l] * (p[l] - prev);
    }
    return std::pow(tau, -alpha) / (2.0 * lanczos_gamma(3.0 - alpha)) * acc;
}

/// Caputo derivative of t^mu: Gamma(mu+1)/Gamma(mu+1-alpha) t^(mu-alpha).
inline double analytic_caputo_power(double mu, double alpha, double t) {
    detail::require(mu > 1.0, "mu must exceed 1");
    detail::require(t >= 0.0, "t must be non-negative");
    derive_sigma(alpha);
    if (t == 0.0) {
        return mu > alpha ? 0.0 : INFINITY;
    }
    return lanczos_gamma(mu + 1.0) / lanczos_gamma(mu + 1.0 - alpha) * std::pow(t, mu - alpha);
}

struct TruncationRow {
    std::size_t N;
    double max_error;
    /// log2 of the previous row's error over this one; NaN on the first row.
    double order;
};

namespace detail {

inline double truncation_max_error(double mu, double alpha, std::size_t N, double T, double s) {
    const double tau = T / static_cast<double>(N);
    std::vector<double> p(N + 1);
    for (std::size_t k = 0; k <= N; ++k) {
        p[k] = std::pow(static_cast<double>(k) * tau, mu);
    }
    const TimeHistory h{p, 0.0};  // mu > 1 gives a zero slope at t = 0
    double worst = 0.0;
    for (std::size_t k = 1; k < N; ++k) {
        const double discrete = caputo_uniform_offset(h, alpha, tau, k, s);
        const double exact = analytic_caputo_power(mu, alpha, (static_cast<double>(k) + s) * tau);
        worst = std::max(worst, std::abs(discrete - exact));
    }
    return worst;
}

inline std::vector<TruncationRow> truncation_scan_offset(double mu, double alpha, std::span<const std::size_t> Ns,
                                                         double T, double s) {
    std::vector<TruncationRow> rows;
    for (std::size_t N : Ns) {
        require(N >= 2, "N must be >= 2");
        const double e = truncation_max_error(mu, alpha, N, T, s);
        const double order = rows.empty() ? NAN : std::log2(rows.back().max_error / e);
        rows.push_back({N, e, order});
    }
    return rows;
}

}  // namespace detail

/// max_k |analytic - discrete| at t_{k+sigma} for p = t^mu, one row per N.
inline std::vector<TruncationRow> truncation_error_scan(double mu, double alpha, std::span<const std::size_t> Ns,
                                                        double T = 1.0) {
    return detail::truncation_scan_offset(mu, alpha, Ns, T, derive_sigma(alpha));
}

}  // namespace fracwave
