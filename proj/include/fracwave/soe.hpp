#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "gamma.hpp"
#include "kernel_coeffs.hpp"
#include "mesh.hpp"
#include "quadrature.hpp"

namespace fracwave {

/// t^(-gamma) ~ sum_l w_l exp(-s_l t) on [delta, T] with absolute error epsilon.
/// The rule is kept in extended precision; double copies feed the time stepper.
struct SoeApproximation {
    double gamma = 0.0;
    double epsilon = 0.0;
    double delta = 0.0;
    double T = 0.0;
    std::vector<long double> nodes_ld;
    std::vector<long double> weights_ld;
    std::vector<double> nodes;
    std::vector<double> weights;
    std::size_t nodes_per_panel = 0;
    /// Largest error seen on the construction grid.
    long double grid_error = 0.0L;

    std::size_t size() const { return nodes.size(); }
};

namespace detail {

inline long double pairwise_sum(std::span<const long double> v) {
    if (v.size() <= 8) {
        long double s = 0.0L;
        for (long double x : v) {
            s += x;
        }
        return s;
    }
    const std::size_t half = v.size() / 2;
    return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

inline long double soe_sum(const SoeApproximation& soe, long double t, std::vector<long double>& scratch) {
    scratch.resize(soe.nodes_ld.size());
    for (std::size_t l = 0; l < scratch.size(); ++l) {
        scratch[l] = soe.weights_ld[l] * std::exp(-soe.nodes_ld[l] * t);
    }
    return pairwise_sum(scratch);
}

/// Geometric grid of n points spanning [a, b].
inline std::vector<long double> geometric_grid(long double a, long double b, std::size_t n) {
    std::vector<long double> g(n);
    const long double ratio = std::log(b / a);
    for (std::size_t i = 0; i < n; ++i) {
        g[i] = a * std::exp(ratio * static_cast<long double>(i) / static_cast<long double>(n - 1));
    }
    g.front() = a;
    g.back() = b;
    return g;
}

inline long double max_kernel_error(const SoeApproximation& soe, std::span<const long double> grid) {
    std::vector<long double> scratch;
    long double worst = 0.0L;
    for (long double t : grid) {
        const long double exact = std::pow(t, -static_cast<long double>(soe.gamma));
        worst = std::max(worst, std::abs(soe_sum(soe, t, scratch) - exact));
    }
    return worst;
}

/// Nodes and weights for a fixed number of points per panel.
inline void assemble_soe(SoeApproximation& soe, std::size_t n, int j0, int j1) {
    const long double g = soe.gamma;
    const long double inv_gamma_fn = 1.0L / std::tgamma(g);
    soe.nodes_ld.clear();
    soe.weights_ld.clear();

    // [0, 2^j0] with the s^(gamma-1) singularity absorbed into a Jacobi weight.
    const long double S0 = std::ldexp(1.0L, j0);
    const GaussRule gj = gauss_jacobi(n, 0.0L, g - 1.0L);
    for (std::size_t i = 0; i < n; ++i) {
        soe.nodes_ld.push_back(0.5L * S0 * (1.0L + gj.nodes[i]));
        soe.weights_ld.push_back(std::pow(0.5L * S0, g) * gj.weights[i] * inv_gamma_fn);
    }
    // Dyadic panels [2^j, 2^(j+1)].
    const GaussRule gl = gauss_legendre(n);
    for (int j = j0; j < j1; ++j) {
        const long double a = std::ldexp(1.0L, j);
        const long double b = std::ldexp(1.0L, j + 1);
        for (std::size_t i = 0; i < n; ++i) {
            const long double s = 0.5L * (a + b) + 0.5L * (b - a) * gl.nodes[i];
            soe.nodes_ld.push_back(s);
            soe.weights_ld.push_back(0.5L * (b - a) * gl.weights[i] * std::pow(s, g - 1.0L) * inv_gamma_fn);
        }
    }
    soe.nodes.assign(soe.nodes_ld.begin(), soe.nodes_ld.end());
    soe.weights.assign(soe.weights_ld.begin(), soe.weights_ld.end());
    soe.nodes_per_panel = n;
}

}  // namespace detail

/// Builds the approximation from the Laplace-integral representation of
/// t^(-gamma) and verifies it on a 10^4-point geometric grid of [delta, T].
inline SoeApproximation build_soe(double gamma, double epsilon, double delta, double T) {
    detail::require(gamma > 0.0 && gamma < 1.0, "gamma must lie in (0, 1)");
    detail::require(epsilon > 0.0, "epsilon must be positive");
    detail::require(delta > 0.0 && delta < T, "need 0 < delta < T");

    SoeApproximation soe;
    soe.gamma = gamma;
    soe.epsilon = epsilon;
    soe.delta = delta;
    soe.T = T;

    const long double g = gamma;
    const long double d = delta;
    const int j0 = static_cast<int>(std::floor(std::log2(1.0 / T))) - 2;
    // Truncate the integral where the tail bound S^(g-1) e^(-delta S) / (delta Gamma(g)) drops below eps/10.
    int j1 = j0 + 1;
    for (;; ++j1) {
        const long double S = std::ldexp(1.0L, j1);
        const long double tail = std::pow(S, g - 1.0L) * std::exp(-d * S) / (d * std::tgamma(g));
        if (tail < 0.1L * epsilon) {
            break;
        }
        if (j1 > j0 + 200) {
            throw numerical_error("SOE truncation point not found");
        }
    }

    const auto grid = detail::geometric_grid(d, T, 10000);
    constexpr std::size_t budget = 60;
    std::size_t n = static_cast<std::size_t>(std::ceil(0.7 * std::log10(1.0 / epsilon))) + 4;
    n = std::max<std::size_t>(n, 4);
    for (; n <= budget; n += 2) {
        detail::assemble_soe(soe, n, j0, j1);
        soe.grid_error = detail::max_kernel_error(soe, grid);
        if (soe.grid_error <= epsilon) {
            return soe;
        }
    }
    throw numerical_error("SOE construction failed: grid error " + std::to_string(static_cast<double>(soe.grid_error)) +
                          " exceeds tolerance after node budget");
}

/// Evaluates the sum at t in [delta, T].
inline long double soe_eval(const SoeApproximation& soe, double t) {
    detail::require(t >= soe.delta && t <= soe.T, "t outside the SOE validity window");
    std::vector<long double> scratch;
    return detail::soe_sum(soe, t, scratch);
}

/// Max error on an arbitrary grid of evaluation times.
inline long double soe_max_error(const SoeApproximation& soe, std::span<const long double> grid) {
    return detail::max_kernel_error(soe, grid);
}

namespace detail {

/// phi1(z) = int_0^1 e^(-z v) dv.
inline double phi1(double z) {
    if (z < 1.0) {
        double term = 1.0;
        double sum = 0.0;
        for (int n = 0; n < 40; ++n) {
            sum += term / (n + 1);
            term *= -z / (n + 1);
            if (std::abs(term) < 1e-18 * std::abs(sum)) {
                break;
            }
        }
        return sum;
    }
    return -std::expm1(-z) / z;
}

/// phi3(z) = int_0^1 (v - 1/2) e^(-z v) dv.
inline double phi3(double z) {
    if (z < 1.0) {
        double term = -z;  // (-z)^n / n!
        double sum = 0.0;
        for (int n = 1; n < 40; ++n) {
            const double c = n / (2.0 * (n + 1) * (n + 2));
            sum += term * c;
            term *= -z / (n + 1);
            if (std::abs(term) < 1e-18 * std::abs(sum)) {
                break;
            }
        }
        return sum;
    }
    const double e = std::exp(-z);
    const double phi2 = (1.0 - e * (1.0 + z)) / (z * z);
    return phi2 - 0.5 * phi1(z);
}

/// int_lo^hi (m + p (s - mid)) e^(-lambda (c - s)) ds with hi <= c, expanded
/// about the interval midpoint so hats with vanishing mean keep relative accuracy.
inline double integrate_centered_exp(double mid_value, double p, double lambda, double c, double lo, double hi) {
    const double width = hi - lo;
    const double z = lambda * width;
    return std::exp(-lambda * (c - hi)) * (mid_value * width * phi1(z) - p * width * width * phi3(z));
}

/// Same integral for the weight p s + q.
inline double integrate_linear_exp(double p, double q, double lambda, double c, double lo, double hi) {
    return integrate_centered_exp(p * (0.5 * (lo + hi)) + q, p, lambda, c, lo, hi);
}

}  // namespace detail

/// Per-node recursion coefficients of the uniform fast history.
struct UniformFastCoeffs {
    std::vector<double> decay;      ///< e^(-s tau)
    std::vector<double> A;          ///< on delta^2 p^k
    std::vector<double> B;          ///< on delta^2 p^(k-1)
    std::vector<double> first_new;  ///< level-1 accumulator, on delta^2 p^1
    std::vector<double> first_old;  ///< level-1 accumulator, on delta^2 p^0
    double last = 0.0;              ///< exact stub weight on delta^2 p^k
};

namespace detail {

/// (A, B) for one node.  Large s tau uses the explicit exponential form;
/// otherwise the same integrals go through the cancellation-free phi series.
inline std::pair<double, double> uniform_AB(double lambda, double sigma, double tau) {
    const double z = lambda * tau;
    if (z >= 1.0) {
        const double Ea = std::exp(-(sigma + 0.5) * z);
        const double Eb = std::exp(-(sigma + 1.5) * z);
        const double diff = (Ea - Eb) / (lambda * lambda * tau);
        return {(Ea + Eb) / (2.0 * lambda) - diff, (Ea - 3.0 * Eb) / (2.0 * lambda) + diff};
    }
    // Hats in local time: A = s/tau - 1/2, B = 3/2 - s/tau, exact midpoint values 0 and 1.
    const double c = (sigma + 1.5) * tau;
    return {integrate_centered_exp(0.0, 1.0 / tau, lambda, c, 0.0, tau),
            integrate_centered_exp(1.0, -1.0 / tau, lambda, c, 0.0, tau)};
}

/// Level-1 accumulator coefficients (on delta^2 p^1, on delta^2 p^0).
inline std::pair<double, double> uniform_first(double lambda, double sigma, double tau) {
    const double z = lambda * tau;
    if (z >= 1.0) {
        const double E1 = std::exp(-(sigma + 0.5) * z);
        const double E2 = std::exp(-(sigma + 1.0) * z);
        const double diff = 3.0 * (E1 - E2) / (2.0 * lambda * lambda * tau);
        return {(0.25 * E1 + 0.5 * E2) / lambda - diff, 3.0 * (0.25 * E1 - 0.5 * E2) / lambda + diff};
    }
    const double c = (sigma + 1.0) * tau;
    return {integrate_centered_exp(-0.125, 1.5 / tau, lambda, c, 0.0, 0.5 * tau),
            integrate_centered_exp(1.125, -1.5 / tau, lambda, c, 0.0, 0.5 * tau)};
}

}  // namespace detail

inline UniformFastCoeffs uniform_fast_coeffs(const SoeApproximation& soe, double alpha, double tau) {
    const double sigma = derive_sigma(alpha);
    UniformFastCoeffs fc;
    const std::size_t n = soe.size();
    fc.decay.resize(n);
    fc.A.resize(n);
    fc.B.resize(n);
    fc.first_new.resize(n);
    fc.first_old.resize(n);
    for (std::size_t m = 0; m < n; ++m) {
        const double lam = soe.nodes[m];
        fc.decay[m] = std::exp(-lam * tau);
        std::tie(fc.A[m], fc.B[m]) = detail::uniform_AB(lam, sigma, tau);
        std::tie(fc.first_new[m], fc.first_old[m]) = detail::uniform_first(lam, sigma, tau);
    }
    fc.last = std::pow(tau, 2.0 - alpha) * std::pow(sigma + 0.5, 2.0 - alpha) / (2.0 - alpha);
    return fc;
}

/// Scalar fast-history state: one accumulator per exponential.
struct FastHistoryState {
    std::vector<double> F;
    double d2_current = 0.0;
    double d2_previous = 0.0;
    std::size_t level = 0;
};

inline FastHistoryState init_fast_history_uniform(double d2_0, double d2_1, const SoeApproximation& soe,
                                                  double sigma, double tau) {
    FastHistoryState st;
    st.F.resize(soe.size());
    for (std::size_t m = 0; m < soe.size(); ++m) {
        const auto [c1, c0] = detail::uniform_first(soe.nodes[m], sigma, tau);
        st.F[m] = c1 * d2_1 + c0 * d2_0;
    }
    st.d2_current = d2_1;
    st.d2_previous = d2_0;
    st.level = 1;
    return st;
}

/// F^k = e^(-s tau) F^(k-1) + A d2_k + B d2_(k-1).
inline FastHistoryState advance_fast_history_uniform(FastHistoryState st, double d2_k, double d2_km1,
                                                     const SoeApproximation& soe, double sigma, double tau) {
    for (std::size_t m = 0; m < soe.size(); ++m) {
        const double lam = soe.nodes[m];
        const auto [A, B] = detail::uniform_AB(lam, sigma, tau);
        st.F[m] = std::exp(-lam * tau) * st.F[m] + A * d2_k + B * d2_km1;
    }
    st.d2_previous = d2_km1;
    st.d2_current = d2_k;
    ++st.level;
    return st;
}

/// Fast operator value at t_{k+sigma} from a state at level k.
inline double fast_caputo_uniform(const FastHistoryState& st, const SoeApproximation& soe, double alpha,
                                  double tau) {
    const double sigma = derive_sigma(alpha);
    double acc = 0.0;
    for (std::size_t m = 0; m < soe.size(); ++m) {
        acc += soe.weights[m] * st.F[m];
    }
    const double last = std::pow(tau * (sigma + 0.5), 2.0 - alpha) / (2.0 - alpha);
    return (acc + last * st.d2_current) / lanczos_gamma(2.0 - alpha);
}

/// Per-node recursion coefficients of the graded fast history at level k >= 2.
struct GradedFastCoeffs {
    std::vector<double> decay;
    std::vector<double> A;
    std::vector<double> B;
    double last = 0.0;
};

inline GradedFastCoeffs graded_fast_coeffs(std::size_t k, const SoeApproximation& soe,
                                           const GradedTemporalMesh& mesh, double alpha) {
    detail::require(k >= 2 && k + 1 <= mesh.N(), "graded fast level must lie in [2, N-1]");
    const auto& t = mesh.nodes();
    const double c = mesh.offset_node(k, alpha);
    const double lo = mesh.half_node_below(k - 1);
    const double hi = mesh.half_node_below(k);
    const double shift = (1.0 - mesh.sigma(k - 1, alpha)) * mesh.tau(k) + mesh.sigma(k, alpha) * mesh.tau(k + 1);
    const auto wa = detail::newton_upper(t, k);
    const auto wb = detail::newton_lower(t, k - 1);
    GradedFastCoeffs fc;
    const std::size_t n = soe.size();
    fc.decay.resize(n);
    fc.A.resize(n);
    fc.B.resize(n);
    for (std::size_t m = 0; m < n; ++m) {
        const double lam = soe.nodes[m];
        fc.decay[m] = std::exp(-lam * shift);
        fc.A[m] = detail::integrate_linear_exp(wa.p, wa.q, lam, c, lo, hi);
        fc.B[m] = detail::integrate_linear_exp(wb.p, wb.q, lam, c, lo, hi);
    }
    fc.last = 2.0 * std::pow(c - hi, 2.0 - alpha) / (2.0 - alpha);
    return fc;
}

/// Graded level-1 coefficients (on the level-1 and level-0 differences) and stub weight.
inline GradedFastCoeffs graded_fast_first(const SoeApproximation& soe, const GradedTemporalMesh& mesh,
                                          double alpha) {
    detail::require(mesh.N() >= 2, "graded fast history needs N >= 2");
    const auto& t = mesh.nodes();
    const double c = mesh.offset_node(1, alpha);
    const double hi = mesh.half_node_below(1);
    const auto wa = detail::hermite_upper(t);
    const auto wc = detail::hermite_lower(t);
    GradedFastCoeffs fc;
    const std::size_t n = soe.size();
    fc.decay.assign(n, 1.0);
    fc.A.resize(n);
    fc.B.resize(n);
    for (std::size_t m = 0; m < n; ++m) {
        fc.A[m] = detail::integrate_linear_exp(wa.p, wa.q, soe.nodes[m], c, 0.0, hi);
        fc.B[m] = detail::integrate_linear_exp(wc.p, wc.q, soe.nodes[m], c, 0.0, hi);
    }
    fc.last = 2.0 * std::pow(c - hi, 2.0 - alpha) / (2.0 - alpha);
    return fc;
}

/// Cut-off time for a graded mesh: min_k tau_k/2 + sigma_k tau_{k+1}.
inline double graded_soe_cutoff(const GradedTemporalMesh& mesh, double alpha) {
    double d = INFINITY;
    for (std::size_t k = 1; k + 1 <= mesh.N(); ++k) {
        d = std::min(d, 0.5 * mesh.tau(k) + mesh.sigma(k, alpha) * mesh.tau(k + 1));
    }
    return d;
}

}  // namespace fracwave
