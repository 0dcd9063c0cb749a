#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"
#include "mesh.hpp"

namespace fracwave {

/// Convolution weights c[0..k] of one time level; c[l] multiplies the
/// second difference at level k - l.
struct CoefficientTable {
    std::size_t level = 0;
    double alpha = 0.0;
    std::vector<double> weights;
    MeshKind tag = MeshKind::uniform;

    double operator[](std::size_t l) const { return weights[l]; }
    std::size_t size() const { return weights.size(); }
};

namespace detail {

/// Closed-form pieces of the uniform weights, evaluated in extended precision.
/// All arguments are distances to the evaluation point in units of tau.
class UniformWeightTerms {
public:
    UniformWeightTerms(double alpha, double tau)
        : A_(2.0L - alpha), B_(3.0L - alpha), scale_(std::pow(static_cast<long double>(tau), A_)) {}

    long double pa(long double x) const { return std::pow(x, A_); }
    long double pb(long double x) const { return std::pow(x, B_); }

    /// Hermite interval [t_0, t_{1/2}], weight on the level-1 difference.
    long double a_first(long double K) const {
        const long double Kh = K - 0.5L;
        return 1.5L * scale_ * ((pb(K) - pb(Kh)) / (A_ * B_) - pa(K) / (3.0L * A_) - pa(Kh) / (6.0L * A_));
    }
    /// Hermite interval [t_0, t_{1/2}], weight on the level-0 difference.
    long double c_first(long double K) const {
        const long double Kh = K - 0.5L;
        return 1.5L * scale_ * (-(pb(K) - pb(Kh)) / (A_ * B_) + pa(K) / A_ - pa(Kh) / (2.0L * A_));
    }
    long double a_generic(long double x) const {
        return scale_ * ((pb(x + 1.5L) - pb(x + 0.5L)) / (A_ * B_) - pa(x + 1.5L) / (2.0L * A_) -
                         pa(x + 0.5L) / (2.0L * A_));
    }
    long double b_generic(long double x) const {
        return scale_ * (-(pb(x + 0.5L) - pb(x - 0.5L)) / (A_ * B_) + 1.5L * pa(x + 0.5L) / A_ -
                         pa(x - 0.5L) / (2.0L * A_));
    }
    /// Last stub [t_{k-1/2}, t_{k+s}].
    long double b_last(long double s) const { return scale_ * pa(s + 0.5L) / A_; }

private:
    long double A_;
    long double B_;
    long double scale_;
};

/// Uniform table with an arbitrary evaluation offset s (s = sigma for the
/// real scheme; other values are used to study the choice of offset).
inline std::vector<double> uniform_weights_with_offset(std::size_t k, double alpha, double tau, double s) {
    require(k >= 1, "level k must be >= 1");
    require(tau > 0.0, "tau must be positive");
    const UniformWeightTerms w(alpha, tau);
    const long double K = static_cast<long double>(k) + s;
    std::vector<double> c(k + 1);
    for (std::size_t l = 0; l <= k; ++l) {
        const std::size_t j = k - l;
        const long double x = static_cast<long double>(l) + s;
        long double v;
        if (j == 0) {
            v = w.c_first(K);
        } else if (j == 1) {
            v = w.a_first(K) + (k >= 2 ? w.b_generic(x) : w.b_last(s));
        } else if (j < k) {
            v = w.a_generic(x) + w.b_generic(x);
        } else {
            v = w.a_generic(x) + w.b_last(s);
        }
        c[l] = static_cast<double>(v);
    }
    return c;
}

/// binom(g, n) for real g.
inline double binomial(double g, int n) {
    double c = 1.0;
    for (int i = 0; i < n; ++i) {
        c *= (g - i) / (i + 1);
    }
    return c;
}

/// Integral of (p s + q)(c - s)^g over [lo, hi] with hi <= c and g > -1.
/// Uses u = c - s; near-equal endpoint distances switch to a binomial series
/// about the midpoint so adjacent-interval weights keep full precision.
inline double integrate_linear_power(double p, double q, double c, double lo, double hi, double g) {
    const double u0 = c - hi;
    const double u1 = c - lo;
    const double m = 0.5 * (u0 + u1);
    const double h = 0.5 * (u1 - u0);
    // p s + q = (p c + q) - p u = g(m) - p (u - m)
    const double gm = p * (c - m) + q;
    double J0 = 0.0;
    double J1 = 0.0;
    if (h < 0.1 * m) {
        const double r2 = (h / m) * (h / m);
        const double mg = std::pow(m, g);
        double termpow = 1.0;  // (h/m)^n for even n
        for (int n = 0; n < 40; n += 2) {
            const double t0 = binomial(g, n) * termpow / (n + 1);
            const double t1 = binomial(g, n + 1) * termpow * (h / m) / (n + 3);
            J0 += t0;
            J1 += t1;
            if (std::abs(t0) <= 1e-18 * std::abs(J0) && std::abs(t1) <= 1e-18 * std::abs(J1)) {
                break;
            }
            termpow *= r2;
        }
        J0 *= 2.0 * mg * h;
        J1 *= 2.0 * mg * h * h;
    } else {
        const double e1 = g + 1.0;
        const double e2 = g + 2.0;
        J0 = (std::pow(u1, e1) - std::pow(u0, e1)) / e1;
        J1 = (std::pow(u1, e2) - std::pow(u0, e2)) / e2 - m * J0;
    }
    return gm * J0 - p * J1;
}

/// Hat weights of the interpolant second derivatives on a graded mesh. Each
/// returns (p, q) with weight(s) = p s + q.
struct LinearWeight {
    double p;
    double q;
};

/// Weight on the level-1 difference over [t_0, t_{1/2}].
inline LinearWeight hermite_upper(const std::vector<double>& t) { return {6.0 / t[2], -2.0 * t[1] / t[2]}; }

/// Weight on the level-0 difference over [t_0, t_{1/2}].
inline LinearWeight hermite_lower(const std::vector<double>& t) {
    const double t32 = 0.5 * (t[2] + t[1]);
    return {-3.0 / t[2], 2.0 * t32 / t[2]};
}

/// Weight on the level-l difference over [t_{l-3/2}, t_{l-1/2}], l >= 2.
inline LinearWeight newton_upper(const std::vector<double>& t, std::size_t l) {
    const double d = t[l + 1] - t[l - 2];
    return {6.0 / d, -2.0 * (t[l] + t[l - 1] + t[l - 2]) / d};
}

/// Weight on the level-l difference over [t_{l-1/2}, t_{l+1/2}].
inline LinearWeight newton_lower(const std::vector<double>& t, std::size_t l) {
    const double d = t[l + 2] - t[l - 1];
    return {-6.0 / d, 2.0 * (t[l + 2] + t[l + 1] + t[l]) / d};
}

}  // namespace detail

/// Uniform-mesh weights c_l^{(k)} from the closed forms.
inline CoefficientTable uniform_coeff_table(std::size_t k, double alpha, double tau) {
    const double sigma = derive_sigma(alpha);
    return {k, alpha, detail::uniform_weights_with_offset(k, alpha, tau, sigma), MeshKind::uniform};
}

/// Graded-mesh weights c~_l^{(k)} for the divided second differences.
inline CoefficientTable graded_coeff_table(std::size_t k, double alpha, const GradedTemporalMesh& mesh) {
    detail::require(k >= 1 && k + 1 <= mesh.N(), "graded level k must lie in [1, N-1]");
    const double g = 1.0 - alpha;
    const auto& t = mesh.nodes();
    const double c = mesh.offset_node(k, alpha);
    auto half = [&](std::size_t l) { return 0.5 * (t[l] + t[l - 1]); };  // t_{l-1/2}
    auto integral = [&](detail::LinearWeight w, double lo, double hi) {
        return detail::integrate_linear_power(w.p, w.q, c, lo, hi, g);
    };
    auto a_tilde = [&](std::size_t j) {
        return j == 1 ? integral(detail::hermite_upper(t), 0.0, half(1))
                      : integral(detail::newton_upper(t, j), half(j - 1), half(j));
    };
    auto b_tilde = [&](std::size_t j) {
        if (j == k) {
            return 2.0 * std::pow(c - half(k), 2.0 - alpha) / (2.0 - alpha);
        }
        return integral(detail::newton_lower(t, j), half(j), half(j + 1));
    };

    std::vector<double> w(k + 1);
    w[k] = integral(detail::hermite_lower(t), 0.0, half(1));
    for (std::size_t j = 1; j <= k; ++j) {
        w[k - j] = a_tilde(j) + b_tilde(j);
    }
    return {k, alpha, std::move(w), MeshKind::graded};
}

struct PropertyViolation {
    std::string property;
    std::size_t k;
    double alpha;
    double margin;
};

struct PropertyReport {
    std::size_t k_max = 0;
    double tau = 0.0;
    std::size_t tables_checked = 0;
    bool decreasing = true;
    bool lower_bound = true;
    bool positive_combination = true;
    bool running_sum = true;
    /// Largest ratio of the running sum to its bound, a growth monitor.
    double max_sum_ratio = 0.0;
    std::vector<PropertyViolation> violations;

    bool all_pass() const { return decreasing && lower_bound && positive_combination && running_sum; }
};

/// Exhaustive scan of the uniform weight inequalities for k <= k_max.
/// The running-sum bound uses T = k_max * tau.
inline PropertyReport check_coefficient_properties(std::size_t k_max, std::span<const double> alpha_grid,
                                                   double tau) {
    detail::require(k_max >= 1, "k_max must be >= 1");
    detail::require(tau > 0.0, "tau must be positive");
    PropertyReport report;
    report.k_max = k_max;
    report.tau = tau;
    constexpr std::size_t max_listed = 100;
    auto flag = [&](bool& verdict, const char* name, std::size_t k, double alpha, double margin) {
        verdict = false;
        if (report.violations.size() < max_listed) {
            report.violations.push_back({name, k, alpha, margin});
        }
    };

    for (double alpha : alpha_grid) {
        const double sigma = derive_sigma(alpha);
        const detail::UniformWeightTerms w(alpha, tau);
        const double T = static_cast<double>(k_max) * tau;
        const double sum_bound =
            (8.0 * sigma + 21.0) * std::pow(T, 2.0 - alpha) / (16.0 * (1.0 + 2.0 * sigma) * sigma);

        // Interior weights depend only on l + sigma and are shared by every level.
        std::vector<double> generic(k_max + 1, 0.0);
        for (std::size_t l = 1; l + 2 <= k_max; ++l) {
            const long double x = static_cast<long double>(l) + sigma;
            generic[l] = static_cast<double>(w.a_generic(x) + w.b_generic(x));
        }
        const double newest = static_cast<double>(w.a_generic(sigma) + w.b_last(sigma));

        std::vector<double> c;
        double running = 0.0;
        for (std::size_t k = 1; k <= k_max; ++k) {
            const long double K = static_cast<long double>(k) + sigma;
            c.assign(k + 1, 0.0);
            c[k] = static_cast<double>(w.c_first(K));
            c[k - 1] = static_cast<double>(
                w.a_first(K) + (k >= 2 ? w.b_generic(static_cast<long double>(k - 1) + sigma) : w.b_last(sigma)));
            for (std::size_t l = 1; l + 1 < k; ++l) {
                c[l] = generic[l];
            }
            if (k >= 2) {
                c[0] = newest;
            }
            ++report.tables_checked;

            for (std::size_t l = 0; l < k; ++l) {
                if (!(c[l] > c[l + 1])) {
                    flag(report.decreasing, "decreasing", k, alpha, c[l] - c[l + 1]);
                    break;
                }
            }
            const double lb = 0.375 * std::pow(k + sigma, 1.0 - alpha) * std::pow(tau, 2.0 - alpha);
            if (!(c[k] > lb)) {
                flag(report.lower_bound, "lower_bound", k, alpha, c[k] - lb);
            }
            const double comb = 4.0 * sigma * c[0] - (1.0 + 2.0 * sigma) * c[1];
            if (!(comb > 0.0)) {
                flag(report.positive_combination, "positive_combination", k, alpha, comb);
            }
            running += c[k - 1];
            if (!(running < sum_bound)) {
                flag(report.running_sum, "running_sum", k, alpha, sum_bound - running);
            }
            report.max_sum_ratio = std::max(report.max_sum_ratio, running / sum_bound);
        }
    }
    return report;
}

}  // namespace fracwave
