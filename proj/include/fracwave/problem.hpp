#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "gamma.hpp"
#include "grid.hpp"
#include "mesh.hpp"

namespace fracwave {

using SpaceTimeFn = std::function<double(double, double)>;
using SpaceFn = std::function<double(double)>;

/// D_t^alpha u = u_xx + f on (0, L) x (0, T], u(0,t) = u(L,t) = 0,
/// u(x,0) = phi, u_t(x,0) = psi.
struct ProblemSpec {
    std::string name;
    double alpha = 1.5;
    double L = 1.0;
    double T = 1.0;
    SpaceTimeFn f;
    SpaceFn phi;
    SpaceFn psi;
    std::optional<SpaceTimeFn> exact;

    void validate() const {
        derive_sigma(alpha);
        detail::require(L > 0.0 && T > 0.0, "L and T must be positive");
        detail::require(static_cast<bool>(f) && static_cast<bool>(phi) && static_cast<bool>(psi),
                        "problem needs f, phi and psi");
        constexpr double tol = 1e-12;
        auto small = [&](double v) { return std::abs(v) <= tol; };
        detail::require(small(phi(0.0)) && small(phi(L)), "phi must vanish at both ends");
        detail::require(small(psi(0.0)) && small(psi(L)), "psi must vanish at both ends");
    }
};

/// Smooth test: u = t^5 sin(pi x) / 5.
inline ProblemSpec example_51(double alpha) {
    derive_sigma(alpha);
    using std::numbers::pi;
    const double g = lanczos_gamma(6.0 - alpha);
    ProblemSpec p;
    p.name = "ex51";
    p.alpha = alpha;
    p.f = [alpha, g](double x, double t) {
        return (24.0 * std::pow(t, 5.0 - alpha) / g + pi * pi * std::pow(t, 5) / 5.0) * std::sin(pi * x);
    };
    p.phi = [](double) { return 0.0; };
    p.psi = [](double) { return 0.0; };
    p.exact = [](double x, double t) { return std::pow(t, 5) * std::sin(pi * x) / 5.0; };
    return p;
}

/// Weakly regular test: u = (t^alpha + 1) sin(pi x).
inline ProblemSpec example_52(double alpha) {
    derive_sigma(alpha);
    using std::numbers::pi;
    const double g = lanczos_gamma(1.0 + alpha);
    ProblemSpec p;
    p.name = "ex52";
    p.alpha = alpha;
    p.f = [alpha, g](double x, double t) { return (g + pi * pi * (std::pow(t, alpha) + 1.0)) * std::sin(pi * x); };
    p.phi = [](double x) { return std::sin(pi * x); };
    p.psi = [](double) { return 0.0; };
    p.exact = [alpha](double x, double t) { return (std::pow(t, alpha) + 1.0) * std::sin(pi * x); };
    return p;
}

/// Identically zero data.
inline ProblemSpec zero_problem(double alpha) {
    ProblemSpec p;
    p.name = "zero";
    p.alpha = alpha;
    p.f = [](double, double) { return 0.0; };
    p.phi = [](double) { return 0.0; };
    p.psi = [](double) { return 0.0; };
    p.exact = [](double, double) { return 0.0; };
    return p;
}

struct CompatibilityReport {
    double initial_residual = 0.0;   ///< max |-phi'' - f(., 0)|
    double velocity_residual = 0.0;  ///< max |-psi'' - f_t(., 0)|
    double threshold = 0.0;
    std::vector<std::string> warnings;

    bool compatible() const { return warnings.empty(); }
};

/// Advisory check of the first two compatibility conditions at t = 0.
inline CompatibilityReport check_compatibility(const ProblemSpec& problem, const SpatialGrid& grid) {
    const double eta = 1e-3 * problem.L;
    const double dt = 1e-4 * problem.T;
    auto second = [eta](const SpaceFn& g, double x) {
        return (-g(x + 2 * eta) + 16 * g(x + eta) - 30 * g(x) + 16 * g(x - eta) - g(x - 2 * eta)) / (12 * eta * eta);
    };
    CompatibilityReport rep;
    double scale = 1.0;
    for (std::size_t i = 1; i < grid.M; ++i) {
        const double x = grid.x(i);
        const double f0 = problem.f(x, 0.0);
        const double ft = (-3.0 * f0 + 4.0 * problem.f(x, dt) - problem.f(x, 2.0 * dt)) / (2.0 * dt);
        const double phi2 = second(problem.phi, x);
        const double psi2 = second(problem.psi, x);
        rep.initial_residual = std::max(rep.initial_residual, std::abs(-phi2 - f0));
        rep.velocity_residual = std::max(rep.velocity_residual, std::abs(-psi2 - ft));
        scale = std::max({scale, std::abs(f0), std::abs(phi2)});
    }
    rep.threshold = 1e-6 * scale;
    if (rep.initial_residual > rep.threshold) {
        rep.warnings.push_back("-phi'' - f(x,0) = " + std::to_string(rep.initial_residual) +
                               ": solution is weakly regular at t = 0");
    }
    if (rep.velocity_residual > rep.threshold) {
        rep.warnings.push_back("-psi'' - f_t(x,0) = " + std::to_string(rep.velocity_residual) +
                               ": solution is weakly regular at t = 0");
    }
    return rep;
}

}  // namespace fracwave
