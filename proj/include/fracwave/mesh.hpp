#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "errors.hpp"

namespace fracwave {

/// sigma = 1 - alpha/2 for alpha in (1, 2).
inline double derive_sigma(double alpha) {
    detail::require(alpha > 1.0 && alpha < 2.0, "alpha must lie in the open interval (1, 2)");
    return 1.0 - alpha / 2.0;
}

/// Caputo order alpha in (1, 2) together with its superconvergence offset.
class FractionalOrder {
public:
    explicit FractionalOrder(double alpha) : alpha_(alpha), sigma_(derive_sigma(alpha)) {}

    double alpha() const { return alpha_; }
    double sigma() const { return sigma_; }
    /// 2 - alpha, the exponent of every weight.
    double beta() const { return 2.0 - alpha_; }

private:
    double alpha_;
    double sigma_;
};

class UniformTemporalMesh {
public:
    UniformTemporalMesh(double T, std::size_t N) : T_(T), N_(N) {
        detail::require(T > 0.0, "T must be positive");
        detail::require(N >= 1, "N must be at least 1");
        tau_ = T / static_cast<double>(N);
    }

    double T() const { return T_; }
    std::size_t N() const { return N_; }
    double tau() const { return tau_; }
    double node(std::size_t k) const { return static_cast<double>(k) * tau_; }
    /// t_{k+s} = (k + s) tau.
    double offset_node(std::size_t k, double s) const { return (static_cast<double>(k) + s) * tau_; }

private:
    double T_;
    std::size_t N_;
    double tau_;
};

/// Nodes t_k = (k/N)^r T.  Step sizes are 1-based: tau(k) = t_k - t_{k-1}.
class GradedTemporalMesh {
public:
    GradedTemporalMesh(double T, std::size_t N, double r) : T_(T), N_(N), r_(r), t_(N + 1) {
        detail::require(T > 0.0, "T must be positive");
        detail::require(N >= 1, "N must be at least 1");
        detail::require(r >= 1.0, "grading exponent r must be >= 1");
        const double tau = T / static_cast<double>(N);
        for (std::size_t k = 0; k <= N; ++k) {
            const double kd = static_cast<double>(k);
            t_[k] = (r == 1.0) ? kd * tau : std::pow(kd / static_cast<double>(N), r) * T;
        }
        t_[N] = T;
    }

    double T() const { return T_; }
    std::size_t N() const { return N_; }
    double r() const { return r_; }
    const std::vector<double>& nodes() const { return t_; }
    double node(std::size_t k) const { return t_[k]; }

    double tau(std::size_t k) const {
        detail::require(k >= 1 && k <= N_, "step index out of range");
        return t_[k] - t_[k - 1];
    }
    /// rho_k = tau_k / tau_{k+1}, 1 <= k <= N-1.
    double rho(std::size_t k) const { return tau(k) / tau(k + 1); }
    /// sigma_k = (1 - alpha/2) rho_k.
    double sigma(std::size_t k, double alpha) const { return derive_sigma(alpha) * rho(k); }
    /// t_{k-1/2} = (t_k + t_{k-1}) / 2.
    double half_node_below(std::size_t k) const { return 0.5 * (t_[k] + t_[k - 1]); }
    /// t_{k+sigma_k} = t_k + sigma_k tau_{k+1}.
    double offset_node(std::size_t k, double alpha) const { return t_[k] + sigma(k, alpha) * tau(k + 1); }
    /// tau_k + tau_{k+1}.
    double tau_bar(std::size_t k) const { return tau(k) + tau(k + 1); }

private:
    double T_;
    std::size_t N_;
    double r_;
    std::vector<double> t_;
};

enum class MeshKind { uniform, graded };

inline std::string to_string(MeshKind kind) { return kind == MeshKind::uniform ? "uniform" : "graded"; }

}  // namespace fracwave
