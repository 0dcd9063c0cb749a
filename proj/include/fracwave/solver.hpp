#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "caputo_ops.hpp"
#include "errors.hpp"
#include "gamma.hpp"
#include "grid.hpp"
#include "kernel_coeffs.hpp"
#include "mesh.hpp"
#include "problem.hpp"
#include "soe.hpp"
#include "tridiagonal.hpp"

namespace fracwave {

enum class Scheme { h3n3_direct, h3n3_fast, h3n3_graded, h3n3_graded_fast, l2c };

inline std::string to_string(Scheme s) {
    switch (s) {
        case Scheme::h3n3_direct: return "h3n3-direct";
        case Scheme::h3n3_fast: return "h3n3-fast";
        case Scheme::h3n3_graded: return "h3n3-graded";
        case Scheme::h3n3_graded_fast: return "h3n3-graded-fast";
        case Scheme::l2c: return "l2c";
    }
    return "unknown";
}

inline Scheme parse_scheme(const std::string& name) {
    for (Scheme s : {Scheme::h3n3_direct, Scheme::h3n3_fast, Scheme::h3n3_graded, Scheme::h3n3_graded_fast,
                     Scheme::l2c}) {
        if (to_string(s) == name) {
            return s;
        }
    }
    throw domain_error("unknown scheme '" + name + "'");
}

inline bool is_graded(Scheme s) { return s == Scheme::h3n3_graded || s == Scheme::h3n3_graded_fast; }
inline bool is_fast(Scheme s) { return s == Scheme::h3n3_fast || s == Scheme::h3n3_graded_fast; }

struct SolveOptions {
    Scheme scheme = Scheme::h3n3_fast;
    std::size_t N = 64;
    std::size_t M = 64;
    double r = 1.0;  ///< grading exponent, graded schemes only
    double soe_epsilon = 1e-12;
    bool store_field = true;
};

struct PhaseTimings {
    double setup = 0.0;
    double first_step = 0.0;
    double stepping = 0.0;
    double total = 0.0;
};

struct SolveResult {
    Scheme scheme = Scheme::h3n3_fast;
    std::size_t N = 0;
    std::size_t M = 0;
    double h = 0.0;
    std::vector<double> times;
    /// Collocation time of the equation that produced level k (k >= 1).
    std::vector<double> eval_times;
    /// (N+1) x (M+1) row-major, empty unless stored.
    std::vector<double> field;
    /// Post-processed levels, uniform H3N3 schemes only.
    std::vector<double> uhat;
    std::vector<FieldNorms> level_norms;
    /// Max-norm error per level when the problem has an exact solution.
    std::vector<double> errors;
    std::vector<double> uhat_errors;
    PhaseTimings timings;
    std::size_t n_exp = 0;

    std::span<const double> level(std::size_t k) const {
        return std::span<const double>(field).subspan(k * (M + 1), M + 1);
    }
    std::span<const double> uhat_level(std::size_t k) const {
        return std::span<const double>(uhat).subspan(k * (M + 1), M + 1);
    }
    /// max_{k >= first} of the per-level errors.
    double max_error(std::size_t first = 0) const {
        double e = 0.0;
        for (std::size_t k = first; k < errors.size(); ++k) {
            e = std::max(e, errors[k]);
        }
        return e;
    }
    double max_l2_norm() const {
        double e = 0.0;
        for (const auto& n : level_norms) {
            e = std::max(e, n.l2);
        }
        return e;
    }
};

/// Affine two-level combination giving a nodal approximation at t_{k+1}.
inline std::vector<double> uhat_postprocess(std::span<const double> u_next, std::span<const double> u_cur,
                                            std::span<const double> u_prev, double sigma) {
    detail::require(u_next.size() == u_cur.size() && u_cur.size() == u_prev.size(), "level size mismatch");
    const double wp = 0.5 + sigma;
    const double wm = 0.5 - sigma;
    std::vector<double> out(u_next.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = (1.5 - sigma) * (wp * u_next[i] + wm * u_cur[i]) - wm * (wp * u_cur[i] + wm * u_prev[i]);
    }
    return out;
}

namespace detail {

using Clock = std::chrono::steady_clock;

inline double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

/// delta_x^2 of an interior vector with zero Dirichlet ends.
inline void laplacian(std::span<const double> u, double inv_h2, std::span<double> out) {
    const std::size_t n = u.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double left = i > 0 ? u[i - 1] : 0.0;
        const double right = i + 1 < n ? u[i + 1] : 0.0;
        out[i] = (left - 2.0 * u[i] + right) * inv_h2;
    }
}

inline std::vector<double> interior_points(const SpatialGrid& grid) {
    std::vector<double> x(grid.M - 1);
    for (std::size_t i = 1; i < grid.M; ++i) {
        x[i - 1] = grid.x(i);
    }
    return x;
}

/// First level from the H3-based equation collocated at t_{1-alpha/3}.
inline std::vector<double> first_step_interior(const ProblemSpec& p, const SpatialGrid& grid, double tau1,
                                               std::span<const double> u0) {
    const double theta = 1.0 - p.alpha / 3.0;
    const double g = std::pow(theta * tau1, 2.0 - p.alpha) / lanczos_gamma(3.0 - p.alpha);
    const double kappa = 2.0 * g / (tau1 * tau1);
    const double inv_h2 = 1.0 / (grid.h * grid.h);
    const auto x = interior_points(grid);
    const std::size_t n = x.size();
    std::vector<double> lap0(n);
    laplacian(u0, inv_h2, lap0);
    std::vector<double> rhs(n);
    for (std::size_t i = 0; i < n; ++i) {
        rhs[i] = kappa * (u0[i] + tau1 * p.psi(x[i])) + (1.0 - theta) * lap0[i] + p.f(x[i], theta * tau1);
    }
    std::vector<double> work;
    thomas_solve_toeplitz(kappa + 2.0 * theta * inv_h2, -theta * inv_h2, rhs, work);
    return rhs;
}

inline std::vector<double> initial_interior(const ProblemSpec& p, const SpatialGrid& grid) {
    const auto x = interior_points(grid);
    std::vector<double> u0(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        u0[i] = p.phi(x[i]);
    }
    return u0;
}

/// Per-level bookkeeping: norms, errors, optional storage and post-processing.
class Recorder {
public:
    Recorder(const ProblemSpec& p, const SpatialGrid& grid, SolveResult& out, bool store, bool with_uhat)
        : p_(p), grid_(grid), out_(out), store_(store), with_uhat_(with_uhat), sigma_(derive_sigma(p.alpha)),
          full_(grid.M + 1, 0.0) {
        const std::size_t levels = out.N + 1;
        out_.level_norms.reserve(levels);
        if (p.exact) {
            out_.errors.reserve(levels);
            if (with_uhat_) {
                out_.uhat_errors.reserve(levels);
            }
        }
        if (store_) {
            out_.field.assign(levels * (grid.M + 1), 0.0);
            if (with_uhat_) {
                out_.uhat.assign(levels * (grid.M + 1), 0.0);
            }
        }
    }

    void record(std::size_t k, double t, std::span<const double> u) {
        std::copy(u.begin(), u.end(), full_.begin() + 1);
        out_.level_norms.push_back(norms(full_, grid_.h));
        if (p_.exact) {
            out_.errors.push_back(max_error(full_, t));
        }
        if (store_) {
            std::copy(full_.begin(), full_.end(), out_.field.begin() + static_cast<std::ptrdiff_t>(k * (grid_.M + 1)));
        }
        if (!with_uhat_) {
            return;
        }
        if (k >= 2) {
            hat_ = uhat_postprocess(full_, cur_, prev_, sigma_);
        } else {
            hat_ = full_;
        }
        if (p_.exact) {
            out_.uhat_errors.push_back(max_error(hat_, t));
        }
        if (store_) {
            std::copy(hat_.begin(), hat_.end(), out_.uhat.begin() + static_cast<std::ptrdiff_t>(k * (grid_.M + 1)));
        }
        prev_ = cur_;
        cur_ = full_;
    }

private:
    double max_error(std::span<const double> u, double t) const {
        double e = 0.0;
        for (std::size_t i = 1; i < grid_.M; ++i) {
            e = std::max(e, std::abs(u[i] - (*p_.exact)(grid_.x(i), t)));
        }
        return e;
    }

    const ProblemSpec& p_;
    const SpatialGrid& grid_;
    SolveResult& out_;
    bool store_;
    bool with_uhat_;
    double sigma_;
    std::vector<double> full_;
    std::vector<double> cur_;
    std::vector<double> prev_;
    std::vector<double> hat_;
};

/// Recursion coefficients for one step of the fast history; step 1 uses
/// decay 1 so that F^1 = A d2^1 + B d2^0 starting from F = 0.
struct StepCoeffs {
    std::vector<double> decay;
    std::vector<double> A;
    std::vector<double> B;
    double last = 0.0;
};

/// Shared H3N3 time stepper (uniform or graded, direct or fast history).
inline void run_h3n3(const ProblemSpec& p, const SpatialGrid& grid, const SolveOptions& opt, SolveResult& out) {
    const auto t_start = Clock::now();
    const bool graded = is_graded(opt.scheme);
    const bool fast = is_fast(opt.scheme);
    const double alpha = p.alpha;
    const double sigma = derive_sigma(alpha);
    const std::size_t N = opt.N;
    const UniformTemporalMesh umesh(p.T, N);
    const GradedTemporalMesh gmesh(p.T, N, graded ? opt.r : 1.0);
    const double tau = umesh.tau();
    const double tau1 = graded ? gmesh.tau(1) : tau;
    auto node = [&](std::size_t k) { return graded ? gmesh.node(k) : umesh.node(k); };

    out.times.resize(N + 1);
    for (std::size_t k = 0; k <= N; ++k) {
        out.times[k] = node(k);
    }
    out.eval_times.assign(N + 1, 0.0);

    const auto x = interior_points(grid);
    const std::size_t n = x.size();
    const double inv_h2 = 1.0 / (grid.h * grid.h);
    const double inv_gamma = 1.0 / lanczos_gamma(2.0 - alpha);

    // Fast-history set-up.
    SoeApproximation soe;
    UniformFastCoeffs ufc;
    std::vector<double> F;
    std::vector<double> S;
    auto step_coeffs = [&](std::size_t k) {
        StepCoeffs sc;
        if (graded) {
            const auto g = k == 1 ? graded_fast_first(soe, gmesh, alpha) : graded_fast_coeffs(k, soe, gmesh, alpha);
            sc.decay = g.decay;
            sc.A = g.A;
            sc.B = g.B;
            sc.last = g.last;
        } else if (k == 1) {
            sc.decay.assign(soe.size(), 1.0);
            sc.A = ufc.first_new;
            sc.B = ufc.first_old;
            sc.last = ufc.last;
        } else {
            sc.decay = ufc.decay;
            sc.A = ufc.A;
            sc.B = ufc.B;
            sc.last = ufc.last;
        }
        return sc;
    };
    StepCoeffs cur;
    if (fast && N >= 2) {
        const double cutoff = graded ? graded_soe_cutoff(gmesh, alpha) : sigma * tau;
        soe = build_soe(alpha - 1.0, opt.soe_epsilon, cutoff, p.T);
        out.n_exp = soe.size();
        if (!graded) {
            ufc = uniform_fast_coeffs(soe, alpha, tau);
        }
        F.assign(soe.size() * n, 0.0);
        S.assign(n, 0.0);
        cur = step_coeffs(1);
    }
    out.timings.setup = seconds_since(t_start);

    Recorder rec(p, grid, out, opt.store_field, !graded);
    auto t_phase = Clock::now();
    std::vector<double> um;  // u^{k-1}
    std::vector<double> u = initial_interior(p, grid);
    rec.record(0, 0.0, u);
    std::vector<double> up = first_step_interior(p, grid, tau1, u);
    out.eval_times[1] = (1.0 - alpha / 3.0) * tau1;
    rec.record(1, node(1), up);
    out.timings.first_step = seconds_since(t_phase);
    t_phase = Clock::now();

    // Second differences: full history for the direct path, last two for the fast path.
    const std::size_t kept = fast ? 2 : N;
    std::vector<double> D(kept * n, 0.0);
    auto Drow = [&](std::size_t j) { return std::span<double>(D).subspan((fast ? j % 2 : j) * n, n); };
    {
        auto d0 = Drow(0);
        for (std::size_t i = 0; i < n; ++i) {
            d0[i] = 2.0 * (up[i] - u[i] - tau1 * p.psi(x[i])) / (tau1 * tau1);
        }
    }
    um.swap(u);
    u.swap(up);
    up.assign(n, 0.0);

    std::vector<double> H(n);
    std::vector<double> lap_u(n);
    std::vector<double> lap_um(n);
    std::vector<double> work;

    for (std::size_t k = 1; k + 1 <= N; ++k) {
        // delta^2 u^k = a u^{k+1} + b u^k + c u^{k-1}
        double a;
        double c;
        double wp;
        double wm;
        double t_eval;
        if (graded) {
            const double tb = gmesh.tau_bar(k);
            a = 1.0 / (gmesh.tau(k + 1) * tb);
            c = 1.0 / (gmesh.tau(k) * tb);
            const double rho = gmesh.rho(k);
            const double sk = gmesh.sigma(k, alpha);
            wp = (0.5 * rho + sk) / (0.5 * (rho + 1.0));
            wm = (0.5 - sk) / (0.5 * (rho + 1.0));
            t_eval = gmesh.offset_node(k, alpha);
        } else {
            a = c = 1.0 / (tau * tau);
            wp = 0.5 + sigma;
            wm = 0.5 - sigma;
            t_eval = umesh.offset_node(k, sigma);
        }
        const double b = -(a + c);

        double C0;
        if (fast) {
            double wa = 0.0;
            double wb = 0.0;
            for (std::size_t m = 0; m < soe.size(); ++m) {
                wa += soe.weights[m] * cur.A[m];
                wb += soe.weights[m] * cur.B[m];
            }
            C0 = wa + cur.last;
            const auto dprev = Drow(k - 1);
            for (std::size_t i = 0; i < n; ++i) {
                H[i] = S[i] + wb * dprev[i];
            }
        } else {
            const auto table = graded ? graded_coeff_table(k, alpha, gmesh) : uniform_coeff_table(k, alpha, tau);
            C0 = table[0];
            std::fill(H.begin(), H.end(), 0.0);
            for (std::size_t l = 1; l <= k; ++l) {
                const double cl = table[l];
                const auto d = Drow(k - l);
                for (std::size_t i = 0; i < n; ++i) {
                    H[i] += cl * d[i];
                }
            }
        }

        const double beta_p = 0.5 * wp;
        const double beta_0 = 0.5 * (wp + wm);
        const double beta_m = 0.5 * wm;
        laplacian(u, inv_h2, lap_u);
        laplacian(um, inv_h2, lap_um);
        const double g0 = C0 * inv_gamma;
        for (std::size_t i = 0; i < n; ++i) {
            up[i] = -g0 * (b * u[i] + c * um[i]) - inv_gamma * H[i] + beta_0 * lap_u[i] + beta_m * lap_um[i] +
                    p.f(x[i], t_eval);
        }
        thomas_solve_toeplitz(g0 * a + 2.0 * beta_p * inv_h2, -beta_p * inv_h2, up, work);
        out.eval_times[k + 1] = t_eval;

        const auto dk = Drow(k);
        for (std::size_t i = 0; i < n; ++i) {
            dk[i] = a * up[i] + b * u[i] + c * um[i];
        }

        if (fast && k + 2 <= N) {
            const StepCoeffs next = step_coeffs(k + 1);
            const auto dkm1 = Drow(k - 1);
            std::fill(S.begin(), S.end(), 0.0);
            for (std::size_t m = 0; m < soe.size(); ++m) {
                const double dm = cur.decay[m];
                const double Am = cur.A[m];
                const double Bm = cur.B[m];
                const double wd = soe.weights[m] * next.decay[m];
                double* Fm = F.data() + m * n;
                for (std::size_t i = 0; i < n; ++i) {
                    const double v = dm * Fm[i] + Am * dk[i] + Bm * dkm1[i];
                    Fm[i] = v;
                    S[i] += wd * v;
                }
            }
            cur = next;
        }

        rec.record(k + 1, node(k + 1), up);
        um.swap(u);
        u.swap(up);
    }
    out.timings.stepping = seconds_since(t_phase);
    out.timings.total = seconds_since(t_start);
}

inline void run_l2c(const ProblemSpec& p, const SpatialGrid& grid, const SolveOptions& opt, SolveResult& out) {
    const auto t_start = Clock::now();
    const double alpha = p.alpha;
    const std::size_t N = opt.N;
    const UniformTemporalMesh mesh(p.T, N);
    const double tau = mesh.tau();
    out.times.resize(N + 1);
    for (std::size_t k = 0; k <= N; ++k) {
        out.times[k] = mesh.node(k);
    }
    out.eval_times.assign(N + 1, 0.0);
    const auto x = interior_points(grid);
    const std::size_t n = x.size();
    const double inv_h2 = 1.0 / (grid.h * grid.h);
    const double mu = std::pow(tau, -alpha) / (2.0 * lanczos_gamma(3.0 - alpha));
    out.timings.setup = seconds_since(t_start);

    Recorder rec(p, grid, out, opt.store_field, false);
    auto t_phase = Clock::now();
    std::vector<double> um;
    std::vector<double> u = initial_interior(p, grid);
    rec.record(0, 0.0, u);
    std::vector<double> up = first_step_interior(p, grid, tau, u);
    out.eval_times[1] = (1.0 - alpha / 3.0) * tau;
    rec.record(1, mesh.node(1), up);
    out.timings.first_step = seconds_since(t_phase);
    t_phase = Clock::now();

    // Level increments u^l - u^{l-1}, with the ghost level u^{-1} = u^1 - 2 tau psi.
    std::vector<double> inc((N + 1) * n, 0.0);
    auto row = [&](std::size_t l) { return std::span<double>(inc).subspan(l * n, n); };
    for (std::size_t i = 0; i < n; ++i) {
        row(0)[i] = u[i] - (up[i] - 2.0 * tau * p.psi(x[i]));
        row(1)[i] = up[i] - u[i];
    }
    um.swap(u);
    u.swap(up);
    up.assign(n, 0.0);

    std::vector<double> lap_u(n);
    std::vector<double> lap_um(n);
    std::vector<double> work;
    for (std::size_t k = 1; k + 1 <= N; ++k) {
        const auto cw = l2c_weights(k, alpha);
        std::fill(up.begin(), up.end(), 0.0);
        for (std::size_t l = 0; l <= k; ++l) {
            const double cl = cw[l];
            const auto d = row(l);
            for (std::size_t i = 0; i < n; ++i) {
                up[i] += cl * d[i];
            }
        }
        laplacian(u, inv_h2, lap_u);
        laplacian(um, inv_h2, lap_um);
        const double tk = mesh.node(k);
        for (std::size_t i = 0; i < n; ++i) {
            up[i] = mu * u[i] - mu * up[i] + 0.5 * lap_u[i] + 0.25 * lap_um[i] + p.f(x[i], tk);
        }
        thomas_solve_toeplitz(mu + 0.5 * inv_h2, -0.25 * inv_h2, up, work);
        out.eval_times[k + 1] = tk;
        const auto d = row(k + 1);
        for (std::size_t i = 0; i < n; ++i) {
            d[i] = up[i] - u[i];
        }
        rec.record(k + 1, mesh.node(k + 1), up);
        um.swap(u);
        u.swap(up);
    }
    out.timings.stepping = seconds_since(t_phase);
    out.timings.total = seconds_since(t_start);
}

}  // namespace detail

/// u^1 on the full grid (boundary entries zero).
inline std::vector<double> first_step_solve(const ProblemSpec& p, const SpatialGrid& grid, double tau1) {
    p.validate();
    detail::require(tau1 > 0.0, "tau must be positive");
    const auto u0 = detail::initial_interior(p, grid);
    const auto u1 = detail::first_step_interior(p, grid, tau1, u0);
    std::vector<double> full(grid.M + 1, 0.0);
    std::copy(u1.begin(), u1.end(), full.begin() + 1);
    return full;
}

inline std::vector<double> first_step_solve(const ProblemSpec& p, const SpatialGrid& grid,
                                            const UniformTemporalMesh& mesh) {
    return first_step_solve(p, grid, mesh.tau());
}

inline std::vector<double> first_step_solve(const ProblemSpec& p, const SpatialGrid& grid,
                                            const GradedTemporalMesh& mesh) {
    return first_step_solve(p, grid, mesh.tau(1));
}

/// Runs the selected scheme over the whole horizon.
inline SolveResult solve(const ProblemSpec& p, const SolveOptions& opt) {
    p.validate();
    detail::require(opt.N >= 1, "N must be at least 1");
    detail::require(opt.M >= 2, "M must be at least 2");
    detail::require(opt.soe_epsilon > 0.0, "SOE tolerance must be positive");
    if (is_graded(opt.scheme)) {
        detail::require(opt.r >= 1.0, "grading exponent r must be >= 1");
    }
    const SpatialGrid grid(p.L, opt.M);
    SolveResult out;
    out.scheme = opt.scheme;
    out.N = opt.N;
    out.M = opt.M;
    out.h = grid.h;
    if (opt.scheme == Scheme::l2c) {
        detail::run_l2c(p, grid, opt, out);
    } else {
        detail::run_h3n3(p, grid, opt, out);
    }
    return out;
}

}  // namespace fracwave
