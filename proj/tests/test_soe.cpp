#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <vector>

#include <fracwave/caputo_ops.hpp>
#include <fracwave/quadrature.hpp>
#include <fracwave/soe.hpp>

#include "oracles.hpp"

using namespace fracwave;

namespace {

const SoeApproximation& soe_half() {
    static const SoeApproximation s = build_soe(0.5, 1e-12, 1e-4, 1.0);
    return s;
}

}  // namespace

TEST(Quadrature, LegendreIntegratesPolynomials) {
    const auto r = gauss_legendre(8);
    long double s = 0.0L;
    long double s14 = 0.0L;
    for (std::size_t i = 0; i < 8; ++i) {
        s += r.weights[i];
        s14 += r.weights[i] * std::pow(r.nodes[i], 14);
    }
    EXPECT_NEAR(static_cast<double>(s), 2.0, 1e-15);
    EXPECT_NEAR(static_cast<double>(s14), 2.0 / 15.0, 1e-15);
}

TEST(Quadrature, JacobiMatchesMoments) {
    // weight (1 + x)^b on [-1, 1]
    const long double b = -0.6L;
    const auto r = gauss_jacobi(10, 0.0L, b);
    for (int m = 0; m < 19; m += 3) {
        long double s = 0.0L;
        for (std::size_t i = 0; i < 10; ++i) {
            s += r.weights[i] * std::pow(1.0L + r.nodes[i], static_cast<long double>(m));
        }
        const long double ref = std::pow(2.0L, m + b + 1.0L) / (m + b + 1.0L);
        EXPECT_NEAR(static_cast<double>(s / ref), 1.0, 1e-14) << m;
    }
}

TEST(Soe, ToleranceAndPositivity) {
    const auto& s = soe_half();
    EXPECT_LE(s.grid_error, 1e-12L);
    for (std::size_t i = 0; i < s.size(); ++i) {
        EXPECT_GT(s.nodes[i], 0.0);
        EXPECT_GT(s.weights[i], 0.0);
    }
    EXPECT_NEAR(static_cast<double>(soe_eval(s, 1.0)), 1.0, 1e-12);
    EXPECT_NEAR(static_cast<double>(soe_eval(s, 0.25)), 2.0, 1e-12);
    EXPECT_THROW(soe_eval(s, 2.0), domain_error);
    EXPECT_THROW(soe_eval(s, 1e-5), domain_error);
}

TEST(Soe, EndpointsAndBudgetGrowth) {
    const auto hi = build_soe(0.9, 1e-12, 1e-6, 1.0);
    EXPECT_NEAR(static_cast<double>(soe_eval(hi, 1e-6)), std::pow(1e-6, -0.9), 1e-12);
    EXPECT_NEAR(static_cast<double>(soe_eval(hi, 1.0)), 1.0, 1e-12);
    const auto lo = build_soe(0.1, 1e-8, 1e-3, 1.0);
    EXPECT_LT(lo.size(), hi.size());
}

TEST(Soe, RejectsBadInput) {
    EXPECT_THROW(build_soe(1.0, 1e-12, 1e-4, 1.0), domain_error);
    EXPECT_THROW(build_soe(0.5, 0.0, 1e-4, 1.0), domain_error);
    EXPECT_THROW(build_soe(0.5, 1e-12, 2.0, 1.0), domain_error);
    EXPECT_THROW(build_soe(0.5, 1e-30, 0.5, 1.0), numerical_error);
}

TEST(SoeFast, FirstAccumulatorClosedForm) {
    const double sigma = 0.25;
    const double tau = 0.02;
    const double lam = 1.0 / tau;
    const auto [c1, c0] = detail::uniform_first(lam, sigma, tau);
    const double ref = (0.25 * std::exp(-0.75) + 0.5 * std::exp(-1.25)) / lam -
                       3.0 / (2.0 * lam * lam * tau) * (std::exp(-0.75) - std::exp(-1.25));
    EXPECT_NEAR(c1, ref, 1e-14 * std::abs(ref));
    (void)c0;
}

TEST(SoeFast, CoefficientsMatchQuadrature) {
    const double tau = 0.01;
    for (double alpha : {1.2, 1.5, 1.9}) {
        const double sigma = derive_sigma(alpha);
        for (double lam : {1e-3, 0.5, 40.0, 99.0, 101.0, 3e3, 5e4}) {
            const auto [A, B] = detail::uniform_AB(lam, sigma, tau);
            const double c = (sigma + 1.5) * tau;
            const double refA = oracle::weighted_exp([&](long double s) { return s / tau - 0.5L; }, lam, c, 0.0, tau);
            const double refB = oracle::weighted_exp([&](long double s) { return 1.5L - s / tau; }, lam, c, 0.0, tau);
            EXPECT_NEAR(A, refA, 1e-11 * std::abs(refA) + 1e-300) << lam;
            EXPECT_NEAR(B, refB, 1e-11 * std::abs(refB)) << lam;
            const double sum = -std::exp(-(sigma + 0.5) * lam * tau) * std::expm1(-lam * tau) / lam;
            EXPECT_NEAR(A + B, sum, 1e-12 * sum);

            const auto [n1, n0] = detail::uniform_first(lam, sigma, tau);
            const double c1 = (sigma + 1.0) * tau;
            const double ref1 = oracle::weighted_exp([&](long double s) { return 1.5L * s / tau - 0.5L; }, lam, c1, 0.0, 0.5 * tau);
            const double ref0 = oracle::weighted_exp([&](long double s) { return 1.5L - 1.5L * s / tau; }, lam, c1, 0.0, 0.5 * tau);
            EXPECT_NEAR(n1, ref1, 1e-11 * std::abs(ref1)) << lam;
            EXPECT_NEAR(n0, ref0, 1e-11 * std::abs(ref0)) << lam;
        }
    }
}

TEST(SoeFast, FirstAccumulatorMatchesHermiteIntegral) {
    // Hermite cubic data p0, p0', p1, p2 on a uniform mesh.
    const double tau = 0.05;
    const double alpha = 1.4;
    const double sigma = derive_sigma(alpha);
    const std::vector<double> t{0.0, tau, 2.0 * tau};
    const std::vector<double> p{0.3, 0.41, 0.37};
    const double slope = 1.7;
    const double d2_0 = 2.0 / tau * ((p[1] - p[0]) / tau - slope);
    const double d2_1 = (p[2] - 2.0 * p[1] + p[0]) / (tau * tau);
    const auto& soe = soe_half();
    const auto st = init_fast_history_uniform(d2_0, d2_1, soe, sigma, tau);
    const double c = (1.0 + sigma) * tau;
    for (std::size_t m = 0; m < soe.size(); m += 37) {
        const double lam = soe.nodes[m];
        auto f = [&](double s) {
            return oracle::cubic_second({t[0], t[0], t[1], t[2]}, {p[0], p[0], p[1], p[2]}, slope, s) *
                   std::exp(-lam * (c - s));
        };
        const double ref = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, 0.5 * tau, 8, 1e-14);
        EXPECT_NEAR(st.F[m], ref, 1e-11 * std::abs(ref) + 1e-13 * std::abs(d2_0) * tau) << lam;
    }
}

TEST(SoeFast, ZeroDataGivesZeroState) {
    const auto st = init_fast_history_uniform(0.0, 0.0, soe_half(), 0.25, 0.01);
    for (double f : st.F) {
        EXPECT_EQ(f, 0.0);
    }
}

TEST(SoeFast, FastMatchesDirectOnCubic) {
    const double alpha = 1.5;
    const std::size_t N = 256;
    const double tau = 1.0 / N;
    const double sigma = derive_sigma(alpha);
    const auto soe = build_soe(alpha - 1.0, 1e-12, sigma * tau, 1.0);
    const UniformTemporalMesh mesh(1.0, N);
    std::vector<double> p(N + 1);
    for (std::size_t j = 0; j <= N; ++j) {
        p[j] = std::pow(mesh.node(j), 3);
    }
    const TimeHistory h{p, 0.0};
    const auto d2 = uniform_second_differences(h, tau, N - 1);
    auto st = init_fast_history_uniform(d2[0], d2[1], soe, sigma, tau);
    double worst = 0.0;
    for (std::size_t k = 1; k < N; ++k) {
        if (k >= 2) {
            st = advance_fast_history_uniform(st, d2[k], d2[k - 1], soe, sigma, tau);
        }
        const double fast = fast_caputo_uniform(st, soe, alpha, tau);
        const double direct = caputo_h3n3_uniform(h, alpha, mesh, k);
        worst = std::max(worst, std::abs(fast - direct));
    }
    EXPECT_LE(worst, 1e-9);
}

TEST(SoeFast, GradedUnitExponentMatchesUniform) {
    const double alpha = 1.6;
    const std::size_t N = 40;
    const GradedTemporalMesh mesh(1.0, N, 1.0);
    const double tau = 1.0 / N;
    const double sigma = derive_sigma(alpha);
    const auto& soe = soe_half();
    const auto uf = uniform_fast_coeffs(soe, alpha, tau);
    const auto gf = graded_fast_coeffs(7, soe, mesh, alpha);
    for (std::size_t m = 0; m < soe.size(); m += 11) {
        // divided differences carry the factor 2 relative to the uniform ones
        EXPECT_NEAR(gf.A[m], 2.0 * uf.A[m], 1e-12 * std::abs(uf.A[m]) + 1e-300);
        EXPECT_NEAR(gf.B[m], 2.0 * uf.B[m], 1e-12 * std::abs(uf.B[m]) + 1e-300);
        EXPECT_NEAR(gf.decay[m], uf.decay[m], 1e-14);
    }
    EXPECT_NEAR(gf.last, 2.0 * uf.last, 1e-13);
    EXPECT_NEAR(graded_soe_cutoff(mesh, alpha), (0.5 + sigma) * tau, 1e-15);
}

TEST(SoeFast, GradedCoefficientsMatchQuadrature) {
    const double alpha = 1.3;
    const GradedTemporalMesh mesh(1.0, 32, 3.0);
    const auto& t = mesh.nodes();
    const std::size_t k = 9;
    const double c = mesh.offset_node(k, alpha);
    const double lo = mesh.half_node_below(k - 1);
    const double hi = mesh.half_node_below(k);
    const auto& soe = soe_half();
    const auto gf = graded_fast_coeffs(k, soe, mesh, alpha);
    const double da = t[k + 1] - t[k - 2];
    const double db = t[k + 1] - t[k - 2];
    for (std::size_t m = 0; m < soe.size(); m += 13) {
        const double lam = soe.nodes[m];
        const double refA = oracle::linear_exp(6.0 / da, -2.0 * (t[k] + t[k - 1] + t[k - 2]) / da, lam, c, lo, hi);
        const double refB = oracle::linear_exp(-6.0 / db, 2.0 * (t[k + 1] + t[k] + t[k - 1]) / db, lam, c, lo, hi);
        EXPECT_NEAR(gf.A[m], refA, 1e-11 * std::abs(refA) + 1e-300) << lam;
        EXPECT_NEAR(gf.B[m], refB, 1e-11 * std::abs(refB) + 1e-300) << lam;
        // the two hats sum to 2 over the interval
        const double ref2 = oracle::linear_exp(0.0, 2.0, lam, c, lo, hi);
        EXPECT_NEAR(gf.A[m] + gf.B[m], ref2, 1e-11 * ref2 + 1e-300);
    }
}
