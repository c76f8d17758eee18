#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "fracstefan/series_integrals.hpp"
#include "oracle_values.hpp"

using namespace fracstefan;

TEST(KernelIntegrals, MatchReferenceRows) {
    for (const auto& r : oracle::kernel_rows) {
        if (r.alpha == 1.0 && r.x >= 20.0) continue;
        const KernelIntegrals ki{KernelOrder(r.alpha)};
        EXPECT_LE(std::abs(ki.f_alpha(r.x) - r.f), 1e-12 * std::abs(r.f)) << "alpha=" << r.alpha << " x=" << r.x;
        EXPECT_LE(std::abs(ki.moment_alpha(r.x) - r.moment), 1e-12 * std::abs(r.moment))
            << "alpha=" << r.alpha << " x=" << r.x;
    }
}

TEST(KernelIntegrals, ClassicalClosedForms) {
    const KernelIntegrals ki{KernelOrder(1.0)};
    for (double x : {0.1, 1.0, 3.0, 7.0, 20.0, 50.0}) {
        EXPECT_NEAR(ki.f_alpha(x), classical_erf_profile(x), 1e-14) << x;
        EXPECT_NEAR(ki.moment_alpha(x), 2.0 * (1.0 - std::exp(-0.25 * x * x)), 1e-14) << x;
    }
    EXPECT_NEAR(ki.f_limit(), std::sqrt(std::numbers::pi), 1e-15);
    EXPECT_NEAR(ki.moment_limit(), 2.0, 1e-15);
}

TEST(KernelIntegrals, LimitsAreGammaProducts) {
    for (double a : {0.1, 0.25, 0.5, 0.75, 0.9}) {
        const KernelIntegrals ki{KernelOrder(a)};
        EXPECT_NEAR(ki.f_limit(), std::tgamma(a) * std::tgamma(1.0 / (1.0 + a)), 1e-13 * ki.f_limit()) << a;
        EXPECT_NEAR(ki.moment_limit(), (1.0 + a) * std::tgamma(a), 1e-14 * ki.moment_limit()) << a;
        EXPECT_EQ(ki.f_alpha(INFINITY), ki.f_limit());
        EXPECT_EQ(ki.moment_alpha(INFINITY), ki.moment_limit());
    }
}

TEST(KernelIntegrals, ZeroAtOriginAndRejectsNegative) {
    const KernelIntegrals ki{KernelOrder(0.5)};
    EXPECT_EQ(ki.f_alpha(0.0), 0.0);
    EXPECT_EQ(ki.moment_alpha(0.0), 0.0);
    EXPECT_THROW(ki.f_alpha(-1.0), DomainError);
    EXPECT_THROW(ki.moment_alpha(-1e-300), DomainError);
    EXPECT_THROW(ki.kernel(0.0), DomainError);
    EXPECT_THROW(classical_erf_profile(-1.0), DomainError);
}

TEST(KernelIntegrals, SeriesAloneReportsCancellation) {
    const KernelIntegrals ki{KernelOrder(0.5)};
    const MLResult small = ki.f_series(0.5);
    EXPECT_EQ(small.route, Route::series);
    EXPECT_LT(small.abs_sum / small.value, 2.0);
    const MLResult big = ki.f_series(8.0);
    EXPECT_GT(big.abs_sum / std::abs(big.value), 1e6);
}

TEST(KernelIntegrals, SeriesAgreesWithQuadrature) {
    for (double a : {0.25, 0.5, 0.75, 0.9}) {
        const KernelIntegrals ki{KernelOrder(a)};
        for (int i = 1; i <= 20; ++i) {
            const double x = 10.0 * i / 20.0;
            EXPECT_NEAR(ki.f_alpha(x), ki.f_quadrature(x), 1e-10) << a << " " << x;
            EXPECT_NEAR(ki.moment_alpha(x), ki.moment_quadrature(x), 1e-10) << a << " " << x;
        }
    }
}

TEST(KernelIntegrals, MonotoneAndBounded) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ua(0.1, 1.0);
    for (int k = 0; k < 8; ++k) {
        const KernelIntegrals ki{KernelOrder(ua(rng))};
        double fp = 0.0, mp = 0.0;
        for (int i = 1; i <= 200; ++i) {
            const double x = 0.1 * i;
            const double f = ki.f_alpha(x), m = ki.moment_alpha(x);
            EXPECT_GE(f, fp - 1e-13);
            EXPECT_GE(m, mp - 1e-13);
            EXPECT_LE(f, ki.f_limit() + 1e-12);
            EXPECT_LE(m, ki.moment_limit() + 1e-12);
            fp = f;
            mp = m;
        }
    }
}

TEST(KernelIntegrals, KernelDerivativeOfCumulative) {
    for (double a : {0.3, 0.6, 0.95}) {
        const KernelIntegrals ki{KernelOrder(a)};
        for (double x : {0.5, 1.5, 4.0}) {
            const double h = 1e-4 * x;
            const double d = (ki.f_alpha(x + h) - ki.f_alpha(x - h)) / (2.0 * h);
            EXPECT_NEAR(d, ki.kernel(x), 1e-7) << a << " " << x;
            const double dm = (ki.moment_alpha(x + h) - ki.moment_alpha(x - h)) / (2.0 * h);
            EXPECT_NEAR(dm, x * ki.kernel(x), 1e-7) << a << " " << x;
        }
    }
}

TEST(CaputoOfSolution, ValueAtOriginAndScaling) {
    const KernelIntegrals ki{KernelOrder(0.5)};
    EXPECT_NEAR(ki.caputo_of_solution(-1.0, 0.0, 1.0), -std::sqrt(std::numbers::pi), 1e-15);
    EXPECT_EQ(ki.caputo_of_solution(0.0, 1.0, 1.0), 0.0);
    // D^a u(x,t) = t^(-a/(1+a)) D^a u(x t^(-1/(1+a)), 1)
    const double t = 3.0, x = 1.2;
    EXPECT_NEAR(ki.caputo_of_solution(2.0, x, t),
                std::pow(t, -0.5 / 1.5) * ki.caputo_of_solution(2.0, x * std::pow(t, -1.0 / 1.5), 1.0), 1e-14);
    EXPECT_THROW(ki.caputo_of_solution(1.0, 1.0, 0.0), DomainError);
}

TEST(CaputoOfSolution, ClassicalCaseIsSpaceDerivative) {
    const KernelIntegrals ki{KernelOrder(1.0)};
    for (double x : {0.0, 0.7, 2.0, 5.0}) EXPECT_NEAR(ki.caputo_of_solution(1.0, x, 1.0), std::exp(-0.25 * x * x), 1e-14);
}
