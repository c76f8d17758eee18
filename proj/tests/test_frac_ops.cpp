#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "fracstefan/frac_ops.hpp"

using namespace fracstefan;

namespace {

Grid1D power_grid(const std::vector<double>& nodes, double beta) {
    return Grid1D::sample(nodes, [beta](double p) { return p == 0.0 ? 0.0 : std::pow(p, beta); });
}

}  // namespace

TEST(Grid1D, ValidatesNodes) {
    EXPECT_THROW(Grid1D({0.0, 1.0}, {1.0, 2.0}), DomainError);
    EXPECT_THROW(Grid1D({0.1, 0.5, 1.0}, {1.0, 2.0, 3.0}), DomainError);
    EXPECT_THROW(Grid1D({0.0, 0.5, 0.5}, {1.0, 2.0, 3.0}), DomainError);
    EXPECT_THROW(Grid1D({0.0, 0.5, 1.0}, {1.0, NAN, 3.0}), DomainError);
    EXPECT_THROW(Grid1D({0.0, 0.5, 1.0}, {1.0, 2.0}), DomainError);
    const Grid1D g({0.0, 0.5, 1.0}, {1.0, 2.0, 3.0});
    EXPECT_EQ(g.index_of(0.5), 1u);
    EXPECT_THROW(g.index_of(0.7), DomainError);
}

TEST(Grid1D, GradedNodesClusterAtOrigin) {
    const auto x = graded_nodes(2.0, 10, 0.5);
    ASSERT_EQ(x.size(), 11u);
    EXPECT_EQ(x.front(), 0.0);
    EXPECT_EQ(x.back(), 2.0);
    EXPECT_NEAR(x[1], 2.0 * std::pow(0.1, 3.0), 1e-16);
    EXPECT_THROW(graded_nodes(0.0, 10, 0.5), DomainError);
    EXPECT_EQ(uniform_nodes(1.0, 4)[2], 0.5);
}

TEST(PowerRules, ClosedForms) {
    EXPECT_NEAR(power_rule_integral(0.0, 0.5, 1.0), 1.0 / std::tgamma(1.5), 1e-15);
    EXPECT_NEAR(power_rule_integral(1.0, 1.0, 2.0), 2.0, 1e-15);
    EXPECT_NEAR(power_rule_rl_derivative(1.0, 1.0, 3.0), 1.0, 1e-15);
    EXPECT_NEAR(power_rule_rl_derivative(0.0, 0.5, 1.0), 1.0 / std::sqrt(std::numbers::pi), 1e-15);
    EXPECT_THROW(power_rule_integral(-1.0, 0.5, 1.0), DomainError);
    EXPECT_THROW(power_rule_rl_derivative(0.5, 1.5, 1.0), DomainError);
}

TEST(PowerRules, RiemannLiouvilleZeroCase) {
    for (double a : {0.1, 0.25, 0.5, 0.75, 0.9, 1.0}) {
        for (double x : {0.01, 1.0, 7.0}) EXPECT_EQ(power_rule_rl_derivative(a - 1.0, a, x), 0.0) << a;
    }
    // through the head/grid split, with the singular term as head
    const double a = 0.4;
    const Grid1D zero = Grid1D::sample(graded_nodes(1.0, 64, a), [](double) { return 0.0; });
    EXPECT_EQ(rl_derivative_num(PowerHead{{1.0}, {a - 1.0}}, zero, a, 1.0), 0.0);
}

TEST(RlIntegral, ExactForAffineData) {
    const auto nodes = graded_nodes(2.0, 40, 0.3);
    const Grid1D g = Grid1D::sample(nodes, [](double p) { return 3.0 - 2.0 * p; });
    for (double a : {0.2, 0.5, 0.95}) {
        for (std::size_t k : {5u, 20u, 40u}) {
            const double x = nodes[k];
            const double ref = 3.0 * power_rule_integral(0.0, a, x) - 2.0 * power_rule_integral(1.0, a, x);
            EXPECT_NEAR(rl_integral_num(g, a, x), ref, 1e-13 * (1.0 + std::abs(ref))) << a << " " << x;
        }
    }
    EXPECT_EQ(rl_integral_num(g, 0.5, 0.0), 0.0);
    EXPECT_THROW(rl_integral_num(g, 0.0, 2.0), DomainError);
}

TEST(RlIntegral, SecondOrderOnGradedGrid) {
    for (double a : {0.25, 0.5, 0.75}) {
        for (double beta : {0.5, 1.5}) {
            const double ref = power_rule_integral(beta, a, 1.0);
            double prev = 0.0;
            for (std::size_t n : {500u, 1000u, 2000u}) {
                const double err = std::abs(rl_integral_num(power_grid(graded_nodes(1.0, n, a), beta), a, 1.0) - ref);
                if (prev > 0.0) {
                    EXPECT_GT(prev / err, 3.5) << a << " " << beta << " " << n;
                }
                prev = err;
            }
            EXPECT_LT(prev, 1e-6);
        }
    }
}

TEST(Caputo, ExactForAffineData) {
    const auto nodes = uniform_nodes(1.0, 16);
    const Grid1D g = Grid1D::sample(nodes, [](double p) { return 1.0 + 4.0 * p; });
    for (double a : {0.1, 0.5, 0.9}) {
        EXPECT_NEAR(caputo_num(g, a, 1.0), 4.0 * power_rule_rl_derivative(1.0, a, 1.0), 1e-13);
        EXPECT_NEAR(caputo_num(g, a, 0.5), 4.0 * power_rule_rl_derivative(1.0, a, 0.5), 1e-13);
    }
    EXPECT_THROW(caputo_num(g, 0.5, 0.0), DomainError);
    EXPECT_THROW(caputo_num(g, 1.0, 1.0), DomainError);
}

// L1 is of order 2 - alpha: halving the step divides the error by 2^(2-alpha),
// which is at least 3 only for alpha <= 2 - log2(3) ~ 0.415.
TEST(Caputo, ConvergenceOrderIsTwoMinusAlpha) {
    for (double a : {0.25, 0.5, 0.75}) {
        const double ref = power_rule_rl_derivative(2.0, a, 1.0);
        std::vector<double> err;
        for (std::size_t n : {200u, 400u, 800u, 1600u}) {
            const Grid1D g = Grid1D::sample(uniform_nodes(1.0, n), [](double p) { return p * p; });
            err.push_back(std::abs(caputo_num(g, a, 1.0) - ref));
        }
        const double expected = std::pow(2.0, 2.0 - a);
        for (std::size_t i = 1; i < err.size(); ++i) EXPECT_NEAR(err[i - 1] / err[i], expected, 0.1) << a;
        if (a < 0.4) {
            EXPECT_GE(err[err.size() - 2] / err.back(), 3.0);
        }
    }
}

TEST(Caputo, PowerRuleOnGradedGrid) {
    for (double a : {0.25, 0.5, 0.75}) {
        const double beta = 0.5;
        const double ref = power_rule_rl_derivative(beta, a, 1.0);
        const double err = std::abs(caputo_num(power_grid(graded_nodes(1.0, 64000, a), beta), a, 1.0) - ref);
        EXPECT_LT(err, 1e-6) << a;
    }
}

// D^a p^2 - 2x = 2x (x^(1-a)/Gamma(3-a) - 1) ~ 2x (psi(2) - ln x)(1 - a) as
// a -> 1: the gap is first order in 1 - a with that constant.
TEST(Caputo, ApproachesFirstDerivative) {
    const double psi2 = 1.0 - std::numbers::egamma;
    const Grid1D g = Grid1D::sample(uniform_nodes(2.0, 400000), [](double p) { return p * p; });
    for (double x : {0.5, 1.0, 2.0}) {
        const double c = 2.0 * x * std::abs(psi2 - std::log(x));
        double prev = INFINITY;
        for (double a : {0.9, 0.99, 0.999}) {
            const double gap = std::abs(caputo_num(g, a, x) - 2.0 * x);
            EXPECT_LT(gap, prev) << a << " " << x;
            EXPECT_LE(gap, 1.5 * c * (1.0 - a) + 2e-5) << a << " " << x;
            prev = gap;
        }
        EXPECT_NEAR(std::abs(caputo_num(g, 0.999, x) - 2.0 * x) / 1e-3, c, 0.05 * c + 0.02) << x;
    }
}

TEST(RlDerivative, CaputoPlusInitialValueTerm) {
    for (double a : {0.3, 0.7}) {
        const Grid1D g = Grid1D::sample(graded_nodes(1.0, 2000, a), [](double p) { return 1.0 + p * p; });
        for (double x : {1.0}) {
            const double lhs = caputo_num(g, a, x) + std::pow(x, -a) / std::tgamma(1.0 - a);
            EXPECT_NEAR(lhs, rl_derivative_num(g, a, x), 1e-7) << a;
        }
        const double exact = power_rule_rl_derivative(0.0, a, 1.0) + power_rule_rl_derivative(2.0, a, 1.0);
        EXPECT_NEAR(rl_derivative_num(g, a, 1.0), exact, 1e-4) << a;
    }
}

TEST(RlDerivative, LeftInverseOfIntegral) {
    const double a = 0.5;
    const auto nodes = graded_nodes(1.0, 400, a, 1.0);
    const Grid1D g = Grid1D::sample(nodes, [](double p) { return std::cos(p); });
    std::vector<double> Ig(nodes.size(), 0.0);
    for (std::size_t k = 1; k < nodes.size(); ++k) Ig[k] = rl_integral_num(g, a, nodes[k]);
    const Grid1D G(nodes, Ig);
    for (std::size_t k : {100u, 250u, 400u}) EXPECT_NEAR(rl_derivative_num(G, a, nodes[k]), std::cos(nodes[k]), 2e-3);
}

TEST(KernelIdentity, SeriesSideMatchesClosedForm) {
    for (double a : {0.25, 0.5, 0.75, 0.9, 1.0}) {
        for (double x : {0.5, 1.0, 2.0}) {
            const IdentityCheck c = kilbas_saigo_rl_identity(KernelOrder(a), x);
            EXPECT_NEAR(c.lhs_series, c.rhs, 1e-12) << a << " " << x;
        }
    }
}

TEST(KernelIdentity, GridSideConvergesToClosedForm) {
    for (double a : {0.5, 0.75}) {
        for (double x : {0.5, 1.0, 2.0}) {
            const double e1 = std::abs(kilbas_saigo_rl_identity(KernelOrder(a), x, {}, 1000).lhs_numeric -
                                       kilbas_saigo_rl_identity(KernelOrder(a), x, {}, 1000).rhs);
            const IdentityCheck c = kilbas_saigo_rl_identity(KernelOrder(a), x, {}, 4000);
            const double e4 = std::abs(c.lhs_numeric - c.rhs);
            EXPECT_LT(e4, 5e-5) << a << " " << x;
            EXPECT_LT(e4, e1) << a << " " << x;
        }
    }
    EXPECT_THROW(kilbas_saigo_rl_identity(KernelOrder(0.5), 0.0), DomainError);
}
