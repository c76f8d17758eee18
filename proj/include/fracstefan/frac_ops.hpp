#pragma once

/// Grid-based fractional operators with exact product-integration weights for
/// piecewise-linear data, and the closed-form power rules they are checked
/// against.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "fracstefan/errors.hpp"
#include "fracstefan/series_integrals.hpp"
#include "fracstefan/special_fn.hpp"

namespace fracstefan {

/// Samples of a function on 0 = x_0 < x_1 < ... < x_n.
class Grid1D {
public:
    Grid1D(std::vector<double> nodes, std::vector<double> values) : nodes_(std::move(nodes)), values_(std::move(values)) {
        if (nodes_.size() != values_.size()) throw DomainError("Grid1D: nodes and values differ in length");
        if (nodes_.size() < 3) throw DomainError("Grid1D: at least 3 nodes required");
        if (nodes_.front() != 0.0) throw DomainError("Grid1D: first node must be 0");
        for (std::size_t i = 1; i < nodes_.size(); ++i) {
            if (!(nodes_[i] > nodes_[i - 1])) throw DomainError("Grid1D: nodes must be strictly increasing");
            if (!std::isfinite(nodes_[i])) throw DomainError("Grid1D: nodes must be finite");
        }
        for (double v : values_)
            if (!std::isfinite(v)) throw DomainError("Grid1D: values must be finite");
    }

    template <class F>
    static Grid1D sample(std::vector<double> nodes, F&& f) {
        std::vector<double> v;
        v.reserve(nodes.size());
        for (double x : nodes) v.push_back(f(x));
        return Grid1D(std::move(nodes), std::move(v));
    }

    const std::vector<double>& nodes() const noexcept { return nodes_; }
    const std::vector<double>& values() const noexcept { return values_; }
    std::size_t size() const noexcept { return nodes_.size(); }

    /// Index of the node equal to x; DomainError when x is not a node.
    std::size_t index_of(double x) const {
        const auto it = std::lower_bound(nodes_.begin(), nodes_.end(), x);
        if (it == nodes_.end() || *it != x)
            throw DomainError("Grid1D: evaluation point " + std::to_string(x) + " is not a grid node");
        return static_cast<std::size_t>(it - nodes_.begin());
    }

private:
    std::vector<double> nodes_;
    std::vector<double> values_;
};

/// n+1 equispaced nodes on [0, x_max].
inline std::vector<double> uniform_nodes(double x_max, std::size_t n) {
    if (!(x_max > 0.0) || n < 2) throw DomainError("uniform_nodes: need x_max > 0 and n >= 2");
    std::vector<double> x(n + 1);
    for (std::size_t i = 0; i <= n; ++i) x[i] = x_max * static_cast<double>(i) / static_cast<double>(n);
    x[n] = x_max;
    return x;
}

/// n+1 nodes x_max (i/n)^(guard/alpha), clustered at 0.
inline std::vector<double> graded_nodes(double x_max, std::size_t n, double alpha, double guard = 1.5) {
    if (!(x_max > 0.0) || n < 2) throw DomainError("graded_nodes: need x_max > 0 and n >= 2");
    if (!(alpha > 0.0) || !(guard > 0.0)) throw DomainError("graded_nodes: alpha and guard must be positive");
    const double r = std::max(1.0, guard / alpha);
    std::vector<double> x(n + 1);
    for (std::size_t i = 0; i <= n; ++i) x[i] = x_max * std::pow(static_cast<double>(i) / static_cast<double>(n), r);
    x[n] = x_max;
    return x;
}

namespace detail {

// (lo+w)^g - lo^g for lo >= 0, w > 0. The width is passed separately: on
// graded grids it can be far below the ulp of lo.
inline double pow_step(double lo, double w, double g) {
    if (lo == 0.0) return std::pow(w, g);
    return std::pow(lo, g) * std::expm1(g * std::log1p(w / lo));
}

// int_lo^(lo+w) (u - lo) u^(g-1) du. For w << lo the closed form cancels to
// O(w^2) out of O(w) terms, so the binomial series in r = w/lo is summed:
//   lo^(g+1) sum_{k>=2} C(g-1, k-2) r^k / k.
inline double first_moment_step(double lo, double w, double g) {
    if (lo == 0.0) return std::pow(w, g + 1.0) / (g + 1.0);
    const double r = w / lo;
    if (r > 0.1) return pow_step(lo, w, g + 1.0) / (g + 1.0) - lo * pow_step(lo, w, g) / g;
    double c = 1.0;
    double rk = r * r;
    double sum = 0.0;
    for (int k = 2; k < 40; ++k) {
        const double t = c * rk / k;
        sum += t;
        if (std::abs(t) <= 1e-18 * std::abs(sum)) break;
        c *= (g - 1.0 - (k - 2)) / (k - 1);
        rk *= r;
    }
    return std::pow(lo, g + 1.0) * sum;
}

// (1/Gamma(beta)) int_0^y g(p) (y-p)^(beta-1) dp for the piecewise-linear
// interpolant of the grid, 0 < y <= x_n.
inline double rl_integral_at(const std::vector<double>& x, const std::vector<double>& v, double beta, double y) {
    CompensatedSum acc;
    for (std::size_t j = 0; j + 1 < x.size() && x[j] < y; ++j) {
        double p1 = x[j + 1];
        double g1 = v[j + 1];
        if (p1 > y) {
            g1 = v[j] + (v[j + 1] - v[j]) * (y - x[j]) / (x[j + 1] - x[j]);
            p1 = y;
        }
        // u = y - p runs over [u1, u1 + d]; g = g1 + (g0 - g1)(u - u1)/d
        const double g0 = v[j];
        const double d = p1 - x[j];
        const double u1 = y - p1;
        const double J0 = pow_step(u1, d, beta) / beta;
        const double J1 = first_moment_step(u1, d, beta);
        acc.add(g1 * J0 + (g0 - g1) / d * J1);
    }
    return acc.value() / std::exp(log_gamma(beta));
}

inline void require_order(double a, const char* who) {
    if (!(a > 0.0 && a < 1.0)) throw DomainError(std::string(who) + ": order must lie in (0,1)");
}

}  // namespace detail

/// Riemann-Liouville integral I^beta g at a grid node, exact for
/// piecewise-linear g.
inline double rl_integral_num(const Grid1D& g, double beta, double x) {
    detail::require_order(beta, "rl_integral_num");
    const std::size_t k = g.index_of(x);
    if (k == 0) return 0.0;
    return detail::rl_integral_at(g.nodes(), g.values(), beta, x);
}

/// L1 Caputo derivative at a grid node: exact for piecewise-linear g.
inline double caputo_num(const Grid1D& g, double alpha, double x) {
    detail::require_order(alpha, "caputo_num");
    const std::size_t k = g.index_of(x);
    if (k < 1) throw DomainError("caputo_num: need at least two nodes up to x");
    const auto& p = g.nodes();
    const auto& v = g.values();
    CompensatedSum acc;
    for (std::size_t j = 0; j < k; ++j) {
        const double slope = (v[j + 1] - v[j]) / (p[j + 1] - p[j]);
        acc.add(slope * detail::pow_step(x - p[j + 1], p[j + 1] - p[j], 1.0 - alpha));
    }
    return acc.value() / std::exp(log_gamma(2.0 - alpha));
}

/// Riemann-Liouville derivative d/dx I^(1-alpha) g at a grid node. The
/// derivative is a one-sided second-order difference with step 1e-2 times the
/// preceding node spacing: a centred stencil would straddle the node, where
/// the piecewise-linear integral has a kink in its derivative.
inline double rl_derivative_num(const Grid1D& g, double alpha, double x) {
    detail::require_order(alpha, "rl_derivative_num");
    const std::size_t k = g.index_of(x);
    if (k < 1) throw DomainError("rl_derivative_num: need at least two nodes up to x");
    const auto& p = g.nodes();
    const auto& v = g.values();
    const double h = 1e-2 * (p[k] - p[k - 1]);
    const double beta = 1.0 - alpha;
    const double f0 = detail::rl_integral_at(p, v, beta, x);
    const double f1 = detail::rl_integral_at(p, v, beta, x - h);
    const double f2 = detail::rl_integral_at(p, v, beta, x - 2.0 * h);
    return (3.0 * f0 - 4.0 * f1 + f2) / (2.0 * h);
}

/// I^alpha x^beta = Gamma(beta+1)/Gamma(beta+alpha+1) x^(beta+alpha).
inline double power_rule_integral(double beta_pow, double alpha, double x) {
    if (!(beta_pow > -1.0)) throw DomainError("power_rule_integral: power must exceed -1");
    if (!(alpha > 0.0)) throw DomainError("power_rule_integral: order must be positive");
    if (!(x > 0.0)) throw DomainError("power_rule_integral: x must be positive");
    return std::exp(log_gamma(beta_pow + 1.0) - log_gamma(beta_pow + alpha + 1.0)) * std::pow(x, beta_pow + alpha);
}

/// RL derivative of x^beta, 0 < alpha <= 1: Gamma(beta+1)/Gamma(beta-alpha+1)
/// x^(beta-alpha), and exactly 0 at beta = alpha - 1.
inline double power_rule_rl_derivative(double beta_pow, double alpha, double x) {
    if (!(beta_pow > -1.0)) throw DomainError("power_rule_rl_derivative: power must exceed -1");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("power_rule_rl_derivative: order must lie in (0,1]");
    if (!(x > 0.0)) throw DomainError("power_rule_rl_derivative: x must be positive");
    const double den = beta_pow - alpha + 1.0;
    if (std::abs(den) <= 4.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(beta_pow))) return 0.0;
    const SignedLog gd = log_abs_gamma(den);
    return gd.sign * std::exp(log_gamma(beta_pow + 1.0) - gd.log_abs) * std::pow(x, beta_pow - alpha);
}

/// Sum_i coeff_i x^power_i: the singular head of a profile, differentiated by
/// the power rule while the grid carries the remainder.
struct PowerHead {
    std::vector<double> coeff;
    std::vector<double> power;

    double value(double x) const {
        double s = 0.0;
        for (std::size_t i = 0; i < coeff.size(); ++i) s += coeff[i] * std::pow(x, power[i]);
        return s;
    }
    double rl_derivative(double alpha, double x) const {
        CompensatedSum s;
        for (std::size_t i = 0; i < coeff.size(); ++i) s.add(coeff[i] * power_rule_rl_derivative(power[i], alpha, x));
        return s.value();
    }
    double rl_integral(double beta, double x) const {
        CompensatedSum s;
        for (std::size_t i = 0; i < coeff.size(); ++i) s.add(coeff[i] * power_rule_integral(power[i], beta, x));
        return s.value();
    }
};

/// RL derivative of head + remainder, the remainder given on a grid.
inline double rl_derivative_num(const PowerHead& head, const Grid1D& remainder, double alpha, double x) {
    return head.rl_derivative(alpha, x) + rl_derivative_num(remainder, alpha, x);
}

/// The three sides of the identity
///   D^a_RL sigma_a(x) = -(1/(1+a)) x^a E_{a,1+1/a,1}(-x^(1+a)/(1+a)).
struct IdentityCheck {
    double lhs_numeric;  ///< grid operator with power-rule head
    double lhs_series;   ///< power rule applied term by term to the kernel series
    double rhs;          ///< Mittag-Leffler closed form
};

namespace detail {

// Series of sigma_a: sum_n k_n w^((n+1)b-2), k_n = c_n (-1)^n / b^n.
inline std::vector<double> kernel_power_coefficients(KernelOrder a, int count) {
    const MLParams p = a.ml_params();
    const double b = a.b();
    std::vector<double> k(static_cast<std::size_t>(count));
    double c = 1.0;
    for (int n = 0; n < count; ++n) {
        k[static_cast<std::size_t>(n)] = c;
        c *= -ml_ratio(p, n) / b;
    }
    return k;
}

}  // namespace detail

/// Evaluates both sides of the kernel's Riemann-Liouville identity at x > 0.
/// head_terms leading series terms are differentiated in closed form; the
/// remainder is sampled on n_grid cells of a graded grid.
inline IdentityCheck kilbas_saigo_rl_identity(KernelOrder a, double x, const Truncation& tr = {},
                                              std::size_t n_grid = 4000, int head_terms = 6) {
    if (!(x > 0.0)) throw DomainError("kilbas_saigo_rl_identity: x must be positive");
    tr.validate();
    const double al = a.alpha;
    const double b = a.b();
    const MLResult e = ml_eval(a.ml_params(), -std::pow(x, b) / b, tr);
    const double rhs = -std::pow(x, al) * e.value / b;

    // term-by-term oracle
    const detail::SeriesOutcome s = detail::sum_series(
        -std::pow(x, b) / b, [p = a.ml_params()](int n) { return detail::ml_ratio(p, n); },
        [b, al](int n) {
            const double beta = (n + 1) * b - 2.0;
            return std::exp(log_gamma(beta + 1.0) - log_gamma(beta - al + 1.0)) / b;
        },
        tr, 1);
    if (!s.converged) throw ConvergenceError("kilbas_saigo_rl_identity: oracle series did not converge", s.value, s.last_term, s.terms);
    // (-x^b/b)^n x^(b-2-a) b = x^((n+1)b-2-a) (-1)^n / b^n
    const double lhs_series = s.value * b * std::pow(x, b - 2.0 - al);

    if (al == 1.0) {
        // classical case: the derivative of exp(-(x/2)^2)
        return {-0.5 * x * std::exp(-0.25 * x * x), lhs_series, rhs};
    }

    const std::vector<double> k = detail::kernel_power_coefficients(a, head_terms);
    PowerHead head;
    for (int n = 0; n < head_terms; ++n) {
        head.coeff.push_back(k[static_cast<std::size_t>(n)]);
        head.power.push_back((n + 1) * b - 2.0);
    }
    const KernelIntegrals ki(a, tr);
    const auto remainder = [&](double w) {
        if (w == 0.0) return 0.0;
        // tail of the kernel series from head_terms on
        const double zz = -std::pow(w, b) / b;
        const MLParams p = a.ml_params();
        const detail::SeriesOutcome t = detail::sum_series(
            zz, [&p](int n) { return detail::ml_ratio(p, n); },
            [](int) { return 1.0; }, tr, head_terms);
        if (t.converged && !detail::ill_conditioned(t, tr)) return std::pow(w, al - 1.0) * t.value;
        return ki.kernel(w) - head.value(w);
    };
    const Grid1D grid = Grid1D::sample(graded_nodes(x, n_grid, al, 1.0), remainder);
    const double lhs_numeric = rl_derivative_num(head, grid, al, x);
    return {lhs_numeric, lhs_series, rhs};
}

}  // namespace fracstefan
