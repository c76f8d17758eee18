#pragma once

/// Residual checks of the constructed solutions against the governing
/// equations, evaluated independently of the construction.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <exception>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "fracstefan/errors.hpp"
#include "fracstefan/frac_ops.hpp"
#include "fracstefan/series_integrals.hpp"
#include "fracstefan/special_fn.hpp"
#include "fracstefan/stefan_solver.hpp"

namespace fracstefan {

struct Tolerances {
    double pde = 1e-6;            ///< t |u_t - lambda d/dx D^a u|, relative to |B|
    double quasi_stationary = 1e-7;
    double stefan = 1e-8;         ///< relative
    double boundary = 1e-10;
    double kernel_min = -1e-12;
    double limit_gap = 1e-2;      ///< f-gap at the last alpha of the limit sequence
    double exact_gap = 1e-10;     ///< alpha = 1 rows
    double identity = 1e-10;      ///< closed-form operator identities
    double series_identity = 1e-8;
};

struct VerificationConfig {
    std::vector<double> alpha_list{0.25, 0.5, 0.75, 0.9};
    int x_resolution = 64;
    std::vector<double> t_samples{0.5, 1.0, 2.0, 4.0};
    double z_max = 20.0;
    Tolerances tol{};
    /// finite-difference steps h_t = fd_rel_step t, h_x = fd_rel_step s(t)
    double fd_rel_step = 1e-4;
    /// combine steps h and h/2 by Richardson extrapolation
    bool richardson = false;
    /// residual grids start at this fraction of s(t) when alpha < 1
    double exclude_fraction = 0.05;
    /// orders of the kernel scan and of the classical-limit sequence
    std::vector<double> scan_alphas{0.1,  0.15, 0.2,  0.25, 0.3,  0.35, 0.4,  0.45, 0.5, 0.55,
                                    0.6,  0.65, 0.7,  0.75, 0.8,  0.85, 0.9,  0.95, 1.0};
    int scan_log_points = 200;
    int scan_linear_points = 400;
    std::vector<double> limit_alphas{0.9, 0.99, 0.999};
    int jobs = 1;

    void validate() const {
        if (alpha_list.empty()) throw DomainError("VerificationConfig: alpha_list is empty");
        for (double a : alpha_list) (void)KernelOrder(a);
        for (double a : scan_alphas) (void)KernelOrder(a);
        for (double a : limit_alphas) (void)KernelOrder(a);
        if (x_resolution < 16) throw DomainError("VerificationConfig: x_resolution must be >= 16");
        if (scan_log_points < 16 || scan_linear_points < 16)
            throw DomainError("VerificationConfig: scan resolutions must be >= 16");
        if (t_samples.empty()) throw DomainError("VerificationConfig: t_samples is empty");
        for (double t : t_samples)
            if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("VerificationConfig: t_samples must be positive");
        if (!(z_max > 0.0) || !std::isfinite(z_max)) throw DomainError("VerificationConfig: z_max must be positive");
        if (!(fd_rel_step > 0.0 && fd_rel_step < 0.1)) throw DomainError("VerificationConfig: fd_rel_step must lie in (0, 0.1)");
        if (!(exclude_fraction >= 0.0 && exclude_fraction < 1.0))
            throw DomainError("VerificationConfig: exclude_fraction must lie in [0, 1)");
        if (jobs < 1) throw DomainError("VerificationConfig: jobs must be >= 1");
    }
};

namespace detail {

// Evaluates f(i) for i in [0, n) on `jobs` threads; results land in index
// order so any later reduction is independent of scheduling.
template <class F>
std::vector<double> parallel_map(std::size_t n, int jobs, F&& f) {
    std::vector<double> out(n);
    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)), std::max<std::size_t>(n, 1));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) out[i] = f(i);
        return out;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < n; i += workers) out[i] = f(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace detail

struct ResidualReport {
    std::string problem;
    std::string grid;
    double pde_residual_sup = 0.0;
    double pde_residual_l2 = 0.0;
    double stefan_residual_sup = 0.0;
    double boundary_residual_sup = 0.0;
    double kernel_min = 0.0;
    std::string notes;
    bool pass = false;
};

inline void to_json(nlohmann::ordered_json& j, const ResidualReport& r) {
    j = nlohmann::ordered_json{{"problem", r.problem},
                               {"grid", r.grid},
                               {"pde_residual_sup", r.pde_residual_sup},
                               {"pde_residual_l2", r.pde_residual_l2},
                               {"stefan_residual_sup", r.stefan_residual_sup},
                               {"boundary_residual_sup", r.boundary_residual_sup},
                               {"kernel_min", r.kernel_min},
                               {"notes", r.notes},
                               {"pass", r.pass}};
}

inline std::string describe(const SimilaritySolution& s) {
    return std::string(to_string(s.kind())) + " alpha=" + detail::fmt(s.alpha()) + " A=" + detail::fmt(s.A()) +
           " B=" + detail::fmt(s.B()) + " front_coeff=" + detail::fmt(s.front_coeff());
}

/// sup over t_samples of |rho l s'(t) + nu k D^a u(s(t), t)| / |rho l s'(t)|.
inline double stefan_residual(const SimilaritySolution& sol, const VerificationConfig& cfg) {
    cfg.validate();
    const ThermalScales& sc = sol.scales();
    double worst = 0.0;
    for (double t : cfg.t_samples) {
        const double lhs = sc.rho * sc.latent * sol.front_velocity(t);
        const double rhs = -sc.nu * sc.k * sol.caputo(sol.front_position(t), t);
        worst = std::max(worst, std::abs(lhs - rhs) / std::abs(lhs));
    }
    return worst;
}

namespace detail {

// Boundary data measured at x = 0 and at the front.
inline double boundary_residual(const SimilaritySolution& sol, const VerificationConfig& cfg) {
    double worst = 0.0;
    const double a = sol.alpha();
    const double um = sol.A() + sol.B() * sol.profile(sol.front_coeff());
    for (double t : cfg.t_samples) {
        const double s = sol.front_position(t);
        worst = std::max(worst, std::abs(sol.temperature(s, t) - um));
        if (sol.kind() == SolutionKind::neumann) {
            // flux data D^a v(0+,t) = -g0 t^(-a/(1+a)), g0 recovered from B
            const ThermalScales& sc = sol.scales();
            const double g0 = -sol.B() * std::exp(log_gamma(a)) * std::pow(sc.diffusivity(), -a / (1.0 + a));
            const double want = -g0 * std::pow(t, -a / (1.0 + a));
            worst = std::max(worst, std::abs(sol.caputo(0.0, t) - want) / std::max(1.0, std::abs(want)));
        } else {
            worst = std::max(worst, std::abs(sol.temperature(0.0, t) - sol.A()));
        }
    }
    return worst;
}

}  // namespace detail

/// Residual of u_t = lambda d/dx D^a u on a grid inside 0 < x < s(t), with u_t
/// and the x-derivative from centred differences. Reported as t |residual| / |B|,
/// which is unchanged by the similarity rescaling x -> c x, t -> c^(1+a) t.
/// For the quasi-stationary profile only d/dx D^a u is checked, with D^a u
/// from quadrature.
inline ResidualReport pde_residual(const SimilaritySolution& sol, const VerificationConfig& cfg) {
    cfg.validate();
    const double a = sol.alpha();
    const bool qs = sol.kind() == SolutionKind::quasi_stationary;
    const double lam = sol.scales().diffusivity();
    const double lo = (a < 1.0) ? cfg.exclude_fraction : 0.0;
    const std::size_t nx = static_cast<std::size_t>(cfg.x_resolution);
    const std::size_t nt = cfg.t_samples.size();
    const double scale = std::abs(sol.B());

    const auto caputo = [&](double x, double t) { return qs ? sol.caputo_quadrature(x, t) : sol.caputo(x, t); };
    const auto point_residual = [&](double x, double t, double rel) {
        const double hx = rel * sol.front_position(t);
        const double dxd = (caputo(x + hx, t) - caputo(x - hx, t)) / (2.0 * hx);
        if (qs) return t * std::abs(dxd);
        const double ht = rel * t;
        const double ut = (sol.temperature(x, t + ht) - sol.temperature(x, t - ht)) / (2.0 * ht);
        return t * (ut - lam * dxd);
    };

    const std::vector<double> r = detail::parallel_map(nx * nt, cfg.jobs, [&](std::size_t idx) {
        const double t = cfg.t_samples[idx / nx];
        const std::size_t i = idx % nx;
        const double x = sol.front_position(t) * (lo + (1.0 - lo) * (static_cast<double>(i) + 0.5) / static_cast<double>(nx));
        if (scale == 0.0) return 0.0;
        double v = point_residual(x, t, cfg.fd_rel_step);
        if (cfg.richardson && !qs) v = (4.0 * point_residual(x, t, 0.5 * cfg.fd_rel_step) - v) / 3.0;
        return std::abs(v) / scale;
    });

    ResidualReport rep;
    rep.problem = describe(sol);
    rep.grid = "nx=" + std::to_string(nx) + " t=[";
    for (std::size_t k = 0; k < nt; ++k) rep.grid += (k ? "," : "") + detail::fmt(cfg.t_samples[k]);
    rep.grid += "] x in (" + detail::fmt(lo) + ", 1) s(t) fd_rel_step=" + detail::fmt(cfg.fd_rel_step);
    CompensatedSum sq;
    for (double v : r) {
        rep.pde_residual_sup = std::max(rep.pde_residual_sup, v);
        sq.add(v * v);
    }
    rep.pde_residual_l2 = std::sqrt(sq.value() / static_cast<double>(r.size()));
    rep.stefan_residual_sup = stefan_residual(sol, cfg);
    rep.boundary_residual_sup = detail::boundary_residual(sol, cfg);

    rep.kernel_min = std::numeric_limits<double>::infinity();
    if (!qs) {
        const KernelIntegrals& ki = sol.integrals();
        for (std::size_t i = 1; i <= nx; ++i)
            rep.kernel_min = std::min(rep.kernel_min, ki.kernel(sol.front_coeff() * static_cast<double>(i) / static_cast<double>(nx)));
    } else {
        rep.kernel_min = 0.0;
    }

    const double pde_tol = qs ? cfg.tol.quasi_stationary : cfg.tol.pde;
    rep.pass = rep.pde_residual_sup <= pde_tol && rep.stefan_residual_sup <= cfg.tol.stefan &&
               rep.boundary_residual_sup <= cfg.tol.boundary && rep.kernel_min >= cfg.tol.kernel_min;
    if (lo > 0.0) rep.notes = "strip x < " + detail::fmt(lo) + " s(t) excluded: u_x is unbounded at x = 0 for alpha < 1. ";
    if (qs) rep.notes += "quasi-stationary: only d/dx D^a u is checked; D^a u by tanh-sinh quadrature. ";
    if (scale == 0.0) rep.notes += "B = 0: constant profile. ";
    return rep;
}

struct KernelScan {
    double min_value;
    double argmin;
    double alpha_at_min;
    std::size_t evaluations;
    /// minimum per scanned order, in scan order
    std::vector<double> row_min;
};

/// sigma_a(z) grid (z log-spaced on [1e-4, z_max] plus linear on
/// [0.1, z_max]) over the configured orders.
inline std::vector<double> scan_points(const VerificationConfig& cfg) {
    std::vector<double> z;
    const double l0 = std::log(1e-4), l1 = std::log(cfg.z_max);
    for (int i = 0; i < cfg.scan_log_points; ++i) z.push_back(std::exp(l0 + (l1 - l0) * i / (cfg.scan_log_points - 1)));
    z.back() = cfg.z_max;
    const double z0 = std::min(0.1, cfg.z_max);
    for (int i = 0; i < cfg.scan_linear_points; ++i) z.push_back(z0 + (cfg.z_max - z0) * i / (cfg.scan_linear_points - 1));
    std::sort(z.begin(), z.end());
    z.erase(std::unique(z.begin(), z.end()), z.end());
    return z;
}

inline KernelScan kernel_nonnegativity_scan(const VerificationConfig& cfg) {
    cfg.validate();
    const std::vector<double> z = scan_points(cfg);
    const std::size_t na = cfg.scan_alphas.size();
    std::vector<KernelIntegrals> kis;
    for (double a : cfg.scan_alphas) kis.emplace_back(KernelOrder(a));
    const std::vector<double> v = detail::parallel_map(na * z.size(), cfg.jobs, [&](std::size_t idx) {
        return kis[idx / z.size()].kernel(z[idx % z.size()]);
    });
    KernelScan out{std::numeric_limits<double>::infinity(), 0.0, 0.0, v.size(), std::vector<double>(na, std::numeric_limits<double>::infinity())};
    for (std::size_t idx = 0; idx < v.size(); ++idx) {
        const std::size_t ia = idx / z.size();
        out.row_min[ia] = std::min(out.row_min[ia], v[idx]);
        if (v[idx] < out.min_value) {
            out.min_value = v[idx];
            out.argmin = z[idx % z.size()];
            out.alpha_at_min = cfg.scan_alphas[ia];
        }
    }
    return out;
}

/// Fixed points of the classical equations, solved without the kernel:
/// sqrt(pi) l e^(l^2) erf(l) = 1 with xi = 2 l, and x = 2 e^(-x^2/4).
struct ClassicalRoots {
    double xi1;
    double eta1;
};

inline double bisect_decreasing(const std::function<double(double)>& g, double lo, double hi) {
    for (int i = 0; i < 200 && hi - lo > 0.0; ++i) {
        const double m = 0.5 * (lo + hi);
        if (m <= lo || m >= hi) break;
        (g(m) > 0.0 ? lo : hi) = m;
    }
    return 0.5 * (lo + hi);
}

inline ClassicalRoots classical_roots() {
    const double sp = std::sqrt(std::numbers::pi);
    const double lam = bisect_decreasing([sp](double l) { return 1.0 - sp * l * std::exp(l * l) * std::erf(l); }, 0.0, 2.0);
    const double eta = bisect_decreasing([](double x) { return 2.0 * std::exp(-0.25 * x * x) - x; }, 0.0, 2.0);
    return {2.0 * lam, eta};
}

struct LimitRow {
    double alpha;
    double f_gap;
    double xi;
    double xi_gap;
    double eta;
    double eta_gap;
};

struct LimitReport {
    ClassicalRoots classical;
    std::vector<LimitRow> rows;     ///< the configured sequence, alpha increasing
    LimitRow exact;                 ///< alpha = 1 through the same code path
    bool f_gap_decreasing = false;
    bool xi_gap_decreasing = false;
    bool eta_gap_decreasing = false;
    bool pass = false;
};

inline LimitRow limit_row(double alpha, const ClassicalRoots& cr) {
    const KernelIntegrals ki{KernelOrder(alpha)};
    double gap = 0.0;
    for (int i = 0; i <= 400; ++i) {
        const double x = 4.0 * i / 400.0;
        gap = std::max(gap, std::abs(ki.f_alpha(x) - classical_erf_profile(x)));
    }
    const DirichletFrontMap H(ki, 1.0);
    const NeumannFrontMap G(ki, 1.0);
    const double xi = solve_front_coefficient(std::cref(H), default_dirichlet_bracket(H));
    const double eta = solve_front_coefficient(std::cref(G), default_neumann_bracket(G));
    return {alpha, gap, xi, std::abs(xi - cr.xi1), eta, std::abs(eta - cr.eta1)};
}

/// Sup-gap of f_a against sqrt(pi) erf(x/2) on [0,4] and the distance of
/// xi_a, eta_a (unit data) from the classical values, along alpha -> 1.
inline LimitReport classical_limit_report(const VerificationConfig& cfg) {
    cfg.validate();
    LimitReport rep;
    rep.classical = classical_roots();
    std::vector<double> alphas = cfg.limit_alphas;
    std::sort(alphas.begin(), alphas.end());
    std::vector<LimitRow> rows(alphas.size() + 1);
    const std::vector<double> dummy = detail::parallel_map(rows.size(), cfg.jobs, [&](std::size_t i) {
        rows[i] = limit_row(i < alphas.size() ? alphas[i] : 1.0, rep.classical);
        return 0.0;
    });
    (void)dummy;
    rep.exact = rows.back();
    rows.pop_back();
    rep.rows = rows;
    rep.f_gap_decreasing = rep.xi_gap_decreasing = rep.eta_gap_decreasing = true;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        rep.f_gap_decreasing = rep.f_gap_decreasing && rows[i].f_gap < rows[i - 1].f_gap;
        rep.xi_gap_decreasing = rep.xi_gap_decreasing && rows[i].xi_gap < rows[i - 1].xi_gap;
        rep.eta_gap_decreasing = rep.eta_gap_decreasing && rows[i].eta_gap < rows[i - 1].eta_gap;
    }
    const bool last_ok = rows.empty() || rows.back().f_gap <= cfg.tol.limit_gap;
    const bool exact_ok = rep.exact.f_gap <= cfg.tol.exact_gap && rep.exact.xi_gap <= cfg.tol.exact_gap &&
                          rep.exact.eta_gap <= cfg.tol.exact_gap;
    rep.pass = last_ok && exact_ok && rep.f_gap_decreasing && rep.xi_gap_decreasing && rep.eta_gap_decreasing;
    return rep;
}

struct IdentityResult {
    std::string name;
    double value;
    double reference;
    double error;
    double tolerance;
    bool pass;
};

/// Closed-form operator identities: the power rules against the grid
/// operators on data they reproduce exactly, the zero case of the RL power
/// rule, and the kernel's RL identity by the term-by-term series.
inline std::vector<IdentityResult> identity_checks(const VerificationConfig& cfg) {
    cfg.validate();
    std::vector<IdentityResult> out;
    const auto add = [&out](std::string name, double v, double ref, double tol) {
        const double err = std::abs(v - ref);
        out.push_back({std::move(name), v, ref, err, tol, err <= tol});
    };
    const double tol = cfg.tol.identity;
    for (double a : cfg.alpha_list) {
        if (a >= 1.0) continue;
        const std::string tag = "alpha=" + detail::fmt(a);
        const std::vector<double> nodes = graded_nodes(1.0, 64, a);
        const Grid1D one = Grid1D::sample(nodes, [](double) { return 1.0; });
        const Grid1D lin = Grid1D::sample(nodes, [](double p) { return p; });
        add("rl_integral of 1, " + tag, rl_integral_num(one, a, 1.0), power_rule_integral(0.0, a, 1.0), tol);
        add("rl_integral of p, " + tag, rl_integral_num(lin, a, 1.0), power_rule_integral(1.0, a, 1.0), tol);
        add("caputo of p, " + tag, caputo_num(lin, a, 1.0), power_rule_integral(0.0, 1.0 - a, 1.0), tol);
        add("caputo of 1, " + tag, caputo_num(one, a, 1.0), 0.0, tol);
        add("rl_derivative power rule at beta=alpha-1, " + tag, power_rule_rl_derivative(a - 1.0, a, 1.0), 0.0, 0.0);
        PowerHead head{{1.0}, {a - 1.0}};
        const Grid1D zero = Grid1D::sample(nodes, [](double) { return 0.0; });
        add("rl_derivative of p^(alpha-1) by head + grid, " + tag, rl_derivative_num(head, zero, a, 1.0), 0.0, tol);
        add("rl_derivative of p, " + tag, power_rule_rl_derivative(1.0, a, 1.0),
            std::exp(-log_gamma(2.0 - a)), tol);
        for (double x : {0.5, 1.0, 2.0}) {
            const IdentityCheck k = kilbas_saigo_rl_identity(KernelOrder(a), x);
            add("kernel RL identity (series), " + tag + " x=" + detail::fmt(x), k.lhs_series, k.rhs,
                cfg.tol.series_identity * std::max(1.0, std::abs(k.rhs)));
        }
    }
    return out;
}

}  // namespace fracstefan
