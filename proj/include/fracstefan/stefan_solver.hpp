#pragma once

/// Self-similar solutions u = A + B F(x / (lambda t)^(1/(1+a))) of the one-phase
/// space-fractional Stefan problems, with F = f_a for Dirichlet and Neumann
/// data and F(z) = z^a for the quasi-stationary problem.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <string>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "fracstefan/errors.hpp"
#include "fracstefan/series_integrals.hpp"
#include "fracstefan/special_fn.hpp"

namespace fracstefan {

/// Thermophysical constants; all default to 1. The problem is solved in
/// units where they are 1 and mapped back:
///   t~ = lambda t, lambda = nu k / (rho c),   u~ = (c/l) u.
struct ThermalScales {
    double rho = 1.0;
    double c = 1.0;
    double k = 1.0;
    double latent = 1.0;
    double nu = 1.0;

    void validate() const {
        for (double v : {rho, c, k, latent, nu})
            if (!(v > 0.0) || !std::isfinite(v)) throw DomainError("ThermalScales: constants must be positive and finite");
    }
    double diffusivity() const noexcept { return nu * k / (rho * c); }
    /// temperature unit l/c
    double temperature_unit() const noexcept { return latent / c; }
    bool is_unit() const noexcept { return rho == 1.0 && c == 1.0 && k == 1.0 && latent == 1.0 && nu == 1.0; }
};

struct DirichletProblem {
    KernelOrder alpha;
    double U0;
    double Um;
    ThermalScales scales{};

    void validate() const {
        if (!std::isfinite(U0) || !std::isfinite(Um)) throw DomainError("DirichletProblem: U0 and Um must be finite");
        if (!(U0 > Um)) throw DomainError("DirichletProblem: requires U0 > Um");
        scales.validate();
    }
};

/// Flux data D^a v(0+, t) = -g0 t^(-a/(1+a)), melting temperature gm.
struct NeumannProblem {
    KernelOrder alpha;
    double g0;
    double gm;
    ThermalScales scales{};

    void validate() const {
        if (!std::isfinite(g0) || !std::isfinite(gm)) throw DomainError("NeumannProblem: g0 and gm must be finite");
        if (!(g0 > 0.0)) throw DomainError("NeumannProblem: requires g0 > 0");
        scales.validate();
    }
};

struct RootBracket {
    double lo;
    double hi;
    double tol = 1e-12;
    int max_iter = 200;

    void validate() const {
        if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) throw DomainError("RootBracket: requires lo < hi");
        if (!(tol > 0.0)) throw DomainError("RootBracket: tol must be positive");
        if (max_iter < 1) throw DomainError("RootBracket: max_iter must be positive");
    }
};

/// H(x) = D (Gamma(a)(1+a) - int_0^x w sigma) / int_0^x sigma, D the scaled
/// Stefan number (c/l)(U0 - Um).
class DirichletFrontMap {
public:
    DirichletFrontMap(KernelIntegrals ki, double stefan) : ki_(std::move(ki)), stefan_(stefan) {}
    explicit DirichletFrontMap(const DirichletProblem& p, Truncation tr = {})
        : ki_(p.alpha, tr), stefan_((p.U0 - p.Um) / p.scales.temperature_unit()) {
        p.validate();
    }

    double operator()(double x) const {
        if (!(x > 0.0)) throw DomainError("H_alpha: x must be positive");
        return stefan_ * (ki_.moment_limit() - ki_.moment_alpha(x)) / ki_.f_alpha(x);
    }
    double stefan_number() const noexcept { return stefan_; }
    const KernelIntegrals& integrals() const noexcept { return ki_; }

private:
    KernelIntegrals ki_;
    double stefan_;
};

/// G(x) = g0 ((1+a) - int_0^x w sigma / Gamma(a)), g0 in scaled units.
class NeumannFrontMap {
public:
    NeumannFrontMap(KernelIntegrals ki, double g0) : ki_(std::move(ki)), g0_(g0) {}
    explicit NeumannFrontMap(const NeumannProblem& p, Truncation tr = {})
        : ki_(p.alpha, tr), g0_(scaled_flux(p)) {
        p.validate();
    }

    double operator()(double x) const {
        if (!(x >= 0.0)) throw DomainError("G_alpha: x must be nonnegative");
        const double a = ki_.alpha();
        return g0_ * ((1.0 + a) - ki_.moment_alpha(x) / std::exp(log_gamma(a)));
    }
    double flux() const noexcept { return g0_; }
    const KernelIntegrals& integrals() const noexcept { return ki_; }

    /// (c/l) g0 lambda^(a/(1+a))
    static double scaled_flux(const NeumannProblem& p) {
        const double a = p.alpha.alpha;
        return p.g0 / p.scales.temperature_unit() * std::pow(p.scales.diffusivity(), a / (1.0 + a));
    }

private:
    KernelIntegrals ki_;
    double g0_;
};

/// H at a single point. Builds the kernel tables; use DirichletFrontMap for
/// repeated evaluation.
inline double H_alpha(const DirichletProblem& p, double x) { return DirichletFrontMap(p)(x); }

/// G at a single point.
inline double G_alpha(const NeumannProblem& p, double x) { return NeumannFrontMap(p)(x); }

namespace detail {

inline std::string bracket_state(double lo, double hi, double flo, double fhi) {
    char buf[160];
    std::snprintf(buf, sizeof buf, " [lo=%.17g, hi=%.17g, f(lo)-lo=%.6g, f(hi)-hi=%.6g]", lo, hi, flo, fhi);
    return buf;
}

}  // namespace detail

/// Fixed point x = f(x) of a decreasing f inside the bracket: Illinois steps
/// that never leave the bracket, bisection when they stall. Converged when
/// |f(x) - x| <= tol. A coarse scan first checks that f(x) - x changes sign
/// exactly once.
inline double solve_front_coefficient(const std::function<double(double)>& f, const RootBracket& br, int scan_points = 32) {
    br.validate();
    const auto phi = [&f](double x) { return f(x) - x; };
    double a = br.lo, b = br.hi;
    double fa = phi(a), fb = phi(b);
    if (!(fa > 0.0 && fb < 0.0))
        throw BracketingError("solve_front_coefficient: f(x) - x does not change sign" + detail::bracket_state(a, b, fa, fb), a, b);

    int changes = 0;
    double prev = fa;
    for (int i = 1; i <= scan_points; ++i) {
        const double x = (i == scan_points) ? b : a + (b - a) * i / scan_points;
        const double v = (i == scan_points) ? fb : phi(x);
        if ((prev > 0.0) != (v > 0.0)) ++changes;
        prev = v;
    }
    if (changes != 1)
        throw BracketingError("solve_front_coefficient: " + std::to_string(changes) + " sign changes on the scan" +
                                  detail::bracket_state(a, b, fa, fb),
                              a, b);

    double best = std::abs(fa) < std::abs(fb) ? a : b;
    double best_res = std::min(std::abs(fa), std::abs(fb));
    int side = 0;
    for (int it = 0; it < br.max_iter; ++it) {
        double x = b - fb * (b - a) / (fb - fa);
        const double width = b - a;
        if (!(x > a && x < b)) x = 0.5 * (a + b);
        const double fx = phi(x);
        if (std::abs(fx) < best_res) {
            best = x;
            best_res = std::abs(fx);
        }
        if (best_res <= br.tol) return best;
        if (fx > 0.0) {
            a = x;
            fa = fx;
            if (side == -1) fb *= 0.5;
            side = -1;
        } else {
            b = x;
            fb = fx;
            if (side == 1) fa *= 0.5;
            side = 1;
        }
        // force a bisection when the Illinois step barely shrinks the bracket
        if (b - a > 0.5 * width) {
            const double m = 0.5 * (a + b);
            const double fm = phi(m);
            if (std::abs(fm) < best_res) {
                best = m;
                best_res = std::abs(fm);
            }
            if (best_res <= br.tol) return best;
            if (fm > 0.0) {
                a = m;
                fa = fm;
            } else {
                b = m;
                fb = fm;
            }
            side = 0;
        }
        if (b - a <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(b)) break;
    }
    throw RootNotConvergedError("solve_front_coefficient: residual tolerance not reached" +
                                    detail::bracket_state(a, b, fa, fb),
                                a, b, best, best_res);
}

/// [1e-8, x_max] with x_max doubled from 1 until H(x_max) < x_max.
inline RootBracket default_dirichlet_bracket(const DirichletFrontMap& H, double tol = 1e-12) {
    double hi = 1.0;
    for (int i = 0; i < 60 && !(H(hi) < hi); ++i) hi *= 2.0;
    return {1e-8, hi, tol, 200};
}

/// [0, g0 (1+a)]: G(0) = g0 (1+a) bounds the fixed point.
inline RootBracket default_neumann_bracket(const NeumannFrontMap& G, double tol = 1e-12) {
    return {0.0, G.flux() * (1.0 + G.integrals().alpha()), tol, 200};
}

enum class SolutionKind { dirichlet, neumann, quasi_stationary };

inline const char* to_string(SolutionKind k) {
    switch (k) {
        case SolutionKind::dirichlet: return "dirichlet";
        case SolutionKind::neumann: return "neumann";
        case SolutionKind::quasi_stationary: return "quasi-stationary";
    }
    return "?";
}

/// u(x,t) = A + B F(z), z = x / (lambda t)^(1/(1+a)), front s(t) = c (lambda t)^(1/(1+a)).
/// A and B are in physical temperature units.
class SimilaritySolution {
public:
    SimilaritySolution(SolutionKind kind, KernelIntegrals ki, double A, double B, double front_coeff,
                       ThermalScales scales = {})
        : kind_(kind), ki_(std::move(ki)), A_(A), B_(B), front_(front_coeff), scales_(scales) {
        if (!(front_coeff > 0.0) || !std::isfinite(front_coeff))
            throw DomainError("SimilaritySolution: front coefficient must be positive");
        scales_.validate();
    }

    SolutionKind kind() const noexcept { return kind_; }
    double alpha() const noexcept { return ki_.alpha(); }
    double A() const noexcept { return A_; }
    double B() const noexcept { return B_; }
    double front_coeff() const noexcept { return front_; }
    const ThermalScales& scales() const noexcept { return scales_; }
    const KernelIntegrals& integrals() const noexcept { return ki_; }

    double similarity_variable(double x, double t) const {
        check_t(t);
        return x / std::pow(scales_.diffusivity() * t, 1.0 / (1.0 + alpha()));
    }

    /// Profile in the similarity variable: f_a(z), or z^a when quasi-stationary.
    double profile(double z) const {
        if (kind_ == SolutionKind::quasi_stationary) return std::pow(z, alpha());
        return ki_.f_alpha(z);
    }

    double temperature(double x, double t) const {
        if (!(x >= 0.0)) throw DomainError("temperature: x must be nonnegative");
        return A_ + B_ * profile(similarity_variable(x, t));
    }

    /// 0 <= x <= s(t)
    bool inside(double x, double t) const { return x >= 0.0 && x <= front_position(t); }

    double front_position(double t) const {
        check_t(t);
        return front_ * std::pow(scales_.diffusivity() * t, 1.0 / (1.0 + alpha()));
    }

    double front_velocity(double t) const {
        check_t(t);
        const double a = alpha();
        const double lam = scales_.diffusivity();
        return front_ / (1.0 + a) * std::pow(lam, 1.0 / (1.0 + a)) * std::pow(t, -a / (1.0 + a));
    }

    /// Caputo derivative in x from the closed form.
    double caputo(double x, double t) const {
        check_t(t);
        if (!(x >= 0.0)) throw DomainError("caputo: x must be nonnegative");
        const double a = alpha();
        const double L = std::pow(scales_.diffusivity() * t, 1.0 / (1.0 + a));
        if (kind_ == SolutionKind::quasi_stationary) return B_ * std::pow(L, -a) * std::exp(log_gamma(1.0 + a));
        // D^a of F(x/L) is L^-a (D^a F)(x/L)
        return std::pow(L, -a) * ki_.caputo_of_solution(B_, x / L, 1.0);
    }

    /// Caputo derivative in x by tanh-sinh quadrature of
    /// u_x(p) (x-p)^(-a) / Gamma(1-a); independent of the series.
    double caputo_quadrature(double x, double t, double tol = 1e-13) const {
        check_t(t);
        const double a = alpha();
        if (!(x > 0.0)) throw DomainError("caputo_quadrature: x must be positive");
        const double L = std::pow(scales_.diffusivity() * t, 1.0 / (1.0 + a));
        if (a == 1.0) return B_ * profile_derivative(x / L) / L;
        // p = x s; (x-p)^(-a) dp = x^(1-a) (1-s)^(-a) ds
        boost::math::quadrature::tanh_sinh<double> ts;
        const auto integrand = [&](double s, double sc) {
            const double one_minus = s > 0.5 ? sc : 1.0 - s;
            return profile_derivative(x * s / L) * std::pow(one_minus, -a);
        };
        const double I = ts.integrate(integrand, 0.0, 1.0, tol);
        return B_ / L * std::pow(x, 1.0 - a) * I / std::exp(log_gamma(1.0 - a));
    }

private:
    double profile_derivative(double z) const {
        if (!(z > 0.0)) return 0.0;
        if (kind_ == SolutionKind::quasi_stationary) return alpha() * std::pow(z, alpha() - 1.0);
        return ki_.kernel(z);
    }
    static void check_t(double t) {
        if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("time must be positive and finite");
    }

    SolutionKind kind_;
    KernelIntegrals ki_;
    double A_;
    double B_;
    double front_;
    ThermalScales scales_;
};

/// Dirichlet data: A = U0, B = -(U0 - Um)/f_a(xi), s = xi (lambda t)^(1/(1+a)).
inline SimilaritySolution build_dirichlet(const DirichletProblem& p, const RootBracket& br, Truncation tr = {}) {
    p.validate();
    const DirichletFrontMap H(p, tr);
    const double xi = solve_front_coefficient(std::cref(H), br);
    const double B = -(p.U0 - p.Um) / H.integrals().f_alpha(xi);
    return {SolutionKind::dirichlet, H.integrals(), p.U0, B, xi, p.scales};
}

inline SimilaritySolution build_dirichlet(const DirichletProblem& p, Truncation tr = {}) {
    p.validate();
    const DirichletFrontMap H(p, tr);
    const double xi = solve_front_coefficient(std::cref(H), default_dirichlet_bracket(H));
    const double B = -(p.U0 - p.Um) / H.integrals().f_alpha(xi);
    return {SolutionKind::dirichlet, H.integrals(), p.U0, B, xi, p.scales};
}

namespace detail {

inline SimilaritySolution neumann_from_root(const NeumannProblem& p, const NeumannFrontMap& G, double eta) {
    const double a = p.alpha.alpha;
    const double unit = p.scales.temperature_unit();
    const double B = -unit * G.flux() / std::exp(log_gamma(a));
    const double A = p.gm - B * G.integrals().f_alpha(eta);
    return {SolutionKind::neumann, G.integrals(), A, B, eta, p.scales};
}

}  // namespace detail

/// Neumann data: B = -g0/Gamma(a), A = gm + (g0/Gamma(a)) f_a(eta) (unit scales).
inline SimilaritySolution build_neumann(const NeumannProblem& p, const RootBracket& br, Truncation tr = {}) {
    p.validate();
    const NeumannFrontMap G(p, tr);
    return detail::neumann_from_root(p, G, solve_front_coefficient(std::cref(G), br));
}

inline SimilaritySolution build_neumann(const NeumannProblem& p, Truncation tr = {}) {
    p.validate();
    const NeumannFrontMap G(p, tr);
    return detail::neumann_from_root(p, G, solve_front_coefficient(std::cref(G), default_neumann_bracket(G)));
}

/// u = 1 - x^a / (Gamma(2+a)^(a/(1+a)) t^(a/(1+a))), s(t) = Gamma(2+a)^(1/(1+a)) t^(1/(1+a)).
inline SimilaritySolution quasi_stationary(KernelOrder a, Truncation tr = {}) {
    const double b = a.b();
    const double lg = log_gamma(2.0 + a.alpha);
    return {SolutionKind::quasi_stationary, KernelIntegrals(a, tr), 1.0, -std::exp(-a.alpha / b * lg), std::exp(lg / b)};
}

/// Free-standing form of SimilaritySolution::temperature.
inline double evaluate_profile(const SimilaritySolution& s, double x, double t) { return s.temperature(x, t); }

/// Free-standing form of SimilaritySolution::front_position.
inline double front_position(const SimilaritySolution& s, double t) { return s.front_position(t); }

}  // namespace fracstefan
