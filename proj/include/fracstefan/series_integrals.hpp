#pragma once

/// The cumulative kernel integral f_a(x) = int_0^x sigma_a, its first moment
/// and the Caputo derivative of the similarity profile A + B f_a(x/t^(1/(1+a))).

#include <cmath>
#include <memory>
#include <numbers>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "fracstefan/errors.hpp"
#include "fracstefan/special_fn.hpp"

namespace fracstefan {

class KernelIntegrals {
public:
    explicit KernelIntegrals(KernelOrder a, Truncation tr = {})
        : order_(a), tr_(tr), contour_(std::make_shared<const KernelContour>(a.alpha)) {
        tr_.validate();
    }

    double alpha() const noexcept { return order_.alpha; }
    KernelOrder order() const noexcept { return order_; }
    const Truncation& truncation() const noexcept { return tr_; }
    const KernelContour& contour() const noexcept { return *contour_; }

    /// Power series of sigma_a, f_a and the moment alone. No fallback: the
    /// result carries sum|t_n| so callers can see the cancellation.
    MLResult kernel_series(double w) const {
        require_positive(w, "kernel_series");
        const detail::SeriesOutcome s = series(w, [](int) { return 1.0; });
        return finish(s, std::pow(w, alpha() - 1.0), "kernel_series");
    }
    MLResult f_series(double x) const {
        require_nonnegative(x, "f_series");
        if (x == 0.0) return {0.0, 0, 0.0, Route::series};
        const double b = order_.b();
        const detail::SeriesOutcome s = series(x, [b](int n) { return 1.0 / ((n + 1) * b - 1.0); });
        return finish(s, std::pow(x, alpha()), "f_series");
    }
    MLResult moment_series(double x) const {
        require_nonnegative(x, "moment_series");
        if (x == 0.0) return {0.0, 0, 0.0, Route::series};
        const double b = order_.b();
        const detail::SeriesOutcome s = series(x, [](int n) { return 1.0 / (n + 1); });
        return finish(s, std::pow(x, b) / b, "moment_series");
    }

    /// sigma_a(w), w > 0.
    double kernel(double w) const {
        require_positive(w, "kernel");
        const detail::SeriesOutcome s = series(w, [](int) { return 1.0; });
        if (usable(s)) return std::pow(w, alpha() - 1.0) * s.value;
        return contour_->kernel(w);
    }

    /// f_a(x) = int_0^x sigma_a(w) dw.
    double f_alpha(double x) const {
        require_nonnegative(x, "f_alpha");
        if (x == 0.0) return 0.0;
        if (std::isinf(x)) return contour_->cumulative_limit();
        const double b = order_.b();
        const detail::SeriesOutcome s = series(x, [b](int n) { return 1.0 / ((n + 1) * b - 1.0); });
        if (usable(s)) return std::pow(x, alpha()) * s.value;
        return contour_->cumulative(x);
    }

    /// int_0^x w sigma_a(w) dw.
    double moment_alpha(double x) const {
        require_nonnegative(x, "moment_alpha");
        if (x == 0.0) return 0.0;
        if (std::isinf(x)) return moment_limit();
        const double b = order_.b();
        const detail::SeriesOutcome s = series(x, [](int n) { return 1.0 / (n + 1); });
        if (usable(s)) return std::pow(x, b) / b * s.value;
        return contour_->moment(x);
    }

    /// f_a(inf) = Gamma(a) Gamma(1/(1+a)).
    double f_limit() const noexcept { return contour_->cumulative_limit(); }
    /// moment(inf) = (1+a) Gamma(a).
    double moment_limit() const { return order_.b() * std::exp(log_gamma(alpha())); }

    /// Caputo derivative in x of u = A + B f_a(x / t^(1/(1+a))):
    ///   B t^(-a/(1+a)) (Gamma(a) - moment(z)/(1+a)).
    double caputo_of_solution(double B, double x, double t) const {
        if (!(t > 0.0)) throw DomainError("caputo_of_solution: t must be positive");
        require_nonnegative(x, "caputo_of_solution");
        if (B == 0.0) return 0.0;
        const double b = order_.b();
        const double z = x / std::pow(t, 1.0 / b);
        const double g = std::exp(log_gamma(alpha()));
        return B * std::pow(t, -alpha() / b) * (g - moment_alpha(z) / b);
    }

    /// Adaptive quadrature of sigma_a over [0, x]; the w^(a-1) leading term is
    /// integrated in closed form on [0, x/2]. Test oracle for f_alpha.
    double f_quadrature(double x, double tol = 1e-12) const {
        require_nonnegative(x, "f_quadrature");
        if (x == 0.0) return 0.0;
        const double a = alpha();
        const double mid = 0.5 * x;
        boost::math::quadrature::tanh_sinh<double> ts;
        const double head = std::pow(mid, a) / a + ts.integrate([this](double w) { return regular_part(w); }, 0.0, mid, tol);
        const double tail = ts.integrate([this](double w) { return kernel(w); }, mid, x, tol);
        return head + tail;
    }

    /// Same construction for int_0^x w sigma_a(w) dw.
    double moment_quadrature(double x, double tol = 1e-12) const {
        require_nonnegative(x, "moment_quadrature");
        if (x == 0.0) return 0.0;
        const double b = order_.b();
        const double mid = 0.5 * x;
        boost::math::quadrature::tanh_sinh<double> ts;
        const double head = std::pow(mid, b) / b + ts.integrate([this](double w) { return w * regular_part(w); }, 0.0, mid, tol);
        const double tail = ts.integrate([this](double w) { return w * kernel(w); }, mid, x, tol);
        return head + tail;
    }

private:
    // sigma_a(w) - w^(a-1), summed from n = 1 where the series is usable.
    double regular_part(double w) const {
        if (w <= 0.0) return 0.0;
        const detail::SeriesOutcome s = series(w, [](int) { return 1.0; });
        const double lead = std::pow(w, alpha() - 1.0);
        if (usable(s)) return lead * (s.value - 1.0);
        return contour_->kernel(w) - lead;
    }

    template <class Weight>
    detail::SeriesOutcome series(double x, Weight&& weight) const {
        const MLParams p = order_.ml_params();
        const double b = order_.b();
        const double z = -std::pow(x, b) / b;
        return detail::sum_series(z, [&p](int n) { return detail::ml_ratio(p, n); }, weight, tr_);
    }

    bool usable(const detail::SeriesOutcome& s) const {
        return s.converged && !s.overflow && !detail::ill_conditioned(s, tr_);
    }

    static MLResult finish(const detail::SeriesOutcome& s, double scale, const char* who) {
        if (s.overflow) throw DomainError(std::string(who) + ": series term exceeds the overflow guard 1e300");
        if (!s.converged)
            throw ConvergenceError(std::string(who) + ": no convergence within max_terms", s.value, s.last_term, s.terms);
        return {scale * s.value, s.terms, std::abs(scale) * s.abs_sum, Route::series};
    }

    static void require_positive(double w, const char* who) {
        if (!(w > 0.0) || std::isnan(w)) throw DomainError(std::string(who) + ": argument must be positive");
    }
    static void require_nonnegative(double x, const char* who) {
        if (!(x >= 0.0)) throw DomainError(std::string(who) + ": argument must be nonnegative");
    }

    KernelOrder order_;
    Truncation tr_;
    std::shared_ptr<const KernelContour> contour_;
};

/// sqrt(pi) erf(x/2), the alpha = 1 limit of f_a.
inline double classical_erf_profile(double x) {
    if (!(x >= 0.0)) throw DomainError("classical_erf_profile: x must be nonnegative");
    return std::sqrt(std::numbers::pi) * std::erf(0.5 * x);
}

}  // namespace fracstefan
