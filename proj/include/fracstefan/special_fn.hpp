#pragma once

/// Log-gamma, the three-parameter Mittag-Leffler function E_{a,m,l} and the
/// similarity kernel sigma_a(w) = w^(a-1) E_{a,1+1/a,1}(-w^(1+a)/(1+a)).

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "fracstefan/errors.hpp"

namespace fracstefan {

namespace detail {

inline constexpr double half_log_2pi = 0.91893853320467274178032973640562;

// zeta(k) - 1 for k = 2..30
inline constexpr std::array<double, 29> zeta_minus_one = {
    0.64493406684822643647,   0.2020569031595942854,    0.082323233711138191516,
    0.036927755143369926331,  0.017343061984449139715,  0.0083492773819228268398,
    0.0040773561979443393787, 0.0020083928260822144179, 0.00099457512781808533715,
    0.0004941886041194645587, 0.00024608655330804829864, 0.00012271334757848914675,
    6.1248135058704829259e-5, 3.0588236307020493552e-5, 1.5282259408651871733e-5,
    7.6371976378997622736e-6, 3.8172932649998398565e-6, 1.9082127165539389257e-6,
    9.5396203387279611315e-7, 4.7693298678780646312e-7, 2.3845050272773299e-7,
    1.1921992596531107307e-7, 5.9608189051259479612e-8, 2.9803503514652280186e-8,
    1.4901554828365041235e-8, 7.450711789835429492e-9,  3.7253340247884570548e-9,
    1.8626597235130490064e-9, 9.3132743241966818287e-10};

// lgamma(1+e) + log1p(e) for |e| <= 1/2.
inline double lgamma1p_rest(double e) {
    double acc = 0.0;
    for (int k = 30; k >= 2; --k) {
        const double a = zeta_minus_one[static_cast<std::size_t>(k - 2)] / k;
        acc = acc * e + ((k % 2 == 0) ? a : -a);
    }
    return e * ((1.0 - std::numbers::egamma) + e * acc);
}

// sum_k B_2k / (2k (2k-1) x^(2k-1)), |x| >= 10
template <class T>
T stirling_tail(T x) {
    const T r = T(1) / (x * x);
    const T p = 1.0 / 12 +
                r * (-1.0 / 360 +
                     r * (1.0 / 1260 +
                          r * (-1.0 / 1680 +
                               r * (1.0 / 1188 +
                                    r * (-691.0 / 360360 + r * (1.0 / 156 + r * (-3617.0 / 122400)))))));
    return p / x;
}

inline double sin_pi(double x) {
    const double n = std::round(x);
    const double s = std::sin(std::numbers::pi * (x - n));
    return std::fmod(n, 2.0) == 0.0 ? s : -s;
}

inline double cos_pi(double x) {
    const double n = std::round(x);
    const double c = std::cos(std::numbers::pi * (x - n));
    return std::fmod(n, 2.0) == 0.0 ? c : -c;
}

// log(sin(pi z)), any branch; stable for large |Im z|.
inline std::complex<double> log_sin_pi(std::complex<double> z) {
    const double x = z.real();
    const double y = z.imag();
    if (y < 0.0) return std::conj(log_sin_pi(std::conj(z)));
    if (y < 2.0) {
        const double py = std::numbers::pi * y;
        return std::log(std::complex<double>(sin_pi(x) * std::cosh(py), cos_pi(x) * std::sinh(py)));
    }
    // sin(pi z) = (i/2) e^{-i pi z} (1 - e^{2 i pi z})
    const double xr = x - 2.0 * std::round(x / 2.0);
    const std::complex<double> small = std::polar(std::exp(-2.0 * std::numbers::pi * y), 2.0 * std::numbers::pi * xr);
    return std::complex<double>(std::numbers::pi * y - std::numbers::ln2,
                                std::numbers::pi / 2 - std::numbers::pi * xr) +
           std::log(1.0 - small);
}

}  // namespace detail

/// ln Gamma(x) for x > 0. Not std::lgamma, which writes the global signgam.
inline double log_gamma(double x) {
    if (!(x > 0.0)) throw DomainError("log_gamma: argument must be positive, got " + std::to_string(x));
    if (std::isinf(x)) return x;
    if (x < 0.5) return detail::lgamma1p_rest(x) - std::log1p(x) - std::log(x);
    if (x < 10.0) {
        const double n = std::round(x);
        const double e = x - n;
        if (n == 1.0) return detail::lgamma1p_rest(e) - std::log1p(e);
        double prod = 1.0;
        for (double j = 2.0; j < n; j += 1.0) prod *= j + e;
        return detail::lgamma1p_rest(e) + std::log(prod);
    }
    return (x - 0.5) * std::log(x) - x + detail::half_log_2pi + detail::stirling_tail(x);
}

/// ln Gamma(a+d) - ln Gamma(a) without the cancellation of two large logs.
inline double log_gamma_diff(double a, double d) {
    const double y = a + d;
    if (a >= 10.0 && y >= 10.0) {
        return (a - 0.5) * std::log1p(d / a) + d * std::log(y) - d + detail::stirling_tail(y) -
               detail::stirling_tail(a);
    }
    return log_gamma(y) - log_gamma(a);
}

struct SignedLog {
    double log_abs;
    int sign;
};

/// ln|Gamma(x)| and sign of Gamma(x) for any real x that is not a pole.
inline SignedLog log_abs_gamma(double x) {
    if (x > 0.0) return {log_gamma(x), 1};
    if (x == std::floor(x)) throw DomainError("log_abs_gamma: pole at " + std::to_string(x));
    const double s = detail::sin_pi(x);
    return {std::log(std::numbers::pi) - std::log(std::abs(s)) - log_gamma(1.0 - x), s > 0.0 ? 1 : -1};
}

/// ln Gamma(z) for complex z off the poles. The imaginary part is not
/// guaranteed to lie on the principal branch; exp() of the result is exact.
inline std::complex<double> log_gamma(std::complex<double> z) {
    if (z.real() < 0.5) {
        if (z.imag() == 0.0 && z.real() == std::floor(z.real()))
            throw DomainError("log_gamma: pole at " + std::to_string(z.real()));
        return std::log(std::numbers::pi) - detail::log_sin_pi(z) - log_gamma(1.0 - z);
    }
    std::complex<double> prod(1.0, 0.0);
    while (std::abs(z) < 10.0) {
        prod *= z;
        z += 1.0;
    }
    return (z - 0.5) * std::log(z) - z + detail::half_log_2pi + detail::stirling_tail(z) - std::log(prod);
}

/// Neumaier's variant of Kahan summation; also accumulates sum |x_i| so the
/// caller can judge cancellation.
class CompensatedSum {
public:
    void add(double v) noexcept {
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v))
            comp_ += (sum_ - t) + v;
        else
            comp_ += (v - t) + sum_;
        sum_ = t;
        abs_ += std::abs(v);
    }
    double value() const noexcept { return sum_ + comp_; }
    double abs_sum() const noexcept { return abs_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
    double abs_ = 0.0;
};

/// Series truncation policy shared by every evaluation.
struct Truncation {
    double rel_tol = 1e-17;
    double abs_tol = 0.0;
    int max_terms = 10000;
    /// Largest sum|t_n| / |sum t_n| accepted from a power series. Beyond it the
    /// kernel family is evaluated on the contour instead.
    double max_cancellation = 1e3;

    void validate() const {
        if (!(rel_tol > 0.0 && rel_tol < 1.0)) throw DomainError("Truncation: rel_tol must lie in (0,1)");
        if (!(abs_tol >= 0.0) || !std::isfinite(abs_tol)) throw DomainError("Truncation: abs_tol must be >= 0");
        if (max_terms < 8) throw DomainError("Truncation: max_terms must be >= 8");
        if (!(max_cancellation >= 1.0)) throw DomainError("Truncation: max_cancellation must be >= 1");
    }
};

/// Parameters (alpha, m, l) of E_{alpha,m,l}.
struct MLParams {
    double alpha;
    double m;
    double l;

    void validate() const {
        if (!std::isfinite(alpha) || !std::isfinite(m) || !std::isfinite(l))
            throw DomainError("MLParams: parameters must be finite");
        if (!(alpha > 0.0)) throw DomainError("MLParams: alpha must be positive");
        if (!(m > 0.0)) throw DomainError("MLParams: m must be positive");
        // Only finitely many j give a nonpositive Gamma argument.
        for (int j = 0;; ++j) {
            const double arg = alpha * (j * m + l) + 1.0;
            if (arg > 0.0) break;
            if (std::abs(arg - std::round(arg)) <= 64 * std::numeric_limits<double>::epsilon() * std::abs(arg))
                throw DomainError("MLParams: alpha(jm+l) hits a negative integer at j=" + std::to_string(j));
        }
    }

    /// True for (alpha, 1 + 1/alpha, 1) with 0 < alpha <= 1.
    bool is_kernel_family() const noexcept {
        return alpha > 0.0 && alpha <= 1.0 && l == 1.0 && std::abs(m - (1.0 + 1.0 / alpha)) <= 1e-14 * m;
    }
};

/// Fractional order of the kernel, 0 < alpha <= 1.
struct KernelOrder {
    double alpha;

    explicit KernelOrder(double a) : alpha(a) {
        if (!(a > 0.0 && a <= 1.0)) throw DomainError("KernelOrder: alpha must lie in (0,1], got " + std::to_string(a));
    }
    double b() const noexcept { return 1.0 + alpha; }
    MLParams ml_params() const noexcept { return {alpha, 1.0 + 1.0 / alpha, 1.0}; }
};

enum class Route { series, contour };

inline const char* to_string(Route r) { return r == Route::series ? "series" : "contour"; }

struct MLResult {
    double value;
    int terms;       ///< series terms summed, or contour nodes used
    double abs_sum;  ///< sum of |term|; NaN for the contour route
    Route route;
};

namespace detail {

inline constexpr double overflow_guard = 1e300;

struct SeriesOutcome {
    double value;
    double abs_sum;
    double last_term;
    int terms;
    bool converged;
    bool overflow;
};

// Sums sum_{n >= first} c_n z^n w(n) with c_{n+1} = c_n * ratio(n). Stops
// after two consecutive weighted terms fall under rel_tol |partial| + abs_tol.
template <class Ratio, class Weight>
SeriesOutcome sum_series(double z, Ratio&& ratio, Weight&& weight, const Truncation& tr, int first = 0) {
    CompensatedSum acc;
    double term = 1.0;
    double last = 0.0;
    int quiet = 0;
    for (int n = 0; n < tr.max_terms; ++n) {
        if (!(std::abs(term) <= overflow_guard)) return {acc.value(), acc.abs_sum(), last, n, false, true};
        if (n < first) {
            term *= z * ratio(n);
            continue;
        }
        last = term * weight(n);
        acc.add(last);
        if (std::abs(last) <= tr.rel_tol * std::abs(acc.value()) + tr.abs_tol) {
            if (++quiet == 2) return {acc.value(), acc.abs_sum(), last, n + 1, true, false};
        } else {
            quiet = 0;
        }
        term *= z * ratio(n);
    }
    return {acc.value(), acc.abs_sum(), last, tr.max_terms, false, false};
}

// c_{n+1}/c_n = Gamma(alpha(nm+l)+1) / Gamma(alpha(nm+l+1)+1)
inline double ml_ratio(const MLParams& p, int n) {
    const double a = p.alpha * (n * p.m + p.l);
    const double num = a + 1.0;
    const double den = a + p.alpha + 1.0;
    if (num > 0.0 && den > 0.0) return std::exp(-log_gamma_diff(num, p.alpha));
    if (den <= 0.0 && den == std::floor(den)) return 0.0;
    const SignedLog gn = log_abs_gamma(num);
    const SignedLog gd = log_abs_gamma(den);
    return gn.sign * gd.sign * std::exp(gn.log_abs - gd.log_abs);
}

inline bool ill_conditioned(const SeriesOutcome& s, const Truncation& tr) {
    return s.abs_sum > tr.max_cancellation * std::abs(s.value);
}

}  // namespace detail

/// c_n of E_{alpha,m,l}, accumulated in log space.
inline double ml_coefficient(const MLParams& p, int n) {
    p.validate();
    if (n < 0) throw DomainError("ml_coefficient: n must be >= 0");
    double log_c = 0.0;
    int sign = 1;
    for (int j = 0; j < n; ++j) {
        const double a = p.alpha * (j * p.m + p.l);
        const double num = a + 1.0;
        const double den = a + p.alpha + 1.0;
        if (num > 0.0 && den > 0.0) {
            log_c -= log_gamma_diff(num, p.alpha);
            continue;
        }
        if (den <= 0.0 && den == std::floor(den)) return 0.0;
        const SignedLog gn = log_abs_gamma(num);
        const SignedLog gd = log_abs_gamma(den);
        log_c += gn.log_abs - gd.log_abs;
        sign *= gn.sign * gd.sign;
    }
    return sign * std::exp(log_c);
}

/// Mellin-Barnes representation of the kernel family, used where the power
/// series cancels catastrophically (large negative argument).
///
/// With b = 1+a, q = a/b and Phi(s) = pi/sin(pi s) Gamma(1-s+q)/Gamma(b-bs),
///   E_{a,1+1/a,1}(-X/b) = K/(2 pi i) int Phi(s) X^{-s} ds,  K = Gamma(b)/Gamma(1+q),
/// on the line Re s = 1 + q/2. The integrand decays like exp(-pi (2-a) |t| / 2),
/// so a trapezoid rule with nodes tabulated once per order converges
/// geometrically and uniformly in X.
class KernelContour {
public:
    explicit KernelContour(double alpha) : alpha_(KernelOrder(alpha).alpha) {
        b_ = 1.0 + alpha_;
        q_ = alpha_ / b_;
        K_ = std::exp(log_gamma(b_) - log_gamma(1.0 + q_));
        c_ = 1.0 + q_ / 2.0;
        // Nearest singularity is the pole of Gamma(1-s+q) at distance q/2.
        h_ = 2.0 * std::numbers::pi * (q_ / 2.0) / 50.0;
        const std::complex<double> log_pi(std::log(std::numbers::pi), 0.0);
        double peak = 0.0;
        for (int k = 0; k < 1000000; ++k) {
            const std::complex<double> s(c_, k * h_);
            const std::complex<double> lphi =
                log_pi - detail::log_sin_pi(s) + log_gamma(1.0 - s + q_) - log_gamma(b_ - b_ * s);
            const std::complex<double> phi = std::exp(lphi);
            phi_.push_back(phi);
            peak = std::max(peak, std::abs(phi));
            if (k > 16 && std::abs(phi) < 1e-20 * peak) break;
        }
        f_inf_ = K_ * std::numbers::pi / (b_ * detail::sin_pi(q_));
        m_inf_ = K_ * std::exp(log_gamma(q_));
    }

    double alpha() const noexcept { return alpha_; }
    std::size_t nodes() const noexcept { return phi_.size(); }

    /// E_{a,1+1/a,1}(z) for z < 0.
    double ml_value(double z) const {
        const double L = std::log(-b_ * z);
        const double sum = line_sum(L, [](std::complex<double>) { return std::complex<double>(1.0, 0.0); });
        return K_ * std::exp(-c_ * L) * sum;
    }

    /// sigma_a(w) for w > 0.
    double kernel(double w) const {
        const double L = std::log(w);
        const double sum = line_sum(b_ * L, [](std::complex<double>) { return std::complex<double>(1.0, 0.0); });
        return K_ * std::exp((b_ - 2.0 - b_ * c_) * L) * sum;
    }

    /// int_0^x sigma_a(w) dw for x > 0.
    double cumulative(double x) const {
        const double L = std::log(x);
        const double a = alpha_, b = b_;
        const double sum = line_sum(b * L, [a, b](std::complex<double> s) { return 1.0 / (a - b * s); });
        return f_inf_ + K_ * std::exp((alpha_ - b_ * c_) * L) * sum;
    }

    /// int_0^x w sigma_a(w) dw for x > 0.
    double moment(double x) const {
        const double L = std::log(x);
        const double b = b_;
        const double sum = line_sum(b * L, [b](std::complex<double> s) { return 1.0 / (b - b * s); });
        return m_inf_ + K_ * std::exp((b_ - b_ * c_) * L) * sum;
    }

    /// Limits of cumulative() and moment() as x -> infinity.
    double cumulative_limit() const noexcept { return f_inf_; }
    double moment_limit() const noexcept { return m_inf_; }

private:
    // (1/pi) int_0^inf Re[Phi(c+it) e^{-i lam t} g(c+it)] dt by the trapezoid rule
    template <class G>
    double line_sum(double lam, G&& g) const {
        CompensatedSum acc;
        for (std::size_t k = 0; k < phi_.size(); ++k) {
            const double t = static_cast<double>(k) * h_;
            const std::complex<double> s(c_, t);
            const double v = (phi_[k] * std::polar(1.0, -lam * t) * g(s)).real();
            acc.add(k == 0 ? 0.5 * v : v);
        }
        return acc.value() * h_ / std::numbers::pi;
    }

    double alpha_;
    double b_ = 0.0;
    double q_ = 0.0;
    double K_ = 0.0;
    double c_ = 0.0;
    double h_ = 0.0;
    double f_inf_ = 0.0;
    double m_inf_ = 0.0;
    std::vector<std::complex<double>> phi_;
};

/// E_{alpha,m,l}(z) by its power series. For the kernel family and z < 0 an
/// ill-conditioned or overflowing series is replaced by the contour integral.
inline MLResult ml_eval(const MLParams& p, double z, const Truncation& tr = {}) {
    p.validate();
    tr.validate();
    if (!std::isfinite(z)) throw DomainError("ml_eval: z must be finite");
    const detail::SeriesOutcome s = detail::sum_series(
        z, [&p](int n) { return detail::ml_ratio(p, n); }, [](int) { return 1.0; }, tr);
    const bool contour_ok = p.is_kernel_family() && z < 0.0;
    if (contour_ok && (s.overflow || !s.converged || detail::ill_conditioned(s, tr))) {
        const KernelContour c(p.alpha);
        return {c.ml_value(z), static_cast<int>(c.nodes()), std::numeric_limits<double>::quiet_NaN(), Route::contour};
    }
    if (s.overflow) throw DomainError("ml_eval: series term exceeds the overflow guard 1e300");
    if (!s.converged)
        throw ConvergenceError("ml_eval: no convergence within max_terms", s.value, s.last_term, s.terms);
    return {s.value, s.terms, s.abs_sum, Route::series};
}

/// sigma_a(w) = w^(a-1) E_{a,1+1/a,1}(-w^(1+a)/(1+a)), w > 0.
inline double sigma_alpha(KernelOrder a, double w, const Truncation& tr = {}) {
    if (!(w > 0.0) || !std::isfinite(w)) throw DomainError("sigma_alpha: w must be positive and finite");
    const double b = a.b();
    const MLResult e = ml_eval(a.ml_params(), -std::pow(w, b) / b, tr);
    return std::pow(w, a.alpha - 1.0) * e.value;
}

}  // namespace fracstefan
