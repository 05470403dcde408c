#include "udw/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "udw/errors.hpp"

namespace udw::numerics {

double erf(double x) { return std::erf(x); }

namespace {

double dawson_series(double x) {
    // D(x) = sum_n (-1)^n 2^n x^(2n+1) / (2n+1)!!
    const double x2 = x * x;
    double term = x;
    double sum = x;
    for (int n = 1; n < 60; ++n) {
        term *= -2.0 * x2 / (2.0 * n + 1.0);
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
}

double dawson_asymptotic(double x) {
    const double inv2 = 1.0 / (x * x);
    // 1/(2x) * sum (2n-1)!! / (2x^2)^n
    double term = 1.0;
    double sum = 1.0;
    for (int n = 1; n < 8; ++n) {
        term *= (2.0 * n - 1.0) * 0.5 * inv2;
        sum += term;
    }
    return sum / (2.0 * x);
}

// Rybicki's sampling representation D(x) ~ (1/sqrt(pi)) sum_{n odd} exp(-(x - n h)^2) / n,
// with h small enough that the aliasing error exp(-(pi/2h)^2) is far below double epsilon.
double dawson_rybicki(double x) {
    constexpr double h = 0.2;
    constexpr int terms = 18;
    static const std::array<double, terms> c = [] {
        std::array<double, terms> out{};
        for (int i = 0; i < terms; ++i) {
            const double v = (2.0 * i + 1.0) * h;
            out[static_cast<std::size_t>(i)] = std::exp(-v * v);
        }
        return out;
    }();

    const double n0 = 2.0 * std::round(0.5 * x / h);
    const double xp = x - n0 * h;
    double e1 = std::exp(2.0 * xp * h);
    const double e2 = e1 * e1;
    double d1 = n0 + 1.0;
    double d2 = d1 - 2.0;
    double sum = 0.0;
    for (int i = 0; i < terms; ++i) {
        sum += c[static_cast<std::size_t>(i)] * (e1 / d1 + 1.0 / (d2 * e1));
        d1 += 2.0;
        d2 -= 2.0;
        e1 *= e2;
    }
    return std::exp(-xp * xp) * sum / sqrt_pi;
}

}  // namespace

double dawson(double x) {
    const double ax = std::abs(x);
    double v;
    if (ax < 0.5) {
        v = dawson_series(ax);
    } else if (ax < 50.0) {
        v = dawson_rybicki(ax);
    } else {
        v = dawson_asymptotic(ax);
    }
    return std::copysign(v, x);
}

double erfi(double x) {
    if (!std::isfinite(x) || std::abs(x) > erfi_max_argument) {
        throw RangeError("erfi: |x| = " + std::to_string(std::abs(x)) + " exceeds " +
                         std::to_string(erfi_max_argument));
    }
    return 2.0 / sqrt_pi * std::exp(x * x) * dawson(x);
}

double erfi_scaled(double x) {
    if (!(x >= 0.0)) {
        throw DomainError("erfi_scaled: negative argument " + std::to_string(x));
    }
    return 2.0 / sqrt_pi * dawson(x);
}

namespace {

struct KronrodRule {
    // Non-negative Kronrod abscissae (first is 0) and weights, plus the Gauss
    // weight attached to each abscissa (0 where the node is Kronrod-only).
    std::array<double, 11> x{};
    std::array<double, 11> wk{};
    std::array<double, 11> wg{};
};

const KronrodRule& kronrod21() {
    static const KronrodRule rule = [] {
        using kronrod = boost::math::quadrature::gauss_kronrod<double, 21>;
        using gauss = boost::math::quadrature::gauss<double, 10>;
        KronrodRule r;
        const auto& kx = kronrod::abscissa();
        const auto& kw = kronrod::weights();
        const auto& gx = gauss::abscissa();
        const auto& gw = gauss::weights();
        for (std::size_t i = 0; i < r.x.size(); ++i) {
            r.x[i] = kx[i];
            r.wk[i] = kw[i];
            for (std::size_t g = 0; g < gx.size(); ++g) {
                if (std::abs(gx[g] - kx[i]) < 1e-14) r.wg[i] = gw[g];
            }
        }
        return r;
    }();
    return rule;
}

template <typename T>
struct Segment {
    double a;
    double b;
    T value;
    double error;
};

template <typename T>
Segment<T> apply_rule(const std::function<T(double)>& f, double a, double b, double& max_abs) {
    const KronrodRule& rule = kronrod21();
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    T fc = f(center);
    max_abs = std::max(max_abs, std::abs(fc));
    T kron = rule.wk[0] * fc;
    T gauss = rule.wg[0] * fc;
    for (std::size_t i = 1; i < rule.x.size(); ++i) {
        const double dx = half * rule.x[i];
        const T f1 = f(center - dx);
        const T f2 = f(center + dx);
        max_abs = std::max({max_abs, std::abs(f1), std::abs(f2)});
        kron += rule.wk[i] * (f1 + f2);
        gauss += rule.wg[i] * (f1 + f2);
    }
    kron *= half;
    gauss *= half;
    return {a, b, kron, std::abs(kron - gauss)};
}

constexpr std::size_t evals_per_rule = 21;

// Globally adaptive bisection on [a, b] until the summed error falls below tol.
template <typename T>
QuadratureResult<T> adaptive(const std::function<T(double)>& f, double a, double b, double tol,
                             std::size_t budget, double& max_abs, bool& converged) {
    std::vector<Segment<T>> segments;
    segments.push_back(apply_rule(f, a, b, max_abs));
    std::size_t evaluations = evals_per_rule;
    const double eps = std::numeric_limits<double>::epsilon();

    auto totals = [&] {
        T value{};
        double error = 0.0;
        for (const auto& s : segments) {
            value += s.value;
            error += s.error;
        }
        return std::pair{value, error};
    };

    converged = false;
    while (true) {
        auto [value, error] = totals();
        // Floor at what the arithmetic itself can resolve.
        const double floor = 50.0 * eps * std::abs(value);
        if (error <= std::max(tol, floor)) {
            converged = true;
            return {value, error, evaluations};
        }
        if (evaluations + 2 * evals_per_rule > budget) {
            return {value, error, evaluations};
        }
        auto worst = std::max_element(segments.begin(), segments.end(),
                                      [](const auto& l, const auto& r) { return l.error < r.error; });
        const double mid = 0.5 * (worst->a + worst->b);
        if (!(mid > worst->a && mid < worst->b)) {
            return {value, error, evaluations};
        }
        Segment<T> left = apply_rule(f, worst->a, mid, max_abs);
        Segment<T> right = apply_rule(f, mid, worst->b, max_abs);
        evaluations += 2 * evals_per_rule;
        *worst = left;
        segments.push_back(right);
    }
}

template <typename T>
QuadratureResult<T> semi_infinite_impl(const std::function<T(double)>& f, double tol,
                                       const SemiInfiniteOptions& options) {
    if (!(tol > 0.0)) throw DomainError("integrate_semi_infinite: tol must be positive");
    if (!(options.scale > 0.0)) throw DomainError("integrate_semi_infinite: scale must be positive");

    QuadratureResult<T> total{};
    double a = 0.0;
    double width = options.scale;
    int quiet_panels = 0;
    const double panel_tol = tol / 8.0;
    const double rate = options.gaussian_rate;

    for (int panel = 0; panel < 200; ++panel) {
        const double b = a + width;
        double max_abs = 0.0;
        bool converged = false;
        const std::size_t remaining =
            options.max_evaluations > total.evaluations ? options.max_evaluations - total.evaluations : 0;
        auto part = adaptive(f, a, b, panel_tol / (1 << std::min(panel, 20)), remaining, max_abs, converged);
        total.value += part.value;
        total.error_estimate += part.error_estimate;
        total.evaluations += part.evaluations;
        if (!converged) {
            throw ConvergenceError("integrate_semi_infinite: evaluation budget exhausted",
                                   std::abs(total.value), total.error_estimate);
        }

        if (rate > 0.0) {
            // Envelope C with |f(k)| <= C exp(-rate k^2) estimated from the panel's right end,
            // then the tail bound C * int_b^inf exp(-rate k^2) dk.
            const double edge = std::abs(f(b));
            total.evaluations += 1;
            const double log_c = std::log(std::max(max_abs, edge) + 1e-300) + rate * a * a;
            const double tail_integral =
                0.5 * sqrt_pi / std::sqrt(rate) * std::erfc(b * std::sqrt(rate));
            const double tail = std::exp(log_c) * tail_integral;
            if (std::isfinite(tail) && tail < tol / 4.0 && b * b * rate > 4.0) {
                total.error_estimate += tail;
                return total;
            }
        } else {
            const bool small = std::abs(part.value) + part.error_estimate < tol / 64.0 &&
                               max_abs * width < tol / 16.0;
            quiet_panels = small ? quiet_panels + 1 : 0;
            if (quiet_panels >= 2) return total;
        }
        a = b;
        width *= 2.0;
    }
    throw ConvergenceError("integrate_semi_infinite: integrand did not decay",
                           std::abs(total.value), total.error_estimate);
}

}  // namespace

QuadratureResult<double> integrate_semi_infinite_real(const std::function<double(double)>& f, double tol,
                                                 const SemiInfiniteOptions& options) {
    return semi_infinite_impl<double>(f, tol, options);
}

QuadratureResult<complex> integrate_semi_infinite_complex(const std::function<complex(double)>& f, double tol,
                                                  const SemiInfiniteOptions& options) {
    return semi_infinite_impl<complex>(f, tol, options);
}

QuadratureResult<double> integrate(const std::function<double(double)>& f, double a, double b,
                                   double tol, std::size_t max_evaluations) {
    if (!(tol > 0.0)) throw DomainError("integrate: tol must be positive");
    double max_abs = 0.0;
    bool converged = false;
    auto result = adaptive(f, a, b, tol, max_evaluations, max_abs, converged);
    if (!converged) {
        throw ConvergenceError("integrate: evaluation budget exhausted", result.value,
                               result.error_estimate);
    }
    return result;
}

SlopeFit fit_loglog_slope(std::span<const std::pair<double, double>> points) {
    if (points.size() < 3) {
        throw DomainError("fit_loglog_slope: need at least 3 points, got " + std::to_string(points.size()));
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [scale, magnitude] : points) {
        if (!(scale > 0.0) || !(magnitude > 0.0)) {
            throw DomainError("fit_loglog_slope: entries must be strictly positive");
        }
        const double lx = std::log(scale);
        const double ly = std::log(magnitude);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double n = static_cast<double>(points.size());
    const double denom = n * sxx - sx * sx;
    if (!(std::abs(denom) > 0.0)) {
        throw DomainError("fit_loglog_slope: all scales coincide");
    }
    SlopeFit fit;
    fit.slope = (n * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / n;
    double ss = 0.0;
    for (const auto& [scale, magnitude] : points) {
        const double r = std::log(magnitude) - (fit.intercept + fit.slope * std::log(scale));
        ss += r * r;
    }
    fit.residual = std::sqrt(ss / n);
    return fit;
}

}  // namespace udw::numerics
