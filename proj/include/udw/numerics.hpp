#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <type_traits>
#include <utility>
#include <vector>

namespace udw::numerics {

using complex = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846264338327950288;
inline constexpr double sqrt_pi = 1.77245385090551602729816748334114518;
inline constexpr double default_tol = 1e-10;

// Largest |x| for which erfi(x) stays comfortably inside double range.
inline constexpr double erfi_max_argument = 26.0;

double erf(double x);

// Dawson function D(x) = exp(-x^2) * int_0^x exp(t^2) dt. Odd, bounded by ~0.541.
double dawson(double x);

// Imaginary error function erfi(x) = 2/sqrt(pi) int_0^x exp(t^2) dt.
// Throws RangeError for |x| > erfi_max_argument.
double erfi(double x);

// exp(-x^2) * erfi(x) for x >= 0, evaluated without forming exp(x^2).
// Throws DomainError for negative x.
double erfi_scaled(double x);

template <typename T>
struct QuadratureResult {
    T value{};
    double error_estimate = 0.0;  // absolute
    std::size_t evaluations = 0;
};

struct SemiInfiniteOptions {
    // Width of the first panel; subsequent panels double in width.
    double scale = 1.0;
    // When > 0 the integrand is known to decay like exp(-gaussian_rate * k^2)
    // times a slowly varying envelope; the tail is then cut analytically.
    double gaussian_rate = 0.0;
    std::size_t max_evaluations = 4'000'000;
};

// Adaptive Gauss-Kronrod (G10/K21) integration over [0, inf).
// Throws ConvergenceError (carrying the best estimate) when the budget runs out.
QuadratureResult<double> integrate_semi_infinite_real(const std::function<double(double)>& f,
                                                      double tol, const SemiInfiniteOptions& options);

QuadratureResult<complex> integrate_semi_infinite_complex(const std::function<complex(double)>& f,
                                                          double tol, const SemiInfiniteOptions& options);

template <typename F>
auto integrate_semi_infinite(F&& f, double tol = default_tol, const SemiInfiniteOptions& options = {}) {
    if constexpr (std::is_convertible_v<std::invoke_result_t<F, double>, double>) {
        return integrate_semi_infinite_real(std::forward<F>(f), tol, options);
    } else {
        return integrate_semi_infinite_complex(std::forward<F>(f), tol, options);
    }
}

// Adaptive Gauss-Kronrod integration over a finite interval [a, b].
QuadratureResult<double> integrate(const std::function<double(double)>& f, double a, double b,
                                   double tol = default_tol,
                                   std::size_t max_evaluations = 4'000'000);

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0;  // RMS misfit in log-log space
};

// Least-squares line through (log scale, log magnitude). Needs at least three
// strictly positive points.
SlopeFit fit_loglog_slope(std::span<const std::pair<double, double>> points);

}  // namespace udw::numerics
