#include "udw/kernels.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "udw/errors.hpp"
#include "udw/parallel.hpp"

namespace udw {

using numerics::complex;
using numerics::pi;
using numerics::sqrt_pi;

namespace {

const double sqrt2 = std::sqrt(2.0);

double sinc(double x) {
    if (std::abs(x) < 1e-4) return 1.0 - x * x / 6.0;
    return std::sin(x) / x;
}

double sinhc(double x) {
    if (std::abs(x) < 1e-4) return 1.0 + x * x / 6.0;
    return std::sinh(x) / x;
}

// x coth x, equal to 1 at the origin.
double xcothx(double x) {
    if (std::abs(x) < 1e-4) return 1.0 + x * x / 3.0;
    return x / std::tanh(x);
}

// (exp(-(r+t)^2/w) - exp(-(r-t)^2/w)) / r with the r -> 0 limit -4 t exp(-t^2/w) / w.
double gaussian_difference_over_r(double r, double t, double w) {
    const double x = 2.0 * r * t / w;
    if (std::abs(x) > 1.0) {
        return (std::exp(-(r + t) * (r + t) / w) - std::exp(-(r - t) * (r - t) / w)) / r;
    }
    return -4.0 * t / w * std::exp(-(r * r + t * t) / w) * sinhc(x);
}

// log|sinh x| for x != 0 without overflow.
double log_abs_sinh(double x) {
    const double a = std::abs(x);
    if (a < 20.0) return std::log(std::sinh(a));
    return a - std::log(2.0) + std::log1p(-std::exp(-2.0 * a));
}

void require_equal_widths(const GaussianRegion& ri, const GaussianRegion& rj) {
    validate(ri);
    validate(rj);
    if (std::abs(ri.ell - rj.ell) > 1e-12 * std::max(ri.ell, rj.ell)) {
        throw DomainError("smeared kernels require equal widths (got " + std::to_string(ri.ell) + " and " +
                          std::to_string(rj.ell) + ")");
    }
}

double spatial_radius(const Event& x) { return std::hypot(x.x, x.y, x.z); }

double vacuum_point(const Interval& iv) { return 1.0 / (4.0 * pi * pi * (-iv.dt * iv.dt + iv.dr * iv.dr)); }

// Thermal kernel written as (1/4beta^2) [sinh(2u)/2u] / (sinh(u+v) sinh(u-v)), u = pi r/beta,
// v = pi t/beta, which is regular at r = 0 and never forms coth differences.
double thermal_point(double beta, const Interval& iv) {
    const double u = pi * iv.dr / beta;
    const double v = pi * iv.dt / beta;
    const double a = u + v;
    const double b = u - v;
    const double pref = 1.0 / (4.0 * beta * beta);
    if (std::abs(a) < 300.0 && std::abs(b) < 300.0) {
        const double s = u == 0.0 ? 1.0 : std::sinh(2.0 * u) / (2.0 * u);
        return pref * s / (std::sinh(a) * std::sinh(b));
    }
    const double log_s = u == 0.0 ? 0.0 : log_abs_sinh(2.0 * u) - std::log(2.0 * u);
    const double sign = (a > 0.0) == (b > 0.0) ? 1.0 : -1.0;
    return sign * pref * std::exp(log_s - log_abs_sinh(a) - log_abs_sinh(b));
}

void check_not_lightlike(const Event& a, const Event& b, const char* who) {
    if (classify(a, b) == Causality::lightlike) {
        std::ostringstream msg;
        msg << who << ": pointlike kernel is singular on the light cone (dt=" << interval(a, b).dt
            << ", dr=" << interval(a, b).dr << "); use the smeared or quadrature path";
        throw SingularityError(msg.str());
    }
}

numerics::SemiInfiniteOptions gaussian_options(double rate) {
    return {.scale = 1.0 / std::sqrt(rate), .gaussian_rate = rate};
}

// phi0 of a source of width delta seen through an extra Gaussian damping exp(-ell^2 k^2):
// -(delta / (sqrt2 pi^{3/2})) int exp(-(delta^2+ell^2) k^2) (sin(kr)/r) sin(kt) dk
double phi0_quadrature(double delta, double ell, const Event& x, double tol) {
    const double r = spatial_radius(x);
    const double rate = delta * delta + ell * ell;
    const double pref = -delta / (sqrt2 * pi * sqrt_pi);
    auto f = [&](double k) { return k * sinc(k * r) * std::sin(k * x.t) * std::exp(-rate * k * k); };
    return pref * numerics::integrate_semi_infinite(f, tol / std::abs(pref), gaussian_options(rate)).value;
}

// F = (delta^2 / (sqrt2 pi)) int k (sin(kr)/r) exp(-i k t) exp(-(delta^2/2 + ell^2) k^2) dk
complex F_quadrature(double delta, double ell, const Event& x, double tol) {
    const double r = spatial_radius(x);
    const double rate = 0.5 * delta * delta + ell * ell;
    const double pref = delta * delta / (sqrt2 * pi);
    auto f = [&](double k) {
        return k * k * sinc(k * r) * std::exp(-rate * k * k) * complex(std::cos(k * x.t), -std::sin(k * x.t));
    };
    return pref * numerics::integrate_semi_infinite(f, tol / pref, gaussian_options(rate)).value;
}

complex vacuum_like_quadrature(const FieldState& state, const Interval& iv, double ell, double tol) {
    const double rate = 2.0 * ell * ell;
    const double pref = 1.0 / (4.0 * pi * pi);
    const bool thermal = state.tag == StateTag::thermal;
    const double beta = state.beta;
    auto f = [&](double k) {
        const double damp = sinc(k * iv.dr) * std::exp(-rate * k * k);
        // Thermal occupation enters the real part as coth(beta k / 2).
        const double re_weight = thermal ? 2.0 / beta * xcothx(0.5 * beta * k) : k;
        return complex(re_weight * damp * std::cos(k * iv.dt), -k * damp * std::sin(k * iv.dt));
    };
    return pref * numerics::integrate_semi_infinite(f, tol / pref, gaussian_options(rate)).value;
}

// Real part of the vacuum smeared kernel at dt = 0 (equal time) or dr = 0 (equal position).
std::optional<double> vacuum_closed_real(const Interval& iv, double ell) {
    const double l2 = ell * ell;
    if (iv.dt == 0.0) {
        const double s = iv.dr;
        const double x = s / (2.0 * sqrt2 * ell);
        // erfi_scaled(x) / s with the s -> 0 limit 1/(sqrt(2 pi) ell).
        const double ratio = x < 1e-8 ? 1.0 / (sqrt2 * sqrt_pi * ell) : numerics::erfi_scaled(x) / s;
        return ratio / (8.0 * sqrt2 * pi * sqrt_pi * ell);
    }
    if (iv.dr == 0.0) {
        const double x = std::abs(iv.dt) / (2.0 * sqrt2 * ell);
        return (1.0 - 2.0 * x * numerics::dawson(x)) / (16.0 * pi * pi * l2);
    }
    return std::nullopt;
}

}  // namespace

const char* to_string(StateTag tag) {
    switch (tag) {
        case StateTag::vacuum: return "vacuum";
        case StateTag::thermal: return "thermal";
        case StateTag::coherent: return "coherent";
        case StateTag::one_particle: return "one_particle";
    }
    return "unknown";
}

StateTag state_tag_from_string(const std::string& name) {
    for (StateTag t : {StateTag::vacuum, StateTag::thermal, StateTag::coherent, StateTag::one_particle}) {
        if (name == to_string(t)) return t;
    }
    throw ConfigError("state", "unknown state '" + name + "'");
}

void validate(const FieldState& state) {
    auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
    switch (state.tag) {
        case StateTag::vacuum:
            if (state.beta != 0.0 || state.delta != 0.0) throw DomainError("vacuum state takes no parameters");
            return;
        case StateTag::thermal:
            if (!positive(state.beta)) throw DomainError("thermal state needs beta > 0");
            if (state.delta != 0.0) throw DomainError("thermal state takes no delta");
            return;
        case StateTag::coherent:
        case StateTag::one_particle:
            if (!positive(state.delta)) throw DomainError(std::string(to_string(state.tag)) + " state needs delta > 0");
            if (state.beta != 0.0) throw DomainError(std::string(to_string(state.tag)) + " state takes no beta");
            return;
    }
}

double hadamard_point(const FieldState& state, const Event& a, const Event& b) {
    validate(state);
    check_not_lightlike(a, b, "hadamard_point");
    const Interval iv = interval(a, b);
    switch (state.tag) {
        case StateTag::vacuum: return vacuum_point(iv);
        case StateTag::thermal: return thermal_point(state.beta, iv);
        case StateTag::coherent:
            return vacuum_point(iv) + phi0_coherent(state.delta, a) * phi0_coherent(state.delta, b);
        case StateTag::one_particle:
            return vacuum_point(iv) +
                   2.0 * (F_oneparticle(state.delta, a) * std::conj(F_oneparticle(state.delta, b))).real();
    }
    return 0.0;
}

double phi0_coherent(double delta, const Event& x) {
    if (!(delta > 0.0) || !std::isfinite(delta)) throw DomainError("phi0_coherent: delta must be positive");
    return gaussian_difference_over_r(spatial_radius(x), x.t, 4.0 * delta * delta) / (4.0 * sqrt2 * pi);
}

double phi0_coherent_smeared(double delta, const GaussianRegion& region) {
    validate(region);
    const double d_eff = std::sqrt(delta * delta + region.ell * region.ell);
    return delta / d_eff * phi0_coherent(d_eff, region.center);
}

complex F_oneparticle(double delta, const Event& x) {
    if (!(delta > 0.0) || !std::isfinite(delta)) throw DomainError("F_oneparticle: delta must be positive");
    const double r = spatial_radius(x);
    const double c = 1.0 / (sqrt2 * delta);
    const double norm = 1.0 / std::sqrt(2.0 * pi);
    // H^{+/-}(v) = h(v) +/- i g(v), h = v e^{-v^2}/sqrt(2pi), g = v e^{-v^2} erfi(v)/sqrt(2pi).
    auto h = [&](double v) { return norm * v * std::exp(-v * v); };
    auto g = [&](double v) { return norm * v * 2.0 / sqrt_pi * numerics::dawson(v); };
    const double eps = r * c;
    if (eps < 1e-5) {
        const double a = x.t * c;
        const double d = numerics::dawson(a);
        const double dh = norm * (1.0 - 2.0 * a * a) * std::exp(-a * a);
        const double dg = norm * 2.0 / sqrt_pi * (d + a * (1.0 - 2.0 * a * d));
        return c * complex(dh, -dg);
    }
    const double vm = (r - x.t) * c;
    const double vp = (r + x.t) * c;
    return complex(h(vm) + h(vp), g(vm) - g(vp)) / (2.0 * r);
}

complex F_oneparticle_smeared(double delta, const GaussianRegion& region, double tol) {
    if (!(delta > 0.0) || !std::isfinite(delta)) throw DomainError("F_oneparticle_smeared: delta must be positive");
    validate(region);
    return F_quadrature(delta, region.ell, region.center, tol);
}

complex wightman_smeared_quadrature(const FieldState& state, const GaussianRegion& ri, const GaussianRegion& rj,
                                    double tol) {
    validate(state);
    require_equal_widths(ri, rj);
    if (!(tol > 0.0)) throw DomainError("wightman_smeared_quadrature: tol must be positive");
    const Interval iv = interval(ri.center, rj.center);
    const double ell = ri.ell;
    switch (state.tag) {
        case StateTag::vacuum:
        case StateTag::thermal: return vacuum_like_quadrature(state, iv, ell, tol);
        case StateTag::coherent: {
            const complex w = vacuum_like_quadrature(FieldState::vacuum(), iv, ell, tol / 2.0);
            return w + phi0_quadrature(state.delta, ell, ri.center, tol / 4.0) *
                           phi0_quadrature(state.delta, ell, rj.center, tol / 4.0);
        }
        case StateTag::one_particle: {
            const complex w = vacuum_like_quadrature(FieldState::vacuum(), iv, ell, tol / 2.0);
            const complex fi = F_quadrature(state.delta, ell, ri.center, tol / 4.0);
            const complex fj = F_quadrature(state.delta, ell, rj.center, tol / 4.0);
            return w + 2.0 * (fi * std::conj(fj)).real();
        }
    }
    return {};
}

double causal_smeared(const GaussianRegion& ri, const GaussianRegion& rj) {
    require_equal_widths(ri, rj);
    const Interval iv = interval(ri.center, rj.center);
    const double ell = ri.ell;
    // 2 Im of the vacuum momentum integral, done in closed form.
    return gaussian_difference_over_r(iv.dr, iv.dt, 8.0 * ell * ell) / (8.0 * sqrt2 * pi * sqrt_pi * ell);
}

std::optional<complex> wightman_smeared_closed(const FieldState& state, const GaussianRegion& ri,
                                               const GaussianRegion& rj) {
    validate(state);
    require_equal_widths(ri, rj);
    if (state.tag == StateTag::thermal || state.tag == StateTag::one_particle) return std::nullopt;
    const Interval iv = interval(ri.center, rj.center);
    const auto re = vacuum_closed_real(iv, ri.ell);
    if (!re) return std::nullopt;
    complex w(*re, 0.5 * causal_smeared(ri, rj));
    if (state.tag == StateTag::coherent) {
        w += phi0_coherent_smeared(state.delta, ri) * phi0_coherent_smeared(state.delta, rj);
    }
    return w;
}

RetardedValue retarded_smeared(const GaussianRegion& ri, const GaussianRegion& rj) {
    require_equal_widths(ri, rj);
    const Interval iv = interval(ri.center, rj.center);
    const double ell = ri.ell;
    RetardedValue out;
    out.precision_warning = std::abs(iv.dt) < 5.0 * ell && std::abs(iv.dt - iv.dr) < 5.0 * ell;
    out.value = iv.dt > 0.0 ? causal_smeared(ri, rj) : 0.0;
    return out;
}

KernelMatrix KernelMatrix::from_parts(Eigen::MatrixXd H, Eigen::MatrixXd GR, double lambda) {
    if (H.rows() != H.cols() || GR.rows() != GR.cols() || H.rows() != GR.rows()) {
        throw DomainError("KernelMatrix: H and GR must be square and of equal size");
    }
    KernelMatrix k;
    k.n = static_cast<std::size_t>(H.rows());
    k.H = std::move(H);
    k.GR = std::move(GR);
    k.E = k.GR - k.GR.transpose();
    k.Delta = k.GR + k.GR.transpose();
    k.Wdiag = 0.5 * k.H.diagonal();
    k.lambda = lambda;
    return k;
}

void KernelMatrix::check_invariants(double tol) const {
    const auto sz = static_cast<Eigen::Index>(n);
    for (const Eigen::MatrixXd* m : {&H, &E, &GR, &Delta}) {
        if (m->rows() != sz || m->cols() != sz) throw ConsistencyError("KernelMatrix: matrix size mismatch");
        if (!m->allFinite()) throw ConsistencyError("KernelMatrix: non-finite entry");
    }
    if (Wdiag.size() != sz) throw ConsistencyError("KernelMatrix: Wdiag size mismatch");
    auto fail = [](const std::string& what, double err) {
        throw ConsistencyError("KernelMatrix: " + what + " violated by " + std::to_string(err));
    };
    if (n == 0) return;
    double err = (H - H.transpose()).cwiseAbs().maxCoeff();
    if (err > tol) fail("H = H^T", err);
    err = (E + E.transpose()).cwiseAbs().maxCoeff();
    if (err > tol) fail("E = -E^T", err);
    err = (Delta - GR - GR.transpose()).cwiseAbs().maxCoeff();
    if (err > tol) fail("Delta = GR + GR^T", err);
    err = (E - GR + GR.transpose()).cwiseAbs().maxCoeff();
    if (err > tol) fail("E = GR - GR^T", err);
    err = (Wdiag - 0.5 * H.diagonal()).cwiseAbs().maxCoeff();
    if (err > tol) fail("Wdiag = diag(H)/2", err);
    if (!(lambda > 0.0)) throw ConsistencyError("KernelMatrix: lambda must be positive");
}

KernelMatrix assemble_kernels(const FieldState& state, const std::vector<GaussianRegion>& regions, double lambda,
                              double tol, unsigned threads) {
    validate(state);
    if (state.tag != StateTag::vacuum && state.tag != StateTag::thermal) {
        throw DomainError(std::string("assemble_kernels: state '") + to_string(state.tag) +
                          "' has a nonzero one-point function or is not quasifree; only vacuum and thermal are supported");
    }
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw DomainError("assemble_kernels: lambda must be positive");
    const std::size_t n = regions.size();
    for (const auto& r : regions) require_equal_widths(regions.front(), r);

    // Upper triangle including the diagonal, in row-major order.
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) pairs.emplace_back(i, j);

    const double l2 = lambda * lambda;
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    Eigen::MatrixXd GR = H;
    std::vector<char> warn(pairs.size(), 0);

    parallel_for(pairs.size(), threads, [&](std::size_t p) {
        const auto [i, j] = pairs[p];
        const auto ii = static_cast<Eigen::Index>(i);
        const auto jj = static_cast<Eigen::Index>(j);
        try {
            auto closed = wightman_smeared_closed(state, regions[i], regions[j]);
            const double re = closed ? closed->real() : wightman_smeared_quadrature(state, regions[i], regions[j], tol).real();
            H(ii, jj) = l2 * 2.0 * re;
            H(jj, ii) = H(ii, jj);
            if (i != j) {
                const auto gij = retarded_smeared(regions[i], regions[j]);
                const auto gji = retarded_smeared(regions[j], regions[i]);
                GR(ii, jj) = l2 * gij.value;
                GR(jj, ii) = l2 * gji.value;
                warn[p] = gij.precision_warning || gji.precision_warning;
            }
        } catch (const ConvergenceError& e) {
            throw ConvergenceError(std::string(e.what()) + " at pair (" + std::to_string(i) + "," +
                                       std::to_string(j) + ")",
                                   e.best_estimate(), e.error_estimate());
        } catch (const SingularityError& e) {
            throw SingularityError(std::string(e.what()) + " at pair (" + std::to_string(i) + "," +
                                   std::to_string(j) + ")");
        }
    });

    KernelMatrix k = KernelMatrix::from_parts(std::move(H), std::move(GR), lambda);
    k.state = state;
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        if (warn[p]) {
            k.warnings.push_back("precision warning: retarded/causal identification degraded at pair (" +
                                 std::to_string(pairs[p].first) + "," + std::to_string(pairs[p].second) + ")");
        }
    }
    return k;
}

}  // namespace udw
