#include "udw/multipole.hpp"

#include <cmath>
#include <functional>
#include <sstream>

#include "udw/errors.hpp"

namespace udw {

using numerics::complex;
using numerics::pi;

namespace {

using Vec4 = std::array<double, 4>;
constexpr double eta[4] = {-1.0, 1.0, 1.0, 1.0};

Event shifted(const Event& e, int mu, double h) {
    auto c = e.coords();
    c[static_cast<std::size_t>(mu)] += h;
    return Event::from_coords(c);
}

Event shifted2(const Event& e, int mu, double hm, int nu, double hn) {
    auto c = e.coords();
    c[static_cast<std::size_t>(mu)] += hm;
    c[static_cast<std::size_t>(nu)] += hn;
    return Event::from_coords(c);
}

struct Local {
    double f = 0.0;
    Vec4 grad{};
    Matrix4 hess{};
};

// 5-point central differences; mixed terms by Richardson-extrapolated 4-point stencils.
template <typename F>
Local finite_difference(F&& f, const Event& x, double h) {
    Local out;
    out.f = f(x);
    auto second_and_first = [&](int mu, double s, double& d1, double& d2) {
        const double fp1 = f(shifted(x, mu, s)), fm1 = f(shifted(x, mu, -s));
        const double fp2 = f(shifted(x, mu, 2 * s)), fm2 = f(shifted(x, mu, -2 * s));
        d1 = (-fp2 + 8 * fp1 - 8 * fm1 + fm2) / (12 * s);
        d2 = (-fp2 + 16 * fp1 - 30 * out.f + 16 * fm1 - fm2) / (12 * s * s);
    };
    auto mixed = [&](int mu, int nu, double s) {
        return (f(shifted2(x, mu, s, nu, s)) - f(shifted2(x, mu, s, nu, -s)) - f(shifted2(x, mu, -s, nu, s)) +
                f(shifted2(x, mu, -s, nu, -s))) /
               (4 * s * s);
    };
    for (int mu = 0; mu < 4; ++mu) {
        double d1 = 0, d2 = 0, e1 = 0, e2 = 0;
        second_and_first(mu, h, d1, d2);
        second_and_first(mu, 0.5 * h, e1, e2);
        // Refine when the two step sizes disagree noticeably.
        const double scale = std::max(std::abs(d2), std::abs(out.f) * 1e-300);
        if (std::abs(d2 - e2) > 1e-6 * scale) {
            d2 = (16 * e2 - d2) / 15;
            d1 = (16 * e1 - d1) / 15;
        } else {
            d2 = e2;
            d1 = e1;
        }
        out.grad[static_cast<std::size_t>(mu)] = d1;
        out.hess[static_cast<std::size_t>(mu)][static_cast<std::size_t>(mu)] = d2;
    }
    for (int mu = 0; mu < 4; ++mu) {
        for (int nu = mu + 1; nu < 4; ++nu) {
            const double v = (4 * mixed(mu, nu, h) - mixed(mu, nu, 2 * h)) / 3;
            out.hess[static_cast<std::size_t>(mu)][static_cast<std::size_t>(nu)] = v;
            out.hess[static_cast<std::size_t>(nu)][static_cast<std::size_t>(mu)] = v;
        }
    }
    return out;
}

// Every stencil point a + offset, |offset_mu| <= 2h per axis (and the 2h diagonal), must
// stay on the same side of the light cone of b.
void check_stencil(const Event& a, const Event& b, double h, const char* which) {
    const Interval iv = interval(a, b);
    const double reach = 2.0 * h * 2.0;  // diagonal mixed stencil reaches 2h along two axes
    const double margin = std::abs(std::abs(iv.dt) - iv.dr);
    if (classify(a, b) == Causality::lightlike || margin <= 2.0 * reach) {
        std::ostringstream msg;
        msg << "finite-difference stencil around " << which << " (step " << h
            << ") crosses the light cone: |dt| = " << std::abs(iv.dt) << ", dr = " << iv.dr;
        throw StencilError(msg.str());
    }
}

DerivativeBundle vacuum_derivatives(const Event& a, const Event& b) {
    const Interval iv = interval(a, b);
    const double sigma = iv.sigma;
    const double w = 1.0 / (8.0 * pi * pi * sigma);
    const Vec4 ca = a.coords(), cb = b.coords();
    Vec4 y_lower{};
    for (int mu = 0; mu < 4; ++mu) {
        y_lower[static_cast<std::size_t>(mu)] = eta[mu] * (ca[static_cast<std::size_t>(mu)] - cb[static_cast<std::size_t>(mu)]);
    }
    DerivativeBundle d;
    d.w = w;
    for (std::size_t mu = 0; mu < 4; ++mu) {
        d.grad_i[mu] = -y_lower[mu] / (8.0 * pi * pi * sigma * sigma);
        d.grad_j[mu] = -d.grad_i[mu];
        for (std::size_t nu = 0; nu < 4; ++nu) {
            const double h = (w / sigma) * (2.0 * y_lower[mu] * y_lower[nu] / sigma - (mu == nu ? eta[mu] : 0.0));
            d.hess_ii[mu][nu] = h;
            d.hess_jj[mu][nu] = h;
        }
    }
    return d;
}

double default_step(const Event& a, const Event& b) {
    const Interval iv = interval(a, b);
    return 1e-4 * (std::abs(iv.dt) + iv.dr);
}

void add_scaled(DerivativeBundle& d, const Local& at_a, double other_a, const Local& at_b, double other_b) {
    // Adds f(a) g(b): derivatives in a hit f, derivatives in b hit g.
    d.w += at_a.f * other_a;
    for (std::size_t mu = 0; mu < 4; ++mu) {
        d.grad_i[mu] += at_a.grad[mu] * other_a;
        d.grad_j[mu] += at_b.grad[mu] * other_b;
        for (std::size_t nu = 0; nu < 4; ++nu) {
            d.hess_ii[mu][nu] += at_a.hess[mu][nu] * other_a;
            d.hess_jj[mu][nu] += at_b.hess[mu][nu] * other_b;
        }
    }
}

}  // namespace

DerivativeBundle derivatives(const FieldState& state, const Event& a, const Event& b, std::optional<double> step) {
    validate(state);
    if (classify(a, b) == Causality::lightlike) {
        throw SingularityError("derivatives: pointlike kernel is singular on the light cone");
    }
    if (step && !(*step > 0.0)) throw DomainError("derivatives: step must be positive");
    const double h = step.value_or(default_step(a, b));

    if (state.tag == StateTag::vacuum) return vacuum_derivatives(a, b);

    if (state.tag == StateTag::thermal) {
        check_stencil(a, b, h, "a");
        const Local la = finite_difference([&](const Event& x) { return hadamard_point(state, x, b); }, a, h);
        const Local lb = finite_difference([&](const Event& x) { return hadamard_point(state, a, x); }, b, h);
        DerivativeBundle d;
        d.w = la.f;
        d.grad_i = la.grad;
        d.grad_j = lb.grad;
        d.hess_ii = la.hess;
        d.hess_jj = lb.hess;
        return d;
    }

    DerivativeBundle d = vacuum_derivatives(a, b);
    if (state.tag == StateTag::coherent) {
        auto phi = [&](const Event& x) { return phi0_coherent(state.delta, x); };
        const Local pa = finite_difference(phi, a, h);
        const Local pb = finite_difference(phi, b, h);
        add_scaled(d, pa, pb.f, pb, pa.f);
        return d;
    }
    // one_particle: 2 Re[F(a) F*(b)] = 2 (Fr(a) Fr(b) + Fi(a) Fi(b))
    auto fr = [&](const Event& x) { return F_oneparticle(state.delta, x).real(); };
    auto fi = [&](const Event& x) { return F_oneparticle(state.delta, x).imag(); };
    const Local ra = finite_difference(fr, a, h), rb = finite_difference(fr, b, h);
    const Local ia = finite_difference(fi, a, h), ib = finite_difference(fi, b, h);
    add_scaled(d, ra, 2.0 * rb.f, rb, 2.0 * ra.f);
    DerivativeBundle im{};
    add_scaled(im, ia, 2.0 * ib.f, ib, 2.0 * ia.f);
    d.w += im.w;
    for (std::size_t mu = 0; mu < 4; ++mu) {
        d.grad_i[mu] += im.grad_i[mu];
        d.grad_j[mu] += im.grad_j[mu];
        for (std::size_t nu = 0; nu < 4; ++nu) {
            d.hess_ii[mu][nu] += im.hess_ii[mu][nu];
            d.hess_jj[mu][nu] += im.hess_jj[mu][nu];
        }
    }
    return d;
}

MultipoleEstimate estimate(const FieldState& state, const GaussianRegion& ri, const GaussianRegion& rj,
                           const std::optional<Matrix4>& ricci_i, const std::optional<Matrix4>& ricci_j) {
    validate(ri);
    validate(rj);
    if (std::abs(ri.ell - rj.ell) > 1e-12 * std::max(ri.ell, rj.ell)) {
        throw DomainError("estimate: regions must have equal widths");
    }
    const double l2 = ri.ell * ri.ell;
    const DerivativeBundle d = derivatives(state, ri.center, rj.center);
    MultipoleEstimate m;
    m.pointlike_term = d.w;
    m.quadrupole_term = 0.5 * l2 * (delta_trace(d.hess_ii) + delta_trace(d.hess_jj));
    const double ri_tr = ricci_i ? moments(ri, ricci_i).ricci_trace_correction : 0.0;
    const double rj_tr = ricci_j ? moments(rj, ricci_j).ricci_trace_correction : 0.0;
    // ricci_trace_correction already carries -(ell^2/6) tr R.
    m.ricci_term = d.w * (ri_tr + rj_tr);
    m.value = m.pointlike_term + m.ricci_term + m.quadrupole_term;
    return m;
}

ConvergenceStudy convergence_study(const FieldState& state, double dt, double dr, const std::vector<double>& ell_grid,
                                   double tol, bool include_quadrupole) {
    if (ell_grid.empty()) throw DomainError("convergence_study: empty ell grid");
    const double separation = std::hypot(dt, dr);
    ConvergenceStudy study;
    std::vector<std::pair<double, double>> usable;
    for (double ell : ell_grid) {
        if (!(ell > 0.0)) throw DomainError("convergence_study: ell values must be positive");
        if (ell > separation / 10.0 * (1.0 + 1e-12)) {
            throw DomainError("convergence_study: ell = " + std::to_string(ell) + " exceeds separation/10");
        }
        const GaussianRegion ri{{dt, dr, 0.0, 0.0}, ell};
        const GaussianRegion rj{{0.0, 0.0, 0.0, 0.0}, ell};
        ConvergencePoint p;
        p.ell = ell;
        p.reference = wightman_smeared_quadrature(state, ri, rj, tol).real();
        const auto est = estimate(state, ri, rj);
        p.estimate = include_quadrupole ? est.value : est.pointlike_term;
        p.residual = std::abs(p.reference - p.estimate);
        p.used = p.residual > 1e-13;
        if (p.used) usable.emplace_back(ell, p.residual);
        study.points.push_back(p);
    }
    if (usable.size() < 3) {
        throw DomainError("convergence_study: fewer than 3 residuals above the 1e-13 noise floor");
    }
    study.fit = numerics::fit_loglog_slope(usable);
    return study;
}

numerics::SlopeFit convergence_order(const FieldState& state, double dt, double dr, const std::vector<double>& ell_grid,
                                     double tol, bool include_quadrupole) {
    return convergence_study(state, dt, dr, ell_grid, tol, include_quadrupole).fit;
}

ThermalSpatialCandidates thermal_spatial_w2_candidates(double beta, double dx, double ell) {
    if (!(beta > 0.0) || !(dx > 0.0) || !(ell >= 0.0)) throw DomainError("thermal_spatial_w2_candidates: bad input");
    const double u = pi * dx / beta;
    const double coth = 1.0 / std::tanh(u);
    const double sh = std::sinh(u);
    const double correction = pi * ell * ell * coth / (dx * beta * beta * beta * sh * sh);
    return {coth / (4.0 * beta * dx) + correction, coth / (4.0 * pi * beta * dx) + correction};
}

}  // namespace udw
