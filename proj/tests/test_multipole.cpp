#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "udw/errors.hpp"
#include "udw/multipole.hpp"

using namespace udw;

namespace {

constexpr double PI = 3.14159265358979323846;

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

GaussianRegion at(double t, double x, double ell) { return {{t, x, 0.0, 0.0}, ell}; }

std::vector<double> ell_grid() {
    std::vector<double> g;
    for (int i = 2; i <= 10; ++i) g.push_back(0.01 * i);
    return g;
}

// Temporal small-ell expansion of the thermal kernel at coincident spatial centers.
double thermal_temporal_w2(double beta, double dt, double ell) {
    const double v = PI * dt / beta;
    const double sh = std::sinh(v);
    return -1.0 / (4 * beta * beta * sh * sh) -
           PI * PI * ell * ell * (2 + std::cosh(2 * v)) / (std::pow(beta, 4) * std::pow(sh, 4));
}

}  // namespace

TEST_CASE("vacuum closed-form derivatives") {
    const auto vac = FieldState::vacuum();
    const Event a{0.0, 3.0, 0.0, 0.0}, b{};
    const auto d = derivatives(vac, a, b);
    CHECK(d.grad_i[0] == 0.0);
    CHECK(rel(d.w, 1.0 / (4 * PI * PI * 9.0)) < 1e-15);
    // W as a function of x only: 1/(4 pi^2 x^2), dW/dx = -2/(4 pi^2 x^3)
    CHECK(rel(d.grad_i[1], -2.0 / (4 * PI * PI * 27.0)) < 1e-14);
    CHECK(d.grad_j[1] == -d.grad_i[1]);
    for (std::size_t m = 0; m < 4; ++m)
        for (std::size_t n = 0; n < 4; ++n) CHECK(d.hess_ii[m][n] == d.hess_ii[n][m]);

    // Against finite differences of the pointlike kernel at a generic point.
    const Event p{0.7, 2.0, -1.1, 0.4}, q{-0.3, 0.1, 0.5, -0.2};
    const auto dv = derivatives(vac, p, q);
    const auto df = derivatives(FieldState::thermal(1e7), p, q);
    for (std::size_t m = 0; m < 4; ++m) {
        CHECK(std::abs(dv.grad_i[m] - df.grad_i[m]) < 1e-7 * std::abs(dv.w));
        for (std::size_t n = 0; n < 4; ++n) CHECK(std::abs(dv.hess_ii[m][n] - df.hess_ii[m][n]) < 1e-6 * std::abs(dv.w));
    }
}

TEST_CASE("small-ell correction factors") {
    const auto vac = FieldState::vacuum();
    for (double ell : {1.0, 0.3}) {
        for (double s : {5.0, 10.0, 37.0}) {
            const auto sp = estimate(vac, at(0, s, ell), at(0, 0, ell));
            const double w0 = 1.0 / (4 * PI * PI * s * s);
            CHECK(rel(sp.value, w0 * (1 + 4 * ell * ell / (s * s))) < 1e-12);
            const auto tp = estimate(vac, at(s, 0, ell), at(0, 0, ell));
            CHECK(rel(tp.value, -w0 * (1 + 12 * ell * ell / (s * s))) < 1e-12);
            CHECK(sp.ricci_term == 0.0);
        }
    }
    const auto e10 = estimate(vac, at(0, 10, 1), at(0, 0, 1));
    CHECK(rel(e10.value, e10.pointlike_term * 1.04) < 1e-13);

    // General separation: W0 (1 + ell^2 (12 dt^2 + 4 dx^2) / (-dt^2 + dx^2)^2).
    for (auto [dt, dx] : {std::pair{2.0, 7.0}, {9.0, 3.0}, {-4.0, 11.0}}) {
        const double ell = 0.4;
        const double w0 = 1.0 / (4 * PI * PI * (-dt * dt + dx * dx));
        const double f = 1 + ell * ell * (12 * dt * dt + 4 * dx * dx) / std::pow(-dt * dt + dx * dx, 2);
        CHECK(rel(estimate(vac, at(dt, dx, ell), at(0, 0, ell)).value, w0 * f) < 1e-12);
    }
}

TEST_CASE("thermal derivatives in 1D slices") {
    const double beta = 50.0;
    const auto th = FieldState::thermal(beta);
    // Time slice at r = 0: W = -1/(4 beta^2 sinh^2 v), d^2W/dt^2 = -(pi^2/4beta^4)(4 csch^2 coth^2 + 2 csch^4).
    for (double dt : {5.0, 10.0, 20.0}) {
        const double v = PI * dt / beta;
        const double csch2 = 1 / std::pow(std::sinh(v), 2), coth = 1 / std::tanh(v);
        const double wtt = -(PI * PI / (4 * std::pow(beta, 4))) * (4 * csch2 * coth * coth + 2 * csch2 * csch2);
        const auto d = derivatives(th, {dt, 0, 0, 0}, {});
        CHECK(rel(d.hess_ii[0][0], wtt) < 1e-6);
        CHECK(rel(d.hess_jj[0][0], wtt) < 1e-6);
    }
    // Space slice at dt = 0: W(r) = coth(c r)/(4 pi beta r), c = pi/beta.
    for (double r : {1.0, 5.0, 20.0}) {
        const double c = PI / beta;
        const double cth = 1 / std::tanh(c * r), csch2 = 1 / std::pow(std::sinh(c * r), 2);
        const double k = 1 / (4 * PI * beta);
        const double w1 = k * (-c * csch2 / r - cth / (r * r));
        const double w2 = k * (2 * c * c * csch2 * cth / r + 2 * c * csch2 / (r * r) + 2 * cth / (r * r * r));
        const auto d = derivatives(th, {0, r, 0, 0}, {});
        CHECK(rel(d.w, k * cth / r) < 1e-13);
        CHECK(rel(d.grad_i[1], w1) < 1e-8);
        CHECK(rel(d.hess_ii[1][1], w2) < 1e-6);
        CHECK(rel(d.hess_ii[2][2], w1 / r) < 1e-6);
        CHECK(std::abs(d.hess_ii[1][2]) < 1e-6 * std::abs(w2));
    }
}

TEST_CASE("thermal temporal expansion") {
    const double beta = 50.0;
    for (double ell : {1.0, 0.5}) {
        for (double dt : {5.0, 10.0, 20.0}) {
            const auto e = estimate(FieldState::thermal(beta), at(dt, 0, ell), at(0, 0, ell));
            CHECK(rel(e.value, thermal_temporal_w2(beta, dt, ell)) < 1e-6);
        }
    }
}

TEST_CASE("thermal spatial expansion: measured leading coefficient") {
    const double beta = 50.0, ell = 1.0;
    for (double dx : {5.0, 10.0, 20.0}) {
        const auto e = estimate(FieldState::thermal(beta), at(0, dx, ell), at(0, 0, ell));
        const auto cand = thermal_spatial_w2_candidates(beta, dx, ell);
        CHECK(rel(e.value, cand.pi_corrected) < 1e-6);
        CHECK(rel(e.value, cand.as_printed) > 0.5);
        // Leading coefficient: pointlike term * 4 beta dx / coth(pi dx/beta) = 1/pi.
        const double coef = e.pointlike_term * 4 * beta * dx * std::tanh(PI * dx / beta);
        CHECK(rel(coef, 1 / PI) < 1e-12);
    }
}

TEST_CASE("convergence order") {
    const auto g = ell_grid();
    const auto vac = FieldState::vacuum();
    const auto full = convergence_order(vac, 0.0, 1.0, g, 1e-14);
    CHECK(std::abs(full.slope - 4.0) <= 0.3);
    const auto trunc = convergence_order(vac, 0.0, 1.0, g, 1e-14, false);
    CHECK(std::abs(trunc.slope - 2.0) <= 0.3);
    const auto temporal = convergence_order(vac, 1.0, 0.0, g, 1e-14);
    CHECK(std::abs(temporal.slope - 4.0) <= 0.3);
    const auto th = convergence_order(FieldState::thermal(50.0), 0.0, 1.0, g, 1e-14);
    CHECK(std::abs(th.slope - 4.0) <= 0.5);
    const auto coh = convergence_order(FieldState::coherent(1.5), 0.0, 1.0, g, 1e-14);
    CHECK(std::abs(coh.slope - 4.0) <= 0.5);

    CHECK_THROWS_AS(convergence_order(vac, 0.0, 1.0, {0.02, 0.5, 0.03}, 1e-12), DomainError);
    CHECK_THROWS_AS(convergence_order(vac, 0.0, 1.0, {0.02, 0.03}, 1e-12), DomainError);
}

TEST_CASE("coherent and one-particle estimates track their smeared kernels") {
    // Additive parts against closed smeared phi0 and against the F quadrature.
    const auto coh = FieldState::coherent(1.5);
    const double ell = 0.05;
    const auto ri = at(-6.0, -6.0, ell), rj = at(-6.0, -3.0, ell);
    const auto e = estimate(coh, ri, rj);
    const double exact = wightman_smeared_closed(coh, ri, rj)->real();
    CHECK(std::abs(e.value - exact) < 1e-4 * std::abs(exact));
    CHECK(std::abs(e.pointlike_term - exact) > std::abs(e.value - exact));

    const auto op = FieldState::one_particle(10.0);
    const double l2 = 0.5;
    const auto a = at(-60.0, -60.0, l2), b = at(-60.0, -52.0, l2);
    const auto eo = estimate(op, a, b);
    const double q = wightman_smeared_quadrature(op, a, b, 1e-14).real();
    CHECK(std::abs(eo.value - q) < std::abs(eo.pointlike_term - q));
}

TEST_CASE("estimate symmetry") {
    for (const auto& st : {FieldState::vacuum(), FieldState::thermal(20.0), FieldState::coherent(2.0),
                           FieldState::one_particle(3.0)}) {
        const auto ri = at(1.5, 4.0, 0.3), rj = at(-0.5, -1.0, 0.3);
        const auto ab = estimate(st, ri, rj), ba = estimate(st, rj, ri);
        CHECK(std::abs(ab.value - ba.value) <= 1e-9 * std::abs(ab.value));
        CHECK(ab.value == ab.pointlike_term + ab.ricci_term + ab.quadrupole_term);
    }
}

TEST_CASE("ricci term and dipole absence") {
    const auto vac = FieldState::vacuum();
    Matrix4 ric{};
    for (int i = 0; i < 4; ++i) ric[i][i] = 0.3;
    const auto ri = at(0, 4, 0.2), rj = at(0, 0, 0.2);
    const auto flat = estimate(vac, ri, rj);
    const auto curved = estimate(vac, ri, rj, ric, ric);
    CHECK(rel(curved.ricci_term, -(0.04 / 6) * flat.pointlike_term * (1.2 + 1.2)) < 1e-14);
    CHECK(curved.quadrupole_term == flat.quadrupole_term);

    // First moments of the Gaussian by quadrature, contracted with the gradient.
    const auto d = derivatives(vac, ri.center, rj.center);
    const double ell = ri.ell;
    auto first_moment = [&](long double) {
        auto f = [&](long double u) {
            return u * std::exp(-u * u / (2.0L * ell * ell)) / (std::sqrt(2.0L * oracle::pi_l) * ell);
        };
        return static_cast<double>(oracle::composite_simpson(f, -10.0L * ell, 10.0L * ell, 4000));
    };
    double dipole = 0.0;
    for (std::size_t mu = 0; mu < 4; ++mu) dipole += first_moment(mu) * (d.grad_i[mu] + d.grad_j[mu]);
    CHECK(std::abs(dipole) < 1e-12);
}

TEST_CASE("stencil and light-cone errors") {
    CHECK_THROWS_AS(derivatives(FieldState::vacuum(), {1, 1, 0, 0}, {}), SingularityError);
    CHECK_THROWS_AS(derivatives(FieldState::thermal(5.0), {1.0, 1.0 + 1e-5, 0, 0}, {}, 1e-3), StencilError);
    CHECK_NOTHROW(derivatives(FieldState::thermal(5.0), {1.0, 1.5, 0, 0}, {}));
}
