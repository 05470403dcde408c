#include <cmath>
#include <complex>

#include "doctest.h"
#include "oracles.hpp"
#include "udw/errors.hpp"
#include "udw/kernels.hpp"

using namespace udw;
using numerics::complex;

namespace {

constexpr double PI = 3.14159265358979323846;

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// Momentum integrals done with a fixed long-double composite Simpson rule over
// [0, kmax]; every integrand below carries a Gaussian factor so kmax is a hard cut.
long double momentum(const std::function<long double(long double)>& f, long double rate) {
    const long double kmax = std::sqrt(60.0L / rate);
    return oracle::composite_simpson(f, 0.0L, kmax, 20000);
}

long double sinc_l(long double x) { return std::abs(x) < 1e-6L ? 1.0L - x * x / 6.0L : std::sin(x) / x; }

// Smeared Wightman function of the vacuum or thermal state.
std::complex<long double> smeared_oracle(double dt, double dr, double ell, double beta = 0.0) {
    const long double rate = 2.0L * ell * ell;
    auto re = [&](long double k) {
        long double w = k;
        if (beta > 0.0 && k > 0.0L) w = k / std::tanh(0.5L * beta * k);
        if (beta > 0.0 && k == 0.0L) w = 2.0L / beta;
        return w * sinc_l(k * dr) * std::cos(k * dt) * std::exp(-rate * k * k);
    };
    auto im = [&](long double k) { return -k * sinc_l(k * dr) * std::sin(k * dt) * std::exp(-rate * k * k); };
    const long double pref = 1.0L / (4.0L * oracle::pi_l * oracle::pi_l);
    return {pref * momentum(re, rate), pref * momentum(im, rate)};
}

// Real part of the vacuum smeared kernel for arbitrary (dt, dr) via the Gaussian-sine
// integral int_0^inf e^{-a k^2} sin(bk) dk = D(b / 2 sqrt a) / sqrt a.
double vacuum_dawson_form(double dt, double dr, double ell) {
    const double c = 2.0 * std::sqrt(2.0) * ell;
    return (numerics::dawson((dr + dt) / c) + numerics::dawson((dr - dt) / c)) /
           (8.0 * PI * PI * dr * std::sqrt(2.0) * ell);
}

GaussianRegion at(double t, double x, double ell = 1.0) { return {{t, x, 0.0, 0.0}, ell}; }

}  // namespace

TEST_CASE("field state validation") {
    CHECK_NOTHROW(validate(FieldState::vacuum()));
    CHECK_NOTHROW(validate(FieldState::thermal(50.0)));
    CHECK_THROWS_AS(validate(FieldState::thermal(0.0)), DomainError);
    CHECK_THROWS_AS(validate(FieldState::coherent(-1.0)), DomainError);
    CHECK_THROWS_AS(validate(FieldState{StateTag::vacuum, 1.0, 0.0}), DomainError);
    CHECK_THROWS_AS(validate(FieldState{StateTag::one_particle, 2.0, 1.0}), DomainError);
    CHECK(state_tag_from_string("one_particle") == StateTag::one_particle);
    CHECK_THROWS_AS(state_tag_from_string("squeezed"), ConfigError);
}

TEST_CASE("pointlike vacuum and thermal") {
    const auto vac = FieldState::vacuum();
    CHECK(rel(hadamard_point(vac, {0, 1, 0, 0}, {}), 1.0 / (4 * PI * PI)) < 1e-15);
    CHECK(rel(hadamard_point(vac, {0, 1, 0, 0}, {}), 0.0253303) < 1e-5);
    CHECK(rel(hadamard_point(vac, {1, 0, 0, 0}, {}), -1.0 / (4 * PI * PI)) < 1e-15);
    CHECK_THROWS_AS(hadamard_point(vac, {1, 1, 0, 0}, {}), SingularityError);
    CHECK_THROWS_AS(hadamard_point(FieldState::thermal(3.0), {2, 0, 2, 0}, {}), SingularityError);

    // Thermal against the printed coth form, evaluated in long double with
    // coth x = sgn(x) (1 + e^{-2|x|}) / (1 - e^{-2|x|}) to avoid the 1 - 1 cancellation.
    auto coth_sum = [](long double a, long double b) {
        const long double ea = std::exp(-2.0L * std::fabs(a)), eb = std::exp(-2.0L * std::fabs(b));
        const long double sa = a > 0 ? 1.0L : -1.0L, sb = b > 0 ? 1.0L : -1.0L;
        if (sa == sb) return sa * ((1 + ea) / (1 - ea) + (1 + eb) / (1 - eb));
        return sa * 2.0L * (ea - eb) / ((1 - ea) * (1 - eb));
    };
    for (double beta : {0.7, 5.0, 50.0}) {
        for (auto [dt, dr] : {std::pair{0.3, 1.0}, {2.0, 0.5}, {-1.5, 4.0}, {0.0, 2.0}, {7.0, 1.0}}) {
            const long double pl = oracle::pi_l;
            const double oracle_v = static_cast<double>(coth_sum(pl * (dr + dt) / beta, pl * (dr - dt) / beta) /
                                                        (8 * pl * beta * dr));
            CHECK(rel(hadamard_point(FieldState::thermal(beta), {dt, dr, 0, 0}, {}), oracle_v) < 1e-12);
        }
        for (double dt : {0.4, 3.0, -9.0}) {
            const double lim = -1.0 / (4 * beta * beta * std::pow(std::sinh(PI * dt / beta), 2));
            CHECK(rel(hadamard_point(FieldState::thermal(beta), {dt, 0, 0, 0}, {}), lim) < 1e-13);
            // Continuity just off the axis.
            CHECK(rel(hadamard_point(FieldState::thermal(beta), {dt, 1e-7, 0, 0}, {}), lim) < 1e-9);
        }
    }
    // Large arguments: no overflow, and exponential decay.
    const double far = hadamard_point(FieldState::thermal(1.0), {0, 400, 0, 0}, {});
    CHECK(std::isfinite(far));
    CHECK(rel(far, 1.0 / (8 * PI * 400) * 2.0) < 1e-12);
    const double far_t = hadamard_point(FieldState::thermal(1.0), {100, 0.5, 0, 0}, {});
    CHECK(std::isfinite(far_t));
    CHECK(far_t < 0.0);

    // beta -> infinity approaches vacuum within (pi dr / beta)^2 / 3.
    const double w0 = hadamard_point(vac, {0, 1, 0, 0}, {});
    for (double beta : {50.0, 500.0}) {
        const double wb = hadamard_point(FieldState::thermal(beta), {0, 1, 0, 0}, {});
        CHECK(rel(wb, w0) <= std::pow(PI / beta, 2) / 3.0 * 1.0001);
    }
}

TEST_CASE("phi0 coherent") {
    CHECK(phi0_coherent(1.0, {0.0, 2.0, 0, 0}) == 0.0);
    CHECK(rel(phi0_coherent(1.0, {1, 1, 0, 0}), (std::exp(-1.0) - 1.0) / (4 * std::sqrt(2.0) * PI)) < 1e-14);
    for (double t : {0.3, 2.0, 5.0}) {
        const Event a{t, 1.2, -0.4, 0.7};
        const Event b{-t, 1.2, -0.4, 0.7};
        CHECK(phi0_coherent(1.5, a) == -phi0_coherent(1.5, b));
    }
    // r -> 0 limit continuity
    const double lim = phi0_coherent(2.0, {1.3, 0, 0, 0});
    CHECK(rel(lim, -1.3 * std::exp(-1.69 / 16.0) / (4 * std::sqrt(2.0) * PI * 4.0)) < 1e-14);
    CHECK(rel(phi0_coherent(2.0, {1.3, 1e-6, 0, 0}), lim) < 1e-10);
    // Momentum representation.
    for (auto [t, r, d] : {std::tuple{-6.0, 6.0, 1.5}, {3.0, 0.5, 1.0}, {-2.0, 9.0, 4.0}}) {
        const long double rate = d * d;
        auto f = [&](long double k) { return std::exp(-rate * k * k) * std::sin(k * r) * std::sin(k * t); };
        const double q = static_cast<double>(-d / (std::sqrt(2.0L) * std::pow(oracle::pi_l, 1.5L) * r) * momentum(f, rate));
        CHECK(std::abs(phi0_coherent(d, {t, r, 0, 0}) - q) < 1e-14);
    }
    CHECK_THROWS_AS(phi0_coherent(0.0, {}), DomainError);
}

TEST_CASE("coherent additivity and smeared phi0") {
    const auto coh = FieldState::coherent(1.5);
    const auto vac = FieldState::vacuum();
    const Event a{-6, -6, 0, 0};
    for (double s : {1.0, 3.0, 8.0, 20.0}) {
        const Event b{-6, -6 + s, 0, 0};
        const double diff = hadamard_point(coh, a, b) - hadamard_point(vac, a, b);
        CHECK(std::abs(diff - phi0_coherent(1.5, a) * phi0_coherent(1.5, b)) < 1e-12);
        CHECK(hadamard_point(coh, a, b) == hadamard_point(coh, b, a));
    }
    CHECK(phi0_coherent_smeared(1.5, at(0.0, 3.0)) == 0.0);
    // Smeared closed form vs its momentum integral with the extra exp(-ell^2 k^2).
    const double d = 1.5, ell = 0.8, t = -4.0, r = 5.0;
    const long double rate = d * d + ell * ell;
    auto f = [&](long double k) { return std::exp(-rate * k * k) * std::sin(k * r) * std::sin(k * t); };
    const double q = static_cast<double>(-d / (std::sqrt(2.0L) * std::pow(oracle::pi_l, 1.5L) * r) * momentum(f, rate));
    CHECK(std::abs(phi0_coherent_smeared(d, at(t, r, ell)) - q) < 1e-14);
}

TEST_CASE("one-particle mode function") {
    auto oracle_F = [](double delta, double ell, double t, double r) {
        const long double rate = 0.5L * delta * delta + static_cast<long double>(ell) * ell;
        auto re = [&](long double k) { return k * std::sin(k * r) * std::cos(k * t) * std::exp(-rate * k * k); };
        auto im = [&](long double k) { return -k * std::sin(k * r) * std::sin(k * t) * std::exp(-rate * k * k); };
        const long double pref = delta * delta / (std::sqrt(2.0L) * oracle::pi_l * r);
        return complex(static_cast<double>(pref * momentum(re, rate)), static_cast<double>(pref * momentum(im, rate)));
    };
    for (auto [d, t, r] : {std::tuple{10.0, -60.0, 60.0}, {1.0, 0.5, 2.0}, {3.0, 4.0, 1.0}, {2.0, -1.0, 7.0}}) {
        const complex f = F_oneparticle(d, {t, r, 0, 0});
        const complex o = oracle_F(d, 0.0, t, r);
        CHECK(std::abs(f - o) < 1e-12 * std::max(1.0, std::abs(o)));
    }
    // t = 0, r -> 0: purely real.
    const complex f0 = F_oneparticle(1.0, {0, 0, 0, 0});
    CHECK(f0.imag() == 0.0);
    CHECK(rel(f0.real(), 1.0 / (std::sqrt(2.0) * std::sqrt(2 * PI))) < 1e-14);
    // Continuity across the small-r branch.
    for (double t : {-0.7, 0.0, 1.9}) {
        const complex a = F_oneparticle(1.0, {t, 0.0, 0, 0});
        const complex b = F_oneparticle(1.0, {t, 2e-5, 0, 0});
        CHECK(std::abs(a - b) < 1e-9);
    }
    // t-reflection conjugates F, leaving the additive kernel term invariant.
    const Event a{1.3, 2.0, 0, 0}, b{-0.4, 0.5, 1.0, 0};
    const Event ar{-1.3, 2.0, 0, 0}, br{0.4, 0.5, 1.0, 0};
    CHECK(std::abs(F_oneparticle(2.0, ar) - std::conj(F_oneparticle(2.0, a))) < 1e-15);
    const double p = 2.0 * (F_oneparticle(2.0, a) * std::conj(F_oneparticle(2.0, b))).real();
    const double pr = 2.0 * (F_oneparticle(2.0, ar) * std::conj(F_oneparticle(2.0, br))).real();
    CHECK(std::abs(p - pr) < 1e-15);
    // Huge arguments stay finite (no erfi overflow).
    CHECK(std::isfinite(std::abs(F_oneparticle(0.1, {50.0, 3.0, 0, 0}))));

    // Smeared F by quadrature against the independent Simpson oracle.
    const complex fs = F_oneparticle_smeared(10.0, at(-60.0, -60.0, 1.0), 1e-12);
    CHECK(std::abs(fs - oracle_F(10.0, 1.0, -60.0, 60.0)) < 1e-11);
}

TEST_CASE("vacuum smeared: closed form vs quadrature vs oracle") {
    const auto vac = FieldState::vacuum();
    for (double ell : {1.0, 0.25}) {
        for (double s_over : {0.5, 1.0, 2.0, 5.0, 10.0, 20.0}) {
            const double s = s_over * ell;
            for (bool temporal : {false, true}) {
                const auto ri = temporal ? at(s, 0.0, ell) : at(0.0, s, ell);
                const auto rj = at(0.0, 0.0, ell);
                const auto closed = wightman_smeared_closed(vac, ri, rj);
                REQUIRE(closed.has_value());
                const complex q = wightman_smeared_quadrature(vac, ri, rj, 1e-14);
                CHECK(rel(closed->real(), q.real()) < 1e-8);
                const auto o = temporal ? smeared_oracle(s, 0.0, ell) : smeared_oracle(0.0, s, ell);
                CHECK(rel(closed->real(), static_cast<double>(o.real())) < 1e-10);
                CHECK(std::abs(closed->imag() - static_cast<double>(o.imag())) < 1e-13 / (ell * ell));
                CHECK(std::abs(q.imag() - static_cast<double>(o.imag())) < 1e-12 / (ell * ell));
                if (!temporal) CHECK(closed->imag() == 0.0);
            }
        }
    }
    // s -> 0 limit of both closed forms.
    const auto c0 = wightman_smeared_closed(vac, at(0, 0, 0.5), at(0, 0, 0.5));
    CHECK(rel(c0->real(), 1.0 / (16 * PI * PI * 0.25)) < 1e-15);
    CHECK(rel(wightman_smeared_closed(vac, at(0, 1e-9, 0.5), at(0, 0, 0.5))->real(), c0->real()) < 1e-12);
    CHECK(rel(wightman_smeared_closed(vac, at(1e-9, 0, 0.5), at(0, 0, 0.5))->real(), c0->real()) < 1e-12);

    // Generic configurations: no closed form offered, quadrature matches the Dawson form.
    for (auto [dt, dr] : {std::pair{3.0, 4.0}, {10.0, 10.0}, {-2.0, 7.5}, {0.3, 0.2}}) {
        CHECK_FALSE(wightman_smeared_closed(vac, at(dt, dr), at(0, 0)).has_value());
        const complex q = wightman_smeared_quadrature(vac, at(dt, dr), at(0, 0), 1e-13);
        CHECK(rel(q.real(), vacuum_dawson_form(dt, dr, 1.0)) < 1e-9);
    }
    CHECK_FALSE(wightman_smeared_closed(FieldState::thermal(5.0), at(0, 2), at(0, 0)).has_value());
    CHECK_FALSE(wightman_smeared_closed(FieldState::one_particle(1.0), at(0, 2), at(0, 0)).has_value());
    CHECK_THROWS_AS(wightman_smeared_quadrature(vac, at(0, 1, 1.0), at(0, 0, 2.0)), DomainError);
}

TEST_CASE("smeared vacuum approaches pointlike") {
    const auto vac = FieldState::vacuum();
    for (double s : {10.0, 15.0, 30.0, 80.0}) {
        for (bool temporal : {false, true}) {
            const Event e = temporal ? Event{s, 0, 0, 0} : Event{0, s, 0, 0};
            const double wp = hadamard_point(vac, e, {});
            const double ws = wightman_smeared_closed(vac, {e, 1.0}, at(0, 0))->real();
            if (!temporal) {
                CHECK(rel(ws, wp) <= 5.0 / (s * s));
            } else {
                // Temporal deviation is governed by the 12 l^2 / dt^2 coefficient.
                CHECK(std::abs(rel(ws, wp) * s * s - 12.0) <= 360.0 / (s * s));
            }
        }
    }
}

TEST_CASE("thermal smeared") {
    for (double beta : {0.8, 5.0, 50.0}) {
        for (auto [dt, dr] : {std::pair{0.0, 3.0}, {4.0, 0.0}, {2.0, 6.0}}) {
            const complex q = wightman_smeared_quadrature(FieldState::thermal(beta), at(dt, dr), at(0, 0), 1e-13);
            const auto o = smeared_oracle(dt, dr, 1.0, beta);
            CHECK(std::abs(q.real() - static_cast<double>(o.real())) < 1e-12);
            CHECK(std::abs(q.imag() - static_cast<double>(o.imag())) < 1e-12);
            // Commutator part is state independent.
            CHECK(std::abs(2.0 * q.imag() - causal_smeared(at(dt, dr), at(0, 0))) < 1e-12);
        }
    }
    // Large beta recovers the vacuum.
    for (auto [dt, dr] : {std::pair{0.0, 3.0}, {4.0, 0.0}, {2.0, 6.0}}) {
        const complex t = wightman_smeared_quadrature(FieldState::thermal(1e4), at(dt, dr), at(0, 0), 1e-13);
        const complex v = wightman_smeared_quadrature(FieldState::vacuum(), at(dt, dr), at(0, 0), 1e-13);
        CHECK(std::abs(t - v) / std::abs(v) < 1e-5);
    }
}

TEST_CASE("coherent and one-particle smeared") {
    const auto coh = FieldState::coherent(1.5);
    const auto ri = at(-6.0, -6.0), rj = at(-6.0, -3.0);
    const auto closed = wightman_smeared_closed(coh, ri, rj);
    REQUIRE(closed.has_value());
    const complex q = wightman_smeared_quadrature(coh, ri, rj, 1e-13);
    CHECK(std::abs(*closed - q) < 1e-12);

    const auto op = FieldState::one_particle(10.0);
    const auto a = at(-60.0, -60.0), b = at(-60.0, -50.0);
    const complex w = wightman_smeared_quadrature(op, a, b, 1e-13);
    const complex v = wightman_smeared_quadrature(FieldState::vacuum(), a, b, 1e-13);
    const complex fa = F_oneparticle_smeared(10.0, a, 1e-13), fb = F_oneparticle_smeared(10.0, b, 1e-13);
    CHECK(std::abs((w - v).real() - 2.0 * (fa * std::conj(fb)).real()) < 1e-12);
    CHECK(std::abs((w - v).imag()) < 1e-15);
}

TEST_CASE("causal and retarded") {
    CHECK(causal_smeared(at(0, 5), at(0, 0)) == 0.0);
    CHECK(retarded_smeared(at(0, 5), at(0, 0)).value == 0.0);
    // Deep spacelike: bounded by the Gaussian tail.
    for (double dr : {20.0, 40.0}) {
        const double e = causal_smeared(at(5.0, dr), at(0, 0));
        CHECK(std::abs(e) <= std::exp(-(dr - 5.0) * (dr - 5.0) / 8.0));
    }
    // Light-cone configuration against twice the imaginary part of the oracle.
    const complex q = wightman_smeared_quadrature(FieldState::vacuum(), at(10.0, 10.0), at(0, 0), 1e-13);
    const auto g = retarded_smeared(at(10.0, 10.0), at(0, 0));
    CHECK(std::abs(g.value - 2.0 * q.imag()) < 1e-8);
    CHECK(g.value < 0.0);
    CHECK_FALSE(g.precision_warning);
    CHECK(retarded_smeared(at(0, 0), at(10.0, 10.0)).value == 0.0);
    CHECK(retarded_smeared(at(2.0, 3.0), at(0, 0)).precision_warning);
    // dr -> 0 continuity.
    const double e0 = causal_smeared(at(3.0, 0.0), at(0, 0));
    CHECK(rel(causal_smeared(at(3.0, 1e-7), at(0, 0)), e0) < 1e-10);
    CHECK(rel(e0, -3.0 * std::exp(-9.0 / 8.0) / (16 * std::sqrt(2.0) * std::pow(PI, 1.5))) < 1e-14);
    // Antisymmetry
    CHECK(causal_smeared(at(3.0, 2.0), at(0, 0)) == -causal_smeared(at(0, 0), at(3.0, 2.0)));
}

TEST_CASE("assemble_kernels") {
    const double ell = 1.0;
    const double lambda = 0.7;
    auto one = assemble_kernels(FieldState::vacuum(), {at(0, 0)}, lambda);
    REQUIRE(one.n == 1);
    CHECK(one.E(0, 0) == 0.0);
    CHECK(one.GR(0, 0) == 0.0);
    CHECK(rel(one.H(0, 0), lambda * lambda / (8 * PI * PI * ell * ell)) < 1e-14);
    CHECK(one.Wdiag(0) == 0.5 * one.H(0, 0));

    auto two = assemble_kernels(FieldState::vacuum(), {at(0, 0), at(0, 30)}, lambda);
    CHECK(std::abs(two.E(0, 1)) < lambda * lambda * std::exp(-900.0 / 8.0));

    std::vector<GaussianRegion> regions;
    for (int t = 0; t < 2; ++t)
        for (int x = 0; x < 3; ++x) regions.push_back({{10.0 * t, 10.0 * x, 0.0, 0.0}, ell});
    for (const auto& state : {FieldState::vacuum(), FieldState::thermal(50.0)}) {
        auto k = assemble_kernels(state, regions, lambda, 1e-12, 1);
        CHECK_NOTHROW(k.check_invariants(0.0));
        for (std::size_t i = 0; i < k.n; ++i) {
            CHECK(k.E(i, i) == 0.0);
            for (std::size_t j = 0; j < k.n; ++j) {
                const complex q = wightman_smeared_quadrature(state, regions[i], regions[j], 1e-13);
                CHECK(std::abs(k.E(i, j) - lambda * lambda * 2.0 * q.imag()) < 1e-8);
                CHECK(std::abs(k.H(i, j) - lambda * lambda * 2.0 * q.real()) < 1e-9);
            }
        }
        auto kp = assemble_kernels(state, regions, lambda, 1e-12, 4);
        CHECK(kp.H == k.H);
        CHECK(kp.GR == k.GR);
        CHECK(kp.warnings == k.warnings);
    }
    CHECK_THROWS_AS(assemble_kernels(FieldState::coherent(1.0), regions, lambda), DomainError);
    CHECK_THROWS_AS(assemble_kernels(FieldState::vacuum(), regions, 0.0), DomainError);
}

TEST_CASE("KernelMatrix invariant check") {
    Eigen::MatrixXd H(2, 2), GR = Eigen::MatrixXd::Zero(2, 2);
    H << 0.3, 0.1, 0.1, 0.4;
    GR(1, 0) = 0.2;
    auto k = KernelMatrix::from_parts(H, GR, 1.0);
    CHECK_NOTHROW(k.check_invariants());
    CHECK(k.E(1, 0) == 0.2);
    CHECK(k.E(0, 1) == -0.2);
    CHECK(k.Delta(0, 1) == 0.2);
    k.H(0, 1) = 0.2;
    CHECK_THROWS_AS(k.check_invariants(), ConsistencyError);
}
