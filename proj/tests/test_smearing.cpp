#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "udw/errors.hpp"
#include "udw/smearing.hpp"

using namespace udw;

namespace {

// The profile factorizes, so the 4D integral of y^a y^b Lambda is a product of
// 1D slice integrals through the center.
long double slice_moment(const GaussianRegion& r, int axis, int power) {
    const double peak = evaluate(r, r.center);
    auto f = [&](long double u) {
        auto c = r.center.coords();
        c[static_cast<std::size_t>(axis)] += static_cast<double>(u);
        return std::pow(u, power) * static_cast<long double>(evaluate(r, Event::from_coords(c)));
    };
    const long double half = 10.0L * r.ell;
    const long double v = oracle::composite_simpson(f, -half, half, 4000);
    // Divide out the peak's contribution from the three transverse axes.
    return v / std::pow(static_cast<long double>(peak), 0.75L);
}

long double full_moment(const GaussianRegion& r, int axis_a, int axis_b) {
    long double total = 1.0L;
    for (int ax = 0; ax < 4; ++ax) {
        int p = (ax == axis_a) + (ax == axis_b);
        total *= slice_moment(r, ax, p);
    }
    return total;
}

}  // namespace

TEST_CASE("evaluate examples") {
    const GaussianRegion r{{}, 1.0};
    CHECK(evaluate(r, {}) == doctest::Approx(1.0 / (4.0 * M_PI * M_PI)).epsilon(1e-15));
    CHECK(evaluate(r, {}) == doctest::Approx(0.025330295910584444).epsilon(1e-15));
    const double peak = evaluate(r, {});
    CHECK(evaluate(r, {1.0, 1.0, 0.0, 0.0}) == doctest::Approx(std::exp(-1.0) * peak).epsilon(1e-15));
    CHECK(evaluate(r, {0.0, 0.0, 1.0, -1.0}) == doctest::Approx(std::exp(-1.0) * peak).epsilon(1e-15));
}

TEST_CASE("evaluate symmetries") {
    const GaussianRegion r{{0.3, 1.0, -2.0, 0.5}, 0.7};
    const double a = evaluate(r, {0.3 + 0.4, 1.0 + 0.3, -2.0 + 0.5, 0.5 - 0.2});
    // Spatial rotation of the offset (permutation + sign) and time reflection.
    CHECK(evaluate(r, {0.3 - 0.4, 1.0 + 0.5, -2.0 - 0.2, 0.5 + 0.3}) == doctest::Approx(a).epsilon(1e-15));
    CHECK(evaluate(r, {0.3 + 0.4, 1.0 - 0.3, -2.0 - 0.5, 0.5 + 0.2}) == doctest::Approx(a).epsilon(1e-15));
    CHECK(a > 0.0);
}

TEST_CASE("normalization and moments by quadrature") {
    for (double ell : {1.0, 0.35, 2.5}) {
        const GaussianRegion r{{1.0, -2.0, 0.5, 3.0}, ell};
        CHECK(std::abs(static_cast<double>(full_moment(r, -1, -1)) - 1.0) < 1e-10);
        for (int mu = 0; mu < 4; ++mu) {
            CHECK(std::abs(static_cast<double>(full_moment(r, mu, -1))) < 1e-12);
            CHECK(std::abs(static_cast<double>(full_moment(r, mu, mu)) - ell * ell) < 1e-10 * ell * ell);
            for (int nu = mu + 1; nu < 4; ++nu) {
                CHECK(std::abs(static_cast<double>(full_moment(r, mu, nu))) < 1e-12);
            }
        }
    }
}

TEST_CASE("moments") {
    const GaussianRegion r{{}, 0.1};
    auto m = moments(r);
    CHECK(m.monopole == 1.0);
    CHECK(m.ricci_trace_correction == 0.0);
    for (int a = 0; a < 4; ++a) {
        CHECK(m.dipole[a] == 0.0);
        for (int b = 0; b < 4; ++b) CHECK(m.quadrupole[a][b] == (a == b ? 0.1 * 0.1 : 0.0));
    }

    Matrix4 zero{};
    auto mz = moments(r, zero);
    CHECK(mz.monopole == 1.0);
    CHECK(mz.quadrupole == m.quadrupole);

    const double rr = 0.8;
    Matrix4 ric{};
    for (int a = 0; a < 4; ++a) ric[a][a] = rr;
    auto mr = moments(r, ric);
    CHECK(mr.monopole == doctest::Approx(1.0 - (0.01 / 6.0) * 4.0 * rr).epsilon(1e-15));
    CHECK(mr.ricci_trace_correction == doctest::Approx(-(0.01 / 6.0) * 4.0 * rr).epsilon(1e-15));

    ric[1][2] = ric[2][1] = NAN;
    CHECK_THROWS_AS(moments(r, ric), DomainError);
    CHECK_THROWS_AS(moments({{}, 0.0}), DomainError);
}
