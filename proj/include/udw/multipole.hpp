#pragma once

#include <array>
#include <optional>
#include <vector>

#include "udw/kernels.hpp"
#include "udw/numerics.hpp"
#include "udw/smearing.hpp"

namespace udw {

// Derivatives of the (real part of the) pointlike Wightman function W(a, b):
// index i refers to coordinates of a, j to coordinates of b, components (t, x, y, z).
struct DerivativeBundle {
    double w = 0.0;
    std::array<double, 4> grad_i{};
    std::array<double, 4> grad_j{};
    Matrix4 hess_ii{};
    Matrix4 hess_jj{};
};

// Vacuum: closed forms. Other states: vacuum closed form plus finite differences
// of the state-dependent part (thermal: the whole kernel). Default step
// h = 1e-4 (|dt| + dr). Throws StencilError if a stencil point crosses sigma = 0.
DerivativeBundle derivatives(const FieldState& state, const Event& a, const Event& b,
                             std::optional<double> step = std::nullopt);

struct MultipoleEstimate {
    double value = 0.0;
    double pointlike_term = 0.0;
    double quadrupole_term = 0.0;
    double ricci_term = 0.0;
};

// Smeared W to O(ell^2): W - (ell^2/6) W (tr R_i + tr R_j) + (ell^2/2)(tr_delta W_ii'' + tr_delta W_jj'').
MultipoleEstimate estimate(const FieldState& state, const GaussianRegion& ri, const GaussianRegion& rj,
                           const std::optional<Matrix4>& ricci_i = std::nullopt,
                           const std::optional<Matrix4>& ricci_j = std::nullopt);

struct ConvergencePoint {
    double ell = 0.0;
    double reference = 0.0;  // Re W from momentum quadrature
    double estimate = 0.0;
    double residual = 0.0;   // |reference - estimate|
    bool used = false;       // above the 1e-13 noise floor
};

struct ConvergenceStudy {
    std::vector<ConvergencePoint> points;
    numerics::SlopeFit fit;
};

// Residual of the multipole estimate against quadrature over ell_grid, with a
// log-log slope fit. With include_quadrupole = false the estimate is the
// pointlike term only. Throws DomainError with fewer than 3 usable points.
ConvergenceStudy convergence_study(const FieldState& state, double dt, double dr, const std::vector<double>& ell_grid,
                                   double tol, bool include_quadrupole = true);

numerics::SlopeFit convergence_order(const FieldState& state, double dt, double dr,
                                     const std::vector<double>& ell_grid, double tol, bool include_quadrupole = true);

// Two candidate closed forms for the thermal kernel's small-ell expansion at pure
// spatial separation dx: the leading term with and without a factor 1/pi
// (the ell^2 term pi ell^2 coth(u) / (dx beta^3 sinh^2 u) is common).
struct ThermalSpatialCandidates {
    double as_printed = 0.0;    // coth(u)/(4 beta dx) + ...
    double pi_corrected = 0.0;  // coth(u)/(4 pi beta dx) + ...
};

ThermalSpatialCandidates thermal_spatial_w2_candidates(double beta, double dx, double ell);

}  // namespace udw
