#pragma once

#include <array>
#include <optional>

#include "udw/spacetime.hpp"

namespace udw {

using Matrix4 = std::array<std::array<double, 4>, 4>;

// Isotropic spacetime Gaussian coupling region of width ell around center:
//   exp(-((t-t0)^2 + |x-x0|^2) / (2 ell^2)) / ((2 pi)^2 ell^4)
struct GaussianRegion {
    Event center{};
    double ell = 1.0;
};

void validate(const GaussianRegion& region);

struct MomentSet {
    double monopole = 1.0;
    std::array<double, 4> dipole{};
    Matrix4 quadrupole{};
    // -(ell^2/6) * sum_a R_aa; already folded into monopole.
    double ricci_trace_correction = 0.0;
};

double evaluate(const GaussianRegion& region, const Event& x);

// Moments to O(ell^2): monopole 1 - (ell^2/6) tr_delta(R), dipole 0,
// quadrupole ell^2 * identity. The Ricci tensor is in Riemann normal
// coordinates at the center; absent means flat.
MomentSet moments(const GaussianRegion& region, const std::optional<Matrix4>& ricci = std::nullopt);

// Euclidean trace sum_a R_aa (contraction with delta, not the metric).
double delta_trace(const Matrix4& m);

}  // namespace udw
