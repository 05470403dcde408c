#include "udw/smearing.hpp"

#include <cmath>

#include "udw/errors.hpp"
#include "udw/numerics.hpp"

namespace udw {

void validate(const GaussianRegion& region) {
    if (!(region.ell > 0.0) || !std::isfinite(region.ell)) {
        throw DomainError("GaussianRegion: ell must be positive and finite");
    }
}

double evaluate(const GaussianRegion& region, const Event& x) {
    const double dt = x.t - region.center.t;
    const double dx = x.x - region.center.x;
    const double dy = x.y - region.center.y;
    const double dz = x.z - region.center.z;
    const double l2 = region.ell * region.ell;
    const double norm = 4.0 * numerics::pi * numerics::pi * l2 * l2;
    return std::exp(-(dt * dt + dx * dx + dy * dy + dz * dz) / (2.0 * l2)) / norm;
}

double delta_trace(const Matrix4& m) { return m[0][0] + m[1][1] + m[2][2] + m[3][3]; }

MomentSet moments(const GaussianRegion& region, const std::optional<Matrix4>& ricci) {
    validate(region);
    const double l2 = region.ell * region.ell;
    MomentSet out;
    for (int a = 0; a < 4; ++a) out.quadrupole[a][a] = l2;
    if (ricci) {
        for (const auto& row : *ricci) {
            for (double v : row) {
                if (!std::isfinite(v)) throw DomainError("moments: Ricci entries must be finite");
            }
        }
        out.ricci_trace_correction = -l2 / 6.0 * delta_trace(*ricci);
    }
    out.monopole = 1.0 + out.ricci_trace_correction;
    return out;
}

}  // namespace udw
