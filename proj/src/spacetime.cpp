#include "udw/spacetime.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "udw/errors.hpp"

namespace udw {

const char* to_string(Causality c) {
    switch (c) {
        case Causality::spacelike: return "spacelike";
        case Causality::timelike_future: return "timelike_future";
        case Causality::timelike_past: return "timelike_past";
        case Causality::lightlike: return "lightlike";
    }
    return "unknown";
}

Interval interval(const Event& a, const Event& b) {
    Interval iv;
    iv.dt = a.t - b.t;
    iv.dr = std::hypot(a.x - b.x, a.y - b.y, a.z - b.z);
    iv.sigma = 0.5 * (-iv.dt * iv.dt + iv.dr * iv.dr);
    return iv;
}

double default_lightcone_tol(const Interval& iv) {
    return 1e-9 * std::max({std::abs(iv.dt), iv.dr, 1.0});
}

Causality classify(const Event& a, const Event& b, double lightcone_tol) {
    if (!(lightcone_tol >= 0.0)) throw DomainError("classify: lightcone_tol must be non-negative");
    const Interval iv = interval(a, b);
    if (std::abs(iv.sigma) <= lightcone_tol) return Causality::lightlike;
    if (iv.sigma > 0.0) return Causality::spacelike;
    return iv.dt > 0.0 ? Causality::timelike_future : Causality::timelike_past;
}

Causality classify(const Event& a, const Event& b) {
    return classify(a, b, default_lightcone_tol(interval(a, b)));
}

void validate(const LatticeSpec& spec) {
    if (spec.n_space < 1) throw ConfigError("n_space", "must be >= 1");
    if (spec.n_time < 1) throw ConfigError("n_time", "must be >= 1");
    if (!(spec.spacing_space > 0.0) || !std::isfinite(spec.spacing_space))
        throw ConfigError("spacing_space", "must be positive and finite");
    if (!(spec.spacing_time > 0.0) || !std::isfinite(spec.spacing_time))
        throw ConfigError("spacing_time", "must be positive and finite");
    for (double c : spec.origin.coords()) {
        if (!std::isfinite(c)) throw ConfigError("origin", "coordinates must be finite");
    }
}

std::vector<Event> build_lattice(const LatticeSpec& spec) {
    validate(spec);
    const std::size_t n = spec.n_space;
    std::vector<Event> events;
    events.reserve(n * n * n * spec.n_time);
    for (std::size_t it = 0; it < spec.n_time; ++it) {
        for (std::size_t iz = 0; iz < n; ++iz) {
            for (std::size_t iy = 0; iy < n; ++iy) {
                for (std::size_t ix = 0; ix < n; ++ix) {
                    events.push_back({spec.origin.t + spec.spacing_time * static_cast<double>(it),
                                      spec.origin.x + spec.spacing_space * static_cast<double>(ix),
                                      spec.origin.y + spec.spacing_space * static_cast<double>(iy),
                                      spec.origin.z + spec.spacing_space * static_cast<double>(iz)});
                }
            }
        }
    }
    return events;
}

}  // namespace udw
