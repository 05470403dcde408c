#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace udw {

// A spacetime point in inertial coordinates, natural units (c = 1),
// signature (-,+,+,+).
struct Event {
    double t = 0.0;
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    std::array<double, 4> coords() const { return {t, x, y, z}; }
    static Event from_coords(const std::array<double, 4>& c) { return {c[0], c[1], c[2], c[3]}; }

    bool operator==(const Event&) const = default;
};

struct Interval {
    double dt = 0.0;     // a.t - b.t
    double dr = 0.0;     // spatial Euclidean distance, >= 0
    double sigma = 0.0;  // Synge world function (-dt^2 + dr^2) / 2
};

enum class Causality { spacelike, timelike_future, timelike_past, lightlike };

const char* to_string(Causality c);

Interval interval(const Event& a, const Event& b);

// Light-cone tolerance scaled to the separation: 1e-9 * max(|dt|, dr, 1).
double default_lightcone_tol(const Interval& iv);

// Classification of a relative to b. timelike_future means a lies in the
// future light cone of b.
Causality classify(const Event& a, const Event& b, double lightcone_tol);
Causality classify(const Event& a, const Event& b);

struct LatticeSpec {
    std::size_t n_space = 1;
    std::size_t n_time = 1;
    double spacing_space = 1.0;
    double spacing_time = 1.0;
    Event origin{};
};

void validate(const LatticeSpec& spec);

// n_space^3 * n_time events, ordered row-major over (time, z, y, x): time is
// the slowest index so that earlier interactions always carry smaller indices.
std::vector<Event> build_lattice(const LatticeSpec& spec);

}  // namespace udw
