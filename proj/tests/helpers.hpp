#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "lj/potential.hpp"
#include "lj/vec.hpp"

namespace testutil {

// State from bare positions, recentered to the origin, velocities zero.
inline lj::SystemState state_from_positions(std::vector<lj::Vec3> q) {
    lj::Vec3 com{};
    for (const auto& v : q) com += v;
    com *= 1.0 / static_cast<double>(q.size());
    lj::SystemState s;
    for (auto& v : q) s.bodies.push_back({v - com, {}});
    return s;
}

// Random collision-free state with a minimum pairwise separation.
inline lj::SystemState random_state(std::mt19937_64& rng, int n_bodies, double min_sep = 1.0,
                                    double box = 2.5, double v_scale = 0.3) {
    std::uniform_real_distribution<double> pos(-box, box);
    std::uniform_real_distribution<double> vel(-v_scale, v_scale);
    std::vector<lj::Vec3> q;
    while (static_cast<int>(q.size()) < n_bodies) {
        const lj::Vec3 cand{pos(rng), pos(rng), pos(rng)};
        bool ok = true;
        for (const auto& other : q)
            if (lj::norm(cand - other) < min_sep) ok = false;
        if (ok) q.push_back(cand);
    }
    auto s = state_from_positions(q);
    lj::Vec3 vsum{};
    for (auto& b : s.bodies) {
        b.velocity = {vel(rng), vel(rng), vel(rng)};
        vsum += b.velocity;
    }
    vsum *= 1.0 / static_cast<double>(n_bodies);
    for (auto& b : s.bodies) b.velocity -= vsum;
    return s;
}

// Rotation about a random axis (Rodrigues form).
inline lj::Mat3 random_rotation(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    lj::Vec3 axis{u(rng), u(rng), u(rng)};
    while (lj::norm(axis) < 1e-3) axis = {u(rng), u(rng), u(rng)};
    axis *= 1.0 / lj::norm(axis);
    const double angle = M_PI * u(rng);
    const double c = std::cos(angle), s = std::sin(angle);
    lj::Mat3 r;
    const double x = axis.x, y = axis.y, z = axis.z;
    r.m = {{{c + x * x * (1 - c), x * y * (1 - c) - z * s, x * z * (1 - c) + y * s},
            {y * x * (1 - c) + z * s, c + y * y * (1 - c), y * z * (1 - c) - x * s},
            {z * x * (1 - c) - y * s, z * y * (1 - c) + x * s, c + z * z * (1 - c)}}};
    return r;
}

inline lj::SystemState rotate_state(const lj::SystemState& s, const lj::Mat3& r) {
    lj::SystemState out = s;
    for (auto& b : out.bodies) {
        b.position = r * b.position;
        b.velocity = r * b.velocity;
    }
    return out;
}

}  // namespace testutil
