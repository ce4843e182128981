#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "lj/errors.hpp"
#include "lj/potential.hpp"
#include "lj/vec.hpp"

namespace lj {

// Two poles on the z-axis plus a regular N-gon ring in the xy-plane;
// the ThreePlusN family adds one body at the origin.
enum class Family { TwoPlusN, ThreePlusN };

inline std::string to_string(Family f) {
    return f == Family::TwoPlusN ? "2N" : "3N";
}

// The shape parameter domain lambda >= 2 is the one the existence results
// cover; Exploratory admits 1 < lambda < 2 with no guarantees.
enum class Domain { Verified, Exploratory };

namespace detail {

inline void check_lambda(double lambda, Domain domain) {
    if (!std::isfinite(lambda)) throw DomainError("lambda must be finite");
    if (domain == Domain::Verified) {
        if (lambda < 2.0)
            throw DomainError("lambda=" + std::to_string(lambda) +
                              " below the verified domain lambda >= 2");
    } else if (lambda <= 1.0) {
        throw DomainError("lambda=" + std::to_string(lambda) + " must exceed 1");
    }
}

inline void check_ring_count(int n_ring) {
    if (n_ring < 2)
        throw DomainError("n_ring=" + std::to_string(n_ring) + " must be >= 2");
}

}  // namespace detail

// phi(lambda) = sqrt(lambda^2 - 1), the ring radius in units of the pole
// half-distance.
inline double phi(double lambda) { return std::sqrt(lambda * lambda - 1.0); }

// Ring self-interaction constant: (gamma/2) * sum_{j=1}^{N-1} |1 - e^{i w_j}|^-gamma
// with w_j = 2 pi j / N. Uses |1 - e^{iw}| = sqrt(2 - 2 cos w).
inline double theta_sum(double gamma, int n_ring) {
    detail::check_ring_count(n_ring);
    if (!(std::isfinite(gamma)) || gamma <= 0.0)
        throw DomainError("theta_sum: gamma must be positive");
    double s = 0.0;
    for (int j = 1; j < n_ring; ++j) {
        const double w = 2.0 * M_PI * static_cast<double>(j) / static_cast<double>(n_ring);
        const double chord = std::sqrt(2.0 - 2.0 * std::cos(w));
        s += std::pow(chord, -gamma);
    }
    return 0.5 * gamma * s;
}

// Scaled ring radius phi(lambda) * r0 of the two-pole family as a function
// of the shape parameter. Strictly increasing and divergent for lambda >= 2.
inline double g1(double lambda, int n_ring, const PotentialParams& p,
                 Domain domain = Domain::Verified) {
    detail::check_lambda(lambda, domain);
    detail::check_ring_count(n_ring);
    const double a = p.alpha, b = p.beta;
    const double num = b * (2.0 * std::pow(lambda, b + 2.0) + std::pow(2.0, b + 2.0) * n_ring);
    const double den = a * (2.0 * std::pow(lambda, a + 2.0) + std::pow(2.0, a + 2.0) * n_ring);
    return phi(lambda) / (2.0 * lambda) * std::pow(num / den, 1.0 / (b - a));
}

// Same for the family with an additional central body.
inline double g2(double lambda, int n_ring, const PotentialParams& p,
                 Domain domain = Domain::Verified) {
    detail::check_lambda(lambda, domain);
    detail::check_ring_count(n_ring);
    const double a = p.alpha, b = p.beta;
    const double num = b * (std::pow(2.0 * lambda, b + 2.0) + 2.0 * std::pow(lambda, b + 2.0) +
                            std::pow(2.0, b + 2.0) * n_ring);
    const double den = a * (std::pow(2.0 * lambda, a + 2.0) + 2.0 * std::pow(lambda, a + 2.0) +
                            std::pow(2.0, a + 2.0) * n_ring);
    return phi(lambda) / (2.0 * lambda) * std::pow(num / den, 1.0 / (b - a));
}

// Pole half-distance r0 making the pole equation balance: r0 = G(lambda)/phi.
inline double circular_radius(Family family, double lambda, int n_ring, const PotentialParams& p,
                              Domain domain = Domain::Verified) {
    const double g = family == Family::TwoPlusN ? g1(lambda, n_ring, p, domain)
                                                : g2(lambda, n_ring, p, domain);
    return g / phi(lambda);
}

// Geometric configuration of a two-pole ring family at a given scale.
struct RingConfiguration {
    Family family;
    double lambda;   // shape parameter, > 1
    double r0;       // pole half-distance
    int n_ring;      // ring body count N
    PotentialParams params;

    int body_count() const {
        return n_ring + (family == Family::TwoPlusN ? 2 : 3);
    }

    // Body order: pole +z, pole -z, [center], ring k = 1..N at angles 2 pi k / N.
    std::vector<Vec3> positions() const {
        std::vector<Vec3> q;
        q.reserve(static_cast<std::size_t>(body_count()));
        q.push_back({0.0, 0.0, r0});
        q.push_back({0.0, 0.0, -r0});
        if (family == Family::ThreePlusN) q.push_back({0.0, 0.0, 0.0});
        const double ring_r = phi(lambda) * r0;
        for (int k = 1; k <= n_ring; ++k) {
            const double w = 2.0 * M_PI * static_cast<double>(k) / static_cast<double>(n_ring);
            q.push_back({ring_r * std::cos(w), ring_r * std::sin(w), 0.0});
        }
        return q;
    }

    std::size_t first_ring_index() const {
        return family == Family::TwoPlusN ? 2 : 3;
    }
};

// Configuration with an explicitly chosen pole half-distance (used by the
// unit-scale base of the non-circular family).
inline RingConfiguration make_ring_configuration(Family family, double lambda, double r0,
                                                 int n_ring, const PotentialParams& p,
                                                 Domain domain = Domain::Verified) {
    detail::check_lambda(lambda, domain);
    detail::check_ring_count(n_ring);
    if (!(std::isfinite(r0)) || r0 <= 0.0)
        throw DomainError("r0 must be positive, got " + std::to_string(r0));
    return RingConfiguration{family, lambda, r0, n_ring, p};
}

// Configuration at the relative-equilibrium scale.
inline RingConfiguration build_configuration(Family family, double lambda, int n_ring,
                                             const PotentialParams& p,
                                             Domain domain = Domain::Verified) {
    return make_ring_configuration(family, lambda, circular_radius(family, lambda, n_ring, p, domain),
                                   n_ring, p, domain);
}

// Squared angular speed of the rigidly rotating solution; may be negative
// below the existence thresholds.
inline double omega0_squared(Family family, double lambda, int n_ring, const PotentialParams& p,
                             Domain domain = Domain::Verified) {
    const double r0 = circular_radius(family, lambda, n_ring, p, domain);
    const double a = p.alpha, b = p.beta;
    const double ta = theta_sum(a, n_ring);
    const double tb = theta_sum(b, n_ring);
    const double ring_d = phi(lambda) * r0;   // ring body distance from the axis
    const double pole_d = lambda * r0;        // ring-to-pole distance
    double w2 = 2.0 * a * std::pow(pole_d, -(a + 2.0)) - 2.0 * b * std::pow(pole_d, -(b + 2.0));
    if (family == Family::TwoPlusN) {
        w2 += ta * std::pow(ring_d, -(a + 2.0)) - tb * std::pow(ring_d, -(b + 2.0));
    } else {
        // central body sits at distance ring_d from each ring body
        w2 += (ta + a) * std::pow(ring_d, -(a + 2.0)) - (tb + b) * std::pow(ring_d, -(b + 2.0));
    }
    return w2;
}

// Positive branch of the angular speed; the negative branch is the caller's
// negation. Throws if the squared value is negative (precondition breach:
// lambda below the family's existence threshold).
inline double omega0(Family family, double lambda, int n_ring, const PotentialParams& p,
                     Domain domain = Domain::Verified) {
    const double w2 = omega0_squared(family, lambda, n_ring, p, domain);
    if (w2 < 0.0)
        throw ExistenceError("omega0: squared angular speed is negative (" +
                             std::to_string(w2) + ") at lambda=" + std::to_string(lambda),
                             w2);
    return std::sqrt(w2);
}

// Rotation about the z-axis.
inline Mat3 rotation_z(double angle) {
    const double c = std::cos(angle), s = std::sin(angle);
    Mat3 r = Mat3::identity();
    r.m[0][0] = c; r.m[0][1] = -s;
    r.m[1][0] = s; r.m[1][1] = c;
    return r;
}

// A verified relative equilibrium: configuration plus its angular speed.
struct CircularSolution {
    RingConfiguration config;
    double omega0;
};

inline CircularSolution make_circular_solution(Family family, double lambda, int n_ring,
                                               const PotentialParams& p,
                                               Domain domain = Domain::Verified) {
    return CircularSolution{build_configuration(family, lambda, n_ring, p, domain),
                            omega0(family, lambda, n_ring, p, domain)};
}

// State of the rigid rotation at time t: positions E(w0 t) q0, velocities
// w0 x-product with the z-axis (poles and center do not move).
inline SystemState circular_state_at(const CircularSolution& sol, double t) {
    const Mat3 rot = rotation_z(sol.omega0 * t);
    SystemState state;
    state.time = t;
    for (const auto& q0 : sol.config.positions()) {
        const Vec3 q = rot * q0;
        state.bodies.push_back({q, {-sol.omega0 * q.y, sol.omega0 * q.x, 0.0}});
    }
    return state;
}

}  // namespace lj
