#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "lj/errors.hpp"
#include "lj/vec.hpp"

namespace lj {

// Distance below which a pair counts as collided; every consumer treats
// near-collision as invalid input rather than working with huge forces.
inline constexpr double kCollisionCutoff = 1e-12;

// Exponent pair of the generalized Lennard-Jones pair potential
// d^-beta - d^-alpha, repulsive at short range, attractive at long range.
struct PotentialParams {
    double alpha;
    double beta;

    PotentialParams(double a, double b) : alpha(a), beta(b) {
        if (!(std::isfinite(a) && std::isfinite(b)) || !(0.0 < a) || !(a < b))
            throw DomainError("PotentialParams: need 0 < alpha < beta, got alpha=" +
                              std::to_string(a) + " beta=" + std::to_string(b));
    }

    // Distance at which the pair force changes sign.
    double force_balance_distance() const {
        return std::pow(beta / alpha, 1.0 / (beta - alpha));
    }
};

// Scalar factor beta/d^(beta+2) - alpha/d^(alpha+2) multiplying (q_k - q_j)
// in the equations of motion. Positive (repulsive) below the force-balance
// distance, negative beyond it.
inline double pair_kernel(double d, const PotentialParams& p) {
    if (!std::isfinite(d) || d <= 0.0)
        throw DomainError("pair_kernel: distance must be finite and positive, got " +
                          std::to_string(d));
    return p.beta * std::pow(d, -(p.beta + 2.0)) - p.alpha * std::pow(d, -(p.alpha + 2.0));
}

struct BodyState {
    Vec3 position;
    Vec3 velocity;
};

// Full system snapshot. All masses are 1 and the center of mass is pinned
// to the origin.
struct SystemState {
    std::vector<BodyState> bodies;
    double time = 0.0;
};

inline void validate_state(const SystemState& state) {
    if (state.bodies.size() < 2)
        throw DomainError("SystemState: need at least 2 bodies, got " +
                          std::to_string(state.bodies.size()));
    Vec3 com{};
    for (const auto& b : state.bodies) {
        if (!is_finite(b.position) || !is_finite(b.velocity))
            throw DomainError("SystemState: non-finite component");
        com += b.position;
    }
    com *= 1.0 / static_cast<double>(state.bodies.size());
    if (norm(com) > 1e-9)
        throw DomainError("SystemState: center of mass off origin by " +
                          std::to_string(norm(com)));
    const std::size_t n = state.bodies.size();
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t j = k + 1; j < n; ++j)
            if (norm(state.bodies[k].position - state.bodies[j].position) < kCollisionCutoff)
                throw SingularityError("SystemState: bodies " + std::to_string(k) + " and " +
                                       std::to_string(j) + " coincide");
}

namespace detail {

inline double pair_distance_checked(const Vec3& a, const Vec3& b, std::size_t k, std::size_t j) {
    const double d = norm(a - b);
    if (d < kCollisionCutoff)
        throw SingularityError("near-collision between bodies " + std::to_string(k) + " and " +
                               std::to_string(j) + " (d=" + std::to_string(d) + ")");
    return d;
}

// Gradient of U over bare position arrays; shared by the state-level API and
// the integrator right-hand side.
inline std::vector<Vec3> gradient_positions(const std::vector<Vec3>& q, const PotentialParams& p) {
    const std::size_t n = q.size();
    std::vector<Vec3> g(n);
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t j = k + 1; j < n; ++j) {
            const Vec3 diff = q[k] - q[j];
            const double d = pair_distance_checked(q[k], q[j], k, j);
            const double coeff =
                p.alpha * std::pow(d, -(p.alpha + 2.0)) - p.beta * std::pow(d, -(p.beta + 2.0));
            const Vec3 contrib = coeff * diff;
            g[k] += contrib;
            g[j] -= contrib;
        }
    }
    return g;
}

inline std::vector<Vec3> accelerations_positions(const std::vector<Vec3>& q,
                                                 const PotentialParams& p) {
    auto g = gradient_positions(q, p);
    for (auto& v : g) v = -v;
    return g;
}

}  // namespace detail

// U(q) = sum over pairs of |q_k - q_j|^-beta - |q_k - q_j|^-alpha.
inline double potential_energy(const SystemState& state, const PotentialParams& p) {
    validate_state(state);
    const std::size_t n = state.bodies.size();
    double u = 0.0;
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t j = k + 1; j < n; ++j) {
            const double d = detail::pair_distance_checked(state.bodies[k].position,
                                                           state.bodies[j].position, k, j);
            u += std::pow(d, -p.beta) - std::pow(d, -p.alpha);
        }
    return u;
}

// dU/dq_k for every body; the per-pair contributions cancel in the total,
// so the components sum to the zero vector.
inline std::vector<Vec3> gradient(const SystemState& state, const PotentialParams& p) {
    validate_state(state);
    std::vector<Vec3> q(state.bodies.size());
    for (std::size_t i = 0; i < q.size(); ++i) q[i] = state.bodies[i].position;
    return detail::gradient_positions(q, p);
}

// Accelerations as -dU/dq_k.
inline std::vector<Vec3> accelerations(const SystemState& state, const PotentialParams& p) {
    auto g = gradient(state, p);
    for (auto& v : g) v = -v;
    return g;
}

// Accelerations assembled directly from the pairwise kernel. Kept as a
// second code path so the sign conventions of the two formulations stay
// machine-checked against each other.
inline std::vector<Vec3> accelerations_pairwise(const SystemState& state,
                                                const PotentialParams& p) {
    validate_state(state);
    const std::size_t n = state.bodies.size();
    std::vector<Vec3> acc(n);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t j = 0; j < n; ++j) {
            if (j == k) continue;
            const Vec3 diff = state.bodies[k].position - state.bodies[j].position;
            const double d = detail::pair_distance_checked(state.bodies[k].position,
                                                           state.bodies[j].position, k, j);
            acc[k] += pair_kernel(d, p) * diff;
        }
    return acc;
}

}  // namespace lj
