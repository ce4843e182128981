#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "lj/configurations.hpp"
#include "lj/errors.hpp"
#include "lj/integrator.hpp"
#include "lj/potential.hpp"
#include "lj/radial.hpp"
#include "lj/vec.hpp"

namespace lj {

enum class GeometryClass { Planar, FlatNonplanar, Spatial };

inline std::string to_string(GeometryClass g) {
    switch (g) {
        case GeometryClass::Planar: return "planar";
        case GeometryClass::FlatNonplanar: return "flat_nonplanar";
        default: return "spatial";
    }
}

struct VerificationReport {
    double residual_max = 0.0;
    double energy_drift = 0.0;
    double angmom_drift = 0.0;
    GeometryClass geometry = GeometryClass::Spatial;
    bool shape_preserved = true;
    bool passed = false;
    std::map<std::string, double> tolerances;
};

namespace detail {

// Eigenvalues (ascending) and eigenvectors of a symmetric 3x3 matrix by
// cyclic Jacobi sweeps.
inline void symmetric_eigen3(const Mat3& A, std::array<double, 3>& values, Mat3& vectors) {
    Mat3 a = A;
    vectors = Mat3::identity();
    for (int sweep = 0; sweep < 50; ++sweep) {
        double off = std::abs(a.m[0][1]) + std::abs(a.m[0][2]) + std::abs(a.m[1][2]);
        if (off < 1e-300) break;
        for (int pi = 0; pi < 3; ++pi)
            for (int qi = pi + 1; qi < 3; ++qi) {
                if (std::abs(a.m[pi][qi]) < 1e-300) continue;
                const double theta = (a.m[qi][qi] - a.m[pi][pi]) / (2.0 * a.m[pi][qi]);
                const double sign = theta >= 0.0 ? 1.0 : -1.0;
                const double tt = sign / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(tt * tt + 1.0);
                const double s = tt * c;
                Mat3 rot = Mat3::identity();
                rot.m[pi][pi] = c;
                rot.m[qi][qi] = c;
                rot.m[pi][qi] = s;
                rot.m[qi][pi] = -s;
                // a = rot^T a rot
                Mat3 at;
                for (int i = 0; i < 3; ++i)
                    for (int j = 0; j < 3; ++j) {
                        double v = 0.0;
                        for (int k = 0; k < 3; ++k)
                            for (int l = 0; l < 3; ++l)
                                v += rot.m[k][i] * a.m[k][l] * rot.m[l][j];
                        at.m[i][j] = v;
                    }
                a = at;
                vectors = vectors * rot;
            }
    }
    std::array<int, 3> order{0, 1, 2};
    std::sort(order.begin(), order.end(),
              [&](int i, int j) { return a.m[i][i] < a.m[j][j]; });
    Mat3 sorted_vecs;
    for (int i = 0; i < 3; ++i) {
        values[i] = a.m[order[i]][order[i]];
        for (int r = 0; r < 3; ++r) sorted_vecs.m[r][i] = vectors.m[r][order[i]];
    }
    vectors = sorted_vecs;
}

inline double configuration_diameter(const std::vector<Vec3>& q) {
    double d = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i)
        for (std::size_t j = i + 1; j < q.size(); ++j) d = std::max(d, norm(q[i] - q[j]));
    return d;
}

// Singular values (ascending) of the centered 3 x n position matrix by
// one-sided Jacobi row orthogonalization. Works on the matrix itself, not
// its Gram matrix, so a tiny smallest value is resolved to machine epsilon
// of the largest one instead of its square root.
inline std::array<double, 3> centered_singular_values(const std::vector<Vec3>& q) {
    Vec3 centroid{};
    for (const auto& v : q) centroid += v;
    centroid *= 1.0 / static_cast<double>(q.size());
    const std::size_t n = q.size();
    std::array<std::vector<double>, 3> rows;
    for (auto& row : rows) row.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const Vec3 d = q[k] - centroid;
        rows[0][k] = d.x;
        rows[1][k] = d.y;
        rows[2][k] = d.z;
    }
    for (int sweep = 0; sweep < 60; ++sweep) {
        bool rotated = false;
        for (int i = 0; i < 3; ++i)
            for (int j = i + 1; j < 3; ++j) {
                double aa = 0.0, bb = 0.0, ab = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    aa += rows[i][k] * rows[i][k];
                    bb += rows[j][k] * rows[j][k];
                    ab += rows[i][k] * rows[j][k];
                }
                if (ab * ab <= 1e-62 * aa * bb || ab == 0.0) continue;
                rotated = true;
                const double tau = (bb - aa) / (2.0 * ab);
                const double sgn = tau >= 0.0 ? 1.0 : -1.0;
                const double t = sgn / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (std::size_t k = 0; k < n; ++k) {
                    const double ri = rows[i][k], rj = rows[j][k];
                    rows[i][k] = c * ri - s * rj;
                    rows[j][k] = s * ri + c * rj;
                }
            }
        if (!rotated) break;
    }
    std::array<double, 3> sv;
    for (int i = 0; i < 3; ++i) {
        double sum = 0.0;
        for (std::size_t k = 0; k < n; ++k) sum += rows[i][k] * rows[i][k];
        sv[i] = std::sqrt(sum);
    }
    std::sort(sv.begin(), sv.end());
    return sv;
}

// Smallest singular value of the centered position cloud, normalized by the
// configuration diameter. Zero means exactly coplanar.
inline double thinness(const std::vector<Vec3>& q) {
    const double diam = configuration_diameter(q);
    if (diam <= 0.0) return 0.0;
    return centered_singular_values(q)[0] / diam;
}

inline constexpr double kCoplanarTol = 1e-9;

}  // namespace detail

// Max-over-bodies residual of the relative-equilibrium balance
// diag(-w0^2, -w0^2, 0) q + grad U(q) = 0, normalized by max(1, |grad U|).
inline double circular_residual(const CircularSolution& sol) {
    const SystemState state = circular_state_at(sol, 0.0);
    const auto grad = gradient(state, sol.config.params);
    const double w2 = sol.omega0 * sol.omega0;
    double res = 0.0, gmax = 0.0;
    for (std::size_t k = 0; k < grad.size(); ++k) {
        const Vec3 q = state.bodies[k].position;
        const Vec3 r{-w2 * q.x + grad[k].x, -w2 * q.y + grad[k].y, grad[k].z};
        res = std::max(res, norm(r));
        gmax = std::max(gmax, norm(grad[k]));
    }
    return res / std::max(1.0, gmax);
}

// Max position distance between an analytic trajectory and integrator output
// on matching time grids.
inline double trajectory_deviation(const std::vector<SystemState>& analytic,
                                   const std::vector<TrajectorySample>& integrated) {
    if (analytic.size() != integrated.size())
        throw DomainError("trajectory_deviation: sample counts differ (" +
                          std::to_string(analytic.size()) + " vs " +
                          std::to_string(integrated.size()) + ")");
    double dev = 0.0;
    for (std::size_t i = 0; i < analytic.size(); ++i) {
        if (std::abs(analytic[i].time - integrated[i].time) >
            1e-9 * std::max(1.0, std::abs(integrated[i].time)))
            throw DomainError("trajectory_deviation: time grids differ at index " +
                              std::to_string(i));
        if (analytic[i].bodies.size() != integrated[i].state.bodies.size())
            throw DomainError("trajectory_deviation: body counts differ");
        for (std::size_t k = 0; k < analytic[i].bodies.size(); ++k)
            dev = std::max(dev, norm(analytic[i].bodies[k].position -
                                     integrated[i].state.bodies[k].position));
    }
    return dev;
}

// Coplanarity classification of a trajectory: flat at an instant when the
// centered position cloud is rank-2 (normalized smallest singular value
// below 1e-9); planar when one fixed plane additionally fits all instants.
inline GeometryClass classify_geometry(const std::vector<SystemState>& states) {
    if (states.empty()) throw DomainError("classify_geometry: empty sequence");
    bool all_flat = true;
    std::vector<Vec3> pooled;
    for (const auto& s : states) {
        std::vector<Vec3> q;
        q.reserve(s.bodies.size());
        for (const auto& b : s.bodies) q.push_back(b.position);
        if (detail::thinness(q) >= detail::kCoplanarTol) all_flat = false;
        pooled.insert(pooled.end(), q.begin(), q.end());
    }
    if (!all_flat) return GeometryClass::Spatial;
    return detail::thinness(pooled) < detail::kCoplanarTol ? GeometryClass::Planar
                                                           : GeometryClass::FlatNonplanar;
}

namespace detail {

inline bool is_rhombus(const std::vector<Vec3>& pts, Vec3* intersection = nullptr) {
    if (pts.size() != 4) return false;
    if (thinness(pts) >= kCoplanarTol) return false;
    Vec3 centroid{};
    for (const auto& v : pts) centroid += v;
    centroid *= 0.25;
    // orthonormal in-plane basis from the two dominant principal axes
    Mat3 cov{};
    for (const auto& v : pts) {
        const Vec3 d = v - centroid;
        const double comp[3] = {d.x, d.y, d.z};
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) cov.m[i][j] += comp[i] * comp[j];
    }
    std::array<double, 3> vals;
    Mat3 vecs;
    symmetric_eigen3(cov, vals, vecs);
    const Vec3 e1{vecs.m[0][2], vecs.m[1][2], vecs.m[2][2]};
    const Vec3 e2{vecs.m[0][1], vecs.m[1][1], vecs.m[2][1]};
    // vertex order around the centroid
    std::array<int, 4> order{0, 1, 2, 3};
    std::array<double, 4> angle;
    for (int i = 0; i < 4; ++i) {
        const Vec3 d = pts[static_cast<std::size_t>(i)] - centroid;
        angle[i] = std::atan2(dot(d, e2), dot(d, e1));
    }
    std::sort(order.begin(), order.end(), [&](int i, int j) { return angle[i] < angle[j]; });
    std::array<double, 4> side;
    double mean = 0.0;
    for (int i = 0; i < 4; ++i) {
        side[i] = norm(pts[static_cast<std::size_t>(order[i])] -
                       pts[static_cast<std::size_t>(order[(i + 1) % 4])]);
        mean += 0.25 * side[i];
    }
    if (mean <= 0.0) return false;
    for (double s : side)
        if (std::abs(s - mean) > 1e-9 * mean) return false;
    if (intersection) *intersection = centroid;  // rhombus diagonals bisect
    return true;
}

}  // namespace detail

// Residual of the full equations of motion along a reconstructed
// non-circular homographic trajectory: the acceleration is assembled
// analytically from (r_dot, r_ddot = -Psi'(r), omega_dot, omega_ddot) and
// compared against -grad U, normalized by max(1, |grad U|); omega_ddot
// comes from differentiating the squared angular rate along the orbit, with
// the rate treated as stationary where it vanishes (the cap boundary).
inline double homographic_residual(const RadialOrbit& orbit, const RingConfiguration& base) {
    const auto states = reconstruct_homographic(orbit, base);
    const auto q0 = base.positions();
    double worst = 0.0;
    for (std::size_t i = 0; i < states.size(); ++i) {
        const auto& s = orbit.samples[i];
        const double r_ddot =
            -effective_potential_derivative(s.r, orbit.lambda, orbit.n_ring, orbit.params);
        const double w2 = omega_dot_squared(s.r, orbit.lambda, orbit.n_ring, orbit.params);
        const double w_dot = std::sqrt(std::max(w2, 0.0));
        const double w2_slope =
            omega_dot_squared_derivative(s.r, orbit.lambda, orbit.n_ring, orbit.params);
        const double w_ddot = w_dot > 1e-12 ? w2_slope * s.r_dot / (2.0 * w_dot) : 0.0;
        const auto grad = gradient(states[i], orbit.params);
        const Mat3 rot = rotation_z(s.omega);
        double res = 0.0, gmax = 0.0;
        const double radial_coef = r_ddot - s.r * w2;
        const double tangent_coef = 2.0 * s.r_dot * w_dot + s.r * w_ddot;
        for (std::size_t k = 0; k < q0.size(); ++k) {
            const Vec3 u = rot * q0[k];
            const Vec3 acc{radial_coef * u.x - tangent_coef * u.y,
                           radial_coef * u.y + tangent_coef * u.x, r_ddot * u.z};
            res = std::max(res, norm(acc + grad[k]));
            gmax = std::max(gmax, norm(grad[k]));
        }
        worst = std::max(worst, res / std::max(1.0, gmax));
    }
    return worst;
}

// True when the four (outer) bodies form an equal-sided quadrilateral; with
// with_center, one of five bodies must additionally sit at the intersection
// of the diagonals of the other four.
inline bool rhombus_check(const SystemState& state, bool with_center) {
    const std::size_t expected = with_center ? 5 : 4;
    if (state.bodies.size() != expected)
        throw DomainError("rhombus_check: expected " + std::to_string(expected) +
                          " bodies, got " + std::to_string(state.bodies.size()));
    std::vector<Vec3> all;
    for (const auto& b : state.bodies) all.push_back(b.position);
    if (!with_center) return detail::is_rhombus(all);
    for (std::size_t c = 0; c < 5; ++c) {
        std::vector<Vec3> outer;
        for (std::size_t i = 0; i < 5; ++i)
            if (i != c) outer.push_back(all[i]);
        Vec3 inter;
        if (!detail::is_rhombus(outer, &inter)) continue;
        const double diam = detail::configuration_diameter(outer);
        if (norm(all[c] - inter) <= 1e-9 * diam) return true;
    }
    return false;
}

}  // namespace lj
