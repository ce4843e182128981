#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "lj/errors.hpp"
#include "lj/potential.hpp"
#include "lj/vec.hpp"

namespace lj {

enum class Method { FixedRk4, AdaptiveRk };

struct IntegrationSettings {
    Method method = Method::AdaptiveRk;
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double max_step = 0.1;
    double t_end = 1.0;
};

inline void validate_settings(const IntegrationSettings& s) {
    if (!(s.rel_tol > 0.0 && s.rel_tol < 1.0) || !(s.abs_tol > 0.0 && s.abs_tol < 1.0))
        throw DomainError("IntegrationSettings: tolerances must lie in (0, 1)");
    if (!(s.t_end > 0.0)) throw DomainError("IntegrationSettings: t_end must be positive");
    if (!(s.max_step > 0.0)) throw DomainError("IntegrationSettings: max_step must be positive");
}

// Kinetic plus pair potential energy (all masses 1).
inline double total_energy(const SystemState& state, const PotentialParams& p) {
    double kinetic = 0.0;
    for (const auto& b : state.bodies) kinetic += 0.5 * dot(b.velocity, b.velocity);
    return kinetic + potential_energy(state, p);
}

// Total angular momentum sum q_k x v_k.
inline Vec3 angular_momentum(const SystemState& state) {
    Vec3 l{};
    for (const auto& b : state.bodies) l += cross(b.position, b.velocity);
    return l;
}

struct TrajectorySample {
    double time;
    SystemState state;
    double energy;
    Vec3 angular_momentum;
};

namespace detail {

// Phase-space vector layout: positions for all bodies, then velocities.
inline std::vector<double> flatten(const SystemState& state) {
    std::vector<double> y;
    y.reserve(state.bodies.size() * 6);
    for (const auto& b : state.bodies) {
        y.push_back(b.position.x);
        y.push_back(b.position.y);
        y.push_back(b.position.z);
    }
    for (const auto& b : state.bodies) {
        y.push_back(b.velocity.x);
        y.push_back(b.velocity.y);
        y.push_back(b.velocity.z);
    }
    return y;
}

inline SystemState unflatten(const std::vector<double>& y, double t) {
    const std::size_t n = y.size() / 6;
    SystemState s;
    s.time = t;
    s.bodies.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        s.bodies[i].position = {y[3 * i], y[3 * i + 1], y[3 * i + 2]};
        s.bodies[i].velocity = {y[3 * n + 3 * i], y[3 * n + 3 * i + 1], y[3 * n + 3 * i + 2]};
    }
    return s;
}

class NBodyRhs {
public:
    explicit NBodyRhs(const PotentialParams& p, std::size_t n) : params_(p), q_(n) {}

    void operator()(const std::vector<double>& y, std::vector<double>& dydt) const {
        const std::size_t n = q_.size();
        for (std::size_t i = 0; i < n; ++i)
            q_[i] = {y[3 * i], y[3 * i + 1], y[3 * i + 2]};
        const auto acc = accelerations_positions(q_, params_);
        dydt.resize(y.size());
        for (std::size_t i = 0; i < 3 * n; ++i) dydt[i] = y[3 * n + i];
        for (std::size_t i = 0; i < n; ++i) {
            dydt[3 * n + 3 * i] = acc[i].x;
            dydt[3 * n + 3 * i + 1] = acc[i].y;
            dydt[3 * n + 3 * i + 2] = acc[i].z;
        }
    }

private:
    PotentialParams params_;
    mutable std::vector<Vec3> q_;
};

template <class RHS>
void rk4_step(const RHS& rhs, std::vector<double>& y, double h, std::vector<double>& k1,
              std::vector<double>& k2, std::vector<double>& k3, std::vector<double>& k4,
              std::vector<double>& tmp) {
    const std::size_t n = y.size();
    rhs(y, k1);
    tmp.resize(n);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
    rhs(tmp, k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
    rhs(tmp, k3);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * k3[i];
    rhs(tmp, k4);
    for (std::size_t i = 0; i < n; ++i)
        y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

// Dormand-Prince 5(4) coefficients.
struct Dopri {
    static constexpr double A21 = 1.0 / 5.0;
    static constexpr double A31 = 3.0 / 40.0, A32 = 9.0 / 40.0;
    static constexpr double A41 = 44.0 / 45.0, A42 = -56.0 / 15.0, A43 = 32.0 / 9.0;
    static constexpr double A51 = 19372.0 / 6561.0, A52 = -25360.0 / 2187.0,
                            A53 = 64448.0 / 6561.0, A54 = -212.0 / 729.0;
    static constexpr double A61 = 9017.0 / 3168.0, A62 = -355.0 / 33.0, A63 = 46732.0 / 5247.0,
                            A64 = 49.0 / 176.0, A65 = -5103.0 / 18656.0;
    static constexpr double B1 = 35.0 / 384.0, B3 = 500.0 / 1113.0, B4 = 125.0 / 192.0,
                            B5 = -2187.0 / 6784.0, B6 = 11.0 / 84.0;
    static constexpr double E1 = 71.0 / 57600.0, E3 = -71.0 / 16695.0, E4 = 71.0 / 1920.0,
                            E5 = -17253.0 / 339200.0, E6 = 22.0 / 525.0, E7 = -1.0 / 40.0;
};

}  // namespace detail

// Integrates the full system q'' = -grad U from the given state, emitting a
// sample per accepted step (fixed classical RK4 or an embedded adaptive
// Runge-Kutta pair). Aborts with IntegrationError on step underflow near
// close encounters.
inline std::vector<TrajectorySample> integrate(const SystemState& initial,
                                               const PotentialParams& p,
                                               const IntegrationSettings& settings) {
    validate_state(initial);
    validate_settings(settings);
    const std::size_t n_bodies = initial.bodies.size();
    detail::NBodyRhs rhs(p, n_bodies);

    std::vector<TrajectorySample> out;
    const auto emit = [&](double t, const std::vector<double>& y) {
        SystemState s = detail::unflatten(y, t);
        out.push_back({t, s, total_energy(s, p), angular_momentum(s)});
    };

    std::vector<double> y = detail::flatten(initial);
    emit(0.0, y);

    if (settings.method == Method::FixedRk4) {
        std::vector<double> k1, k2, k3, k4, tmp;
        double t = 0.0;
        while (t < settings.t_end - 1e-15 * settings.t_end) {
            const double h = std::min(settings.max_step, settings.t_end - t);
            detail::rk4_step(rhs, y, h, k1, k2, k3, k4, tmp);
            t += h;
            emit(t, y);
        }
        return out;
    }

    using D = detail::Dopri;
    const std::size_t dim = y.size();
    std::vector<double> k1(dim), k2(dim), k3(dim), k4(dim), k5(dim), k6(dim), k7(dim), tmp(dim),
        y_new(dim);
    double t = 0.0;
    double h = std::min(settings.max_step, settings.t_end * 1e-3);
    rhs(y, k1);
    while (t < settings.t_end) {
        h = std::min(h, settings.t_end - t);
        for (std::size_t i = 0; i < dim; ++i) tmp[i] = y[i] + h * D::A21 * k1[i];
        rhs(tmp, k2);
        for (std::size_t i = 0; i < dim; ++i)
            tmp[i] = y[i] + h * (D::A31 * k1[i] + D::A32 * k2[i]);
        rhs(tmp, k3);
        for (std::size_t i = 0; i < dim; ++i)
            tmp[i] = y[i] + h * (D::A41 * k1[i] + D::A42 * k2[i] + D::A43 * k3[i]);
        rhs(tmp, k4);
        for (std::size_t i = 0; i < dim; ++i)
            tmp[i] = y[i] + h * (D::A51 * k1[i] + D::A52 * k2[i] + D::A53 * k3[i] + D::A54 * k4[i]);
        rhs(tmp, k5);
        for (std::size_t i = 0; i < dim; ++i)
            tmp[i] = y[i] + h * (D::A61 * k1[i] + D::A62 * k2[i] + D::A63 * k3[i] +
                                 D::A64 * k4[i] + D::A65 * k5[i]);
        rhs(tmp, k6);
        for (std::size_t i = 0; i < dim; ++i)
            y_new[i] = y[i] + h * (D::B1 * k1[i] + D::B3 * k3[i] + D::B4 * k4[i] +
                                   D::B5 * k5[i] + D::B6 * k6[i]);
        rhs(y_new, k7);
        double err = 0.0;
        for (std::size_t i = 0; i < dim; ++i) {
            const double e = h * (D::E1 * k1[i] + D::E3 * k3[i] + D::E4 * k4[i] + D::E5 * k5[i] +
                                  D::E6 * k6[i] + D::E7 * k7[i]);
            const double sc =
                settings.abs_tol +
                settings.rel_tol * std::max(std::abs(y[i]), std::abs(y_new[i]));
            err += (e / sc) * (e / sc);
        }
        err = std::sqrt(err / static_cast<double>(dim));
        if (err <= 1.0) {
            t += h;
            y.swap(y_new);
            k1.swap(k7);  // first-same-as-last
            emit(t, y);
        }
        const double factor = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
        h *= std::min(5.0, std::max(0.2, factor));
        h = std::min(h, settings.max_step);
        if (h < 1e-14 * std::max(1.0, std::abs(t)))
            throw IntegrationError("integrate: step underflow at t=" + std::to_string(t), t);
    }
    return out;
}

}  // namespace lj
