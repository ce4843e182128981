#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "lj/configurations.hpp"
#include "lj/errors.hpp"
#include "lj/potential.hpp"
#include "lj/thresholds.hpp"

namespace lj {

namespace detail {

// Coefficients of the reduced radial system at unit pole scale:
//   Psi(r)  = pot_b r^-(b+1) - pot_a r^-(a+1)
//   Psi'(r) = force_a r^-(a+2) - force_b r^-(b+2)
struct RadialCoeffs {
    double pot_a, pot_b;
    double force_a, force_b;
    double alpha, beta;
};

inline RadialCoeffs radial_coeffs(double lambda, int n_ring, const PotentialParams& p) {
    check_lambda(lambda, Domain::Exploratory);
    check_ring_count(n_ring);
    const double a = p.alpha, b = p.beta;
    const double ca = (n_ring * std::pow(2.0, a + 2.0) + 2.0 * std::pow(lambda, a + 2.0)) /
                      std::pow(2.0 * lambda, a + 2.0);
    const double cb = (n_ring * std::pow(2.0, b + 2.0) + 2.0 * std::pow(lambda, b + 2.0)) /
                      std::pow(2.0 * lambda, b + 2.0);
    return {a * ca / (a + 1.0), b * cb / (b + 1.0), a * ca, b * cb, a, b};
}

inline void check_radius(double r) {
    if (!(std::isfinite(r)) || r <= 0.0)
        throw DomainError("radius must be positive, got " + std::to_string(r));
}

inline double psi_value(const RadialCoeffs& c, double r) {
    return c.pot_b * std::pow(r, -(c.beta + 1.0)) - c.pot_a * std::pow(r, -(c.alpha + 1.0));
}

inline double psi_slope(const RadialCoeffs& c, double r) {
    return c.force_a * std::pow(r, -(c.alpha + 2.0)) - c.force_b * std::pow(r, -(c.beta + 2.0));
}

// Psi(s + delta) - Psi(s) without the catastrophic cancellation of
// subtracting two nearly equal potentials: each power-law difference is
// taken through expm1/log1p, which keeps full relative accuracy for small
// delta. The offset is passed explicitly because near a turning point the
// radius itself cannot represent offsets below one ulp of r, while the
// energy window can be ~1e-12 deep on top of |Psi| ~ 0.1.
inline double psi_diff_at_offset(const RadialCoeffs& c, double s, double delta) {
    const double u = std::log1p(delta / s);
    const double term_b = c.pot_b * std::pow(s, -(c.beta + 1.0)) * std::expm1(-(c.beta + 1.0) * u);
    const double term_a =
        c.pot_a * std::pow(s, -(c.alpha + 1.0)) * std::expm1(-(c.alpha + 1.0) * u);
    return term_b - term_a;
}

// Psi(r) - Psi(s) for r, s within a factor of two of each other (the
// subtraction r - s is then exact).
inline double psi_diff(const RadialCoeffs& c, double r, double s) {
    return psi_diff_at_offset(c, s, r - s);
}

}  // namespace detail

// Effective potential of the scale factor of the non-circular family at
// unit pole scale.
inline double effective_potential(double r, double lambda, int n_ring, const PotentialParams& p) {
    detail::check_radius(r);
    return detail::psi_value(detail::radial_coeffs(lambda, n_ring, p), r);
}

// d/dr of the effective potential, in collected form.
inline double effective_potential_derivative(double r, double lambda, int n_ring,
                                             const PotentialParams& p) {
    detail::check_radius(r);
    return detail::psi_slope(detail::radial_coeffs(lambda, n_ring, p), r);
}

// Same derivative split into the per-pair terms (ring-to-pole and pole-pair
// contributions). Agrees with the collected form identically; both code
// paths are kept and cross-checked.
inline double effective_potential_derivative_pair_form(double r, double lambda, int n_ring,
                                                       const PotentialParams& p) {
    detail::check_radius(r);
    detail::check_lambda(lambda, Domain::Exploratory);
    detail::check_ring_count(n_ring);
    const double a = p.alpha, b = p.beta;
    const double n = static_cast<double>(n_ring);
    return n * a * std::pow(lambda * r, -(a + 2.0)) + 2.0 * a * std::pow(2.0 * r, -(a + 2.0)) -
           n * b * std::pow(lambda * r, -(b + 2.0)) - 2.0 * b * std::pow(2.0 * r, -(b + 2.0));
}

// Squared angular rate required of the non-circular family at scale r; may
// be negative, in which case no real rotation rate exists (r beyond the cap
// radius).
inline double omega_dot_squared(double r, double lambda, int n_ring, const PotentialParams& p) {
    detail::check_radius(r);
    detail::check_lambda(lambda, Domain::Exploratory);
    detail::check_ring_count(n_ring);
    const double a = p.alpha, b = p.beta;
    const double f = phi(lambda);
    const double ta = theta_sum(a, n_ring);
    const double tb = theta_sum(b, n_ring);
    const double n2 = static_cast<double>(n_ring - 2);
    return n2 * b * std::pow(lambda * r, -(b + 2.0)) - n2 * a * std::pow(lambda * r, -(a + 2.0)) +
           2.0 * b * std::pow(2.0 * r, -(b + 2.0)) - 2.0 * a * std::pow(2.0 * r, -(a + 2.0)) -
           tb * std::pow(f * r, -(b + 2.0)) + ta * std::pow(f * r, -(a + 2.0));
}

// d/dr of the squared angular rate; used when differentiating the angular
// profile along an orbit.
inline double omega_dot_squared_derivative(double r, double lambda, int n_ring,
                                           const PotentialParams& p) {
    detail::check_radius(r);
    detail::check_lambda(lambda, Domain::Exploratory);
    detail::check_ring_count(n_ring);
    const double a = p.alpha, b = p.beta;
    const double f = phi(lambda);
    const double ta = theta_sum(a, n_ring);
    const double tb = theta_sum(b, n_ring);
    const double n2 = static_cast<double>(n_ring - 2);
    const double ca = a + 2.0, cb = b + 2.0;
    return (-cb / r) * (n2 * b * std::pow(lambda * r, -cb) + 2.0 * b * std::pow(2.0 * r, -cb) -
                        tb * std::pow(f * r, -cb)) -
           (-ca / r) * (n2 * a * std::pow(lambda * r, -ca) + 2.0 * a * std::pow(2.0 * r, -ca) -
                        ta * std::pow(f * r, -ca));
}

struct TurningPoints {
    double r_min;
    double r_max;
};

// The two roots of Psi(r) = h around the equilibrium radius. The outer root
// is found on the bare potential; the inner root is then refined against the
// outer one with the cancellation-free difference so the pair is
// energy-consistent to machine precision.
inline TurningPoints turning_points(double h, double lambda, int n_ring,
                                    const PotentialParams& p) {
    const auto c = detail::radial_coeffs(lambda, n_ring, p);
    const double rb = equilibrium_radius(lambda, n_ring, p);
    const double psi_rb = detail::psi_value(c, rb);
    if (!(psi_rb < h && h < 0.0))
        throw DomainError("turning_points: h=" + std::to_string(h) +
                          " outside the bounded-orbit window (" + std::to_string(psi_rb) +
                          ", 0)");
    // outer root: Psi increases from Psi(rb) toward 0-
    double hi = 2.0 * rb;
    while (detail::psi_value(c, hi) < h) hi *= 2.0;
    const double r_max = bisect(
        [&](double r) { return detail::psi_value(c, r) - h; }, rb, hi, 0.0);
    // inner root, anchored at the outer one: W(r) = Psi(r_max) - Psi(r) is
    // strictly increasing on (0, rb) and exactly zero at r_max
    double lo = 0.5 * rb;
    while (detail::psi_value(c, lo) < h) lo *= 0.5;
    const double r_min = bisect(
        [&](double r) { return -detail::psi_diff(c, r, r_max); }, lo, rb, 0.0);
    return {r_min, r_max};
}

// Period of the radial oscillation at energy h:
//   tau = 2 * integral over [r_min, r_max] of dr / sqrt(2 (h - Psi(r))).
// The substitution r = m + a sin(theta) removes the inverse-square-root
// endpoint singularities; the integrand is used in the regularized form
// 1 / sqrt(2 q) with q = (h - Psi) / ((r_max - r)(r - r_min)), evaluated by
// a midpoint rule (200 nodes, doubled and Richardson-extrapolated until
// successive estimates agree to 1e-10 relative).
inline double radial_period(double h, double lambda, int n_ring, const PotentialParams& p) {
    const auto c = detail::radial_coeffs(lambda, n_ring, p);
    const auto tp = turning_points(h, lambda, n_ring, p);
    const double amp = 0.5 * (tp.r_max - tp.r_min);
    // Each half of the interval is anchored at its own turning point: the
    // node offset amp*(1 -+ sin th) is exact in its own scale and the Psi
    // difference vanishes identically at the anchor, so the regularized
    // integrand stays clean even when the oscillation amplitude is many
    // orders below r (turning points are only representable to one ulp of
    // r, and a shared-energy formulation amplifies that defect near the far
    // endpoint). The two halves sit at energies Psi(r_min) and Psi(r_max),
    // which agree with h to turning-point accuracy.
    const auto integrand = [&](double th) {
        const double half = 0.25 * M_PI - 0.5 * th;
        const double sh = std::sin(half), ch = std::cos(half);
        const double one_minus_s = 2.0 * sh * sh;  // 1 - sin(th)
        const double one_plus_s = 2.0 * ch * ch;   // 1 + sin(th)
        const double w =  // h - Psi(r) at the node
            th >= 0.0 ? -detail::psi_diff_at_offset(c, tp.r_max, -amp * one_minus_s)
                      : -detail::psi_diff_at_offset(c, tp.r_min, amp * one_plus_s);
        if (w <= 0.0) return 0.0;
        const double q = w / (amp * amp * one_minus_s * one_plus_s);
        return 1.0 / std::sqrt(2.0 * q);
    };
    const auto midpoint = [&](long n) {
        const double step = M_PI / static_cast<double>(n);
        double sum = 0.0;
        for (long i = 0; i < n; ++i)
            sum += integrand(-0.5 * M_PI + (static_cast<double>(i) + 0.5) * step);
        return sum * step;
    };
    constexpr int kMaxLevels = 13;
    std::array<double, kMaxLevels> row{}, prev{};
    double best = 0.0;
    for (int k = 0; k < kMaxLevels; ++k) {
        row[0] = midpoint(200L << k);
        double pow4 = 1.0;
        for (int j = 1; j <= k; ++j) {
            pow4 *= 4.0;
            row[j] = (pow4 * row[j - 1] - prev[j - 1]) / (pow4 - 1.0);
        }
        if (k > 0 && std::abs(row[k] - best) <= 1e-10 * std::abs(row[k])) {
            best = row[k];
            break;
        }
        best = row[k];
        prev = row;
    }
    return 2.0 * best;
}

struct RadialSample {
    double t;
    double r;
    double r_dot;
    double omega;
};

// A periodic solution of the reduced radial system with its angular profile.
struct RadialOrbit {
    double lambda;
    int n_ring;
    PotentialParams params;
    double h;
    double r_min;
    double r_max;
    double period_tau;
    std::vector<RadialSample> samples;
};

// Rotation angle profile omega(t) = sign * integral of sqrt(omega_dot^2(r(s))) ds
// over the sample grid (cumulative quadratic rule on uniform grids,
// trapezoid otherwise). Rejects samples where the squared rate is below
// -1e-12; small negatives are clamped to zero.
inline std::vector<double> omega_profile(const std::vector<RadialSample>& samples, int sign,
                                         double lambda, int n_ring, const PotentialParams& p) {
    if (sign != 1 && sign != -1) throw DomainError("omega_profile: sign must be +1 or -1");
    const std::size_t n = samples.size();
    std::vector<double> rate(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double w2 = omega_dot_squared(samples[i].r, lambda, n_ring, p);
        if (w2 < -1e-12)
            throw AdmissibilityError("omega_profile: squared angular rate " +
                                     std::to_string(w2) + " at r=" +
                                     std::to_string(samples[i].r));
        rate[i] = std::sqrt(std::max(w2, 0.0));
    }
    std::vector<double> omega(n, 0.0);
    if (n < 2) return omega;
    bool uniform = true;
    const double dt0 = samples[1].t - samples[0].t;
    for (std::size_t i = 1; i + 1 < n; ++i)
        if (std::abs((samples[i + 1].t - samples[i].t) - dt0) > 1e-9 * std::max(1.0, dt0))
            uniform = false;
    for (std::size_t i = 1; i < n; ++i) {
        const double dt = samples[i].t - samples[i - 1].t;
        double inc;
        if (uniform && n >= 3) {
            // integral over one step of the quadratic through three nodes
            if (i + 1 < n)
                inc = dt / 12.0 * (5.0 * rate[i - 1] + 8.0 * rate[i] - rate[i + 1]);
            else
                inc = dt / 12.0 * (-rate[i - 2] + 8.0 * rate[i - 1] + 5.0 * rate[i]);
        } else {
            inc = 0.5 * dt * (rate[i - 1] + rate[i]);
        }
        omega[i] = omega[i - 1] + inc;
    }
    if (sign < 0)
        for (auto& w : omega) w = -w;
    return omega;
}

namespace detail {

// One embedded Dormand-Prince 5(4) step for a 2-state system (r, r_dot).
// Returns the 5th-order solution and the embedded error estimate.
template <class RHS>
void dopri_step_2(const RHS& rhs, const std::array<double, 2>& y, double h,
                  std::array<double, 2>& y_out, std::array<double, 2>& err) {
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
    std::array<double, 2> k1 = rhs(y), t;
    for (int i = 0; i < 2; ++i) t[i] = y[i] + h * A21 * k1[i];
    std::array<double, 2> k2 = rhs(t);
    for (int i = 0; i < 2; ++i) t[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
    std::array<double, 2> k3 = rhs(t);
    for (int i = 0; i < 2; ++i) t[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
    std::array<double, 2> k4 = rhs(t);
    for (int i = 0; i < 2; ++i)
        t[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
    std::array<double, 2> k5 = rhs(t);
    for (int i = 0; i < 2; ++i)
        t[i] = y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
    std::array<double, 2> k6 = rhs(t);
    for (int i = 0; i < 2; ++i)
        y_out[i] = y[i] + h * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] + B6 * k6[i]);
    std::array<double, 2> k7 = rhs(y_out);
    for (int i = 0; i < 2; ++i)
        err[i] = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
}

// Adaptive integration of the 2-state radial system from t0 to t1.
template <class RHS>
std::array<double, 2> integrate_radial_segment(const RHS& rhs, std::array<double, 2> y, double t0,
                                               double t1, double rel_tol, double abs_tol) {
    double t = t0;
    double h = (t1 - t0) * 1e-3;
    while (t < t1) {
        if (t + h > t1) h = t1 - t;
        std::array<double, 2> y_new, err;
        dopri_step_2(rhs, y, h, y_new, err);
        double en = 0.0;
        for (int i = 0; i < 2; ++i) {
            const double sc = abs_tol + rel_tol * std::max(std::abs(y[i]), std::abs(y_new[i]));
            en += (err[i] / sc) * (err[i] / sc);
        }
        en = std::sqrt(0.5 * en);
        if (en <= 1.0) {
            t += h;
            y = y_new;
        }
        const double factor = en > 0.0 ? 0.9 * std::pow(en, -0.2) : 5.0;
        h *= std::min(5.0, std::max(0.2, factor));
        if (h < 1e-15 * std::max(1.0, std::abs(t)))
            throw IntegrationError("radial integration: step underflow at t=" + std::to_string(t),
                                   t);
    }
    return y;
}

}  // namespace detail

// Integrates the reduced radial system r'' = -Psi'(r) from the inner turning
// point at rest, sampling every dt up to t_end, and fills the angular
// profile. Energy h must lie in [Psi(rbar), 0); h at the bottom of the well
// yields the constant equilibrium solution.
inline RadialOrbit integrate_radial(double h, double lambda, int n_ring,
                                    const PotentialParams& p, double t_end, double dt) {
    if (!(t_end > 0.0) || !(dt > 0.0) || dt > t_end)
        throw DomainError("integrate_radial: need 0 < dt <= t_end");
    const auto c = detail::radial_coeffs(lambda, n_ring, p);
    const double rb = equilibrium_radius(lambda, n_ring, p);
    const double psi_rb = detail::psi_value(c, rb);

    RadialOrbit orbit{lambda, n_ring, p, h, rb, rb, 0.0, {}};
    const std::size_t n_samples = static_cast<std::size_t>(std::floor(t_end / dt + 1e-9)) + 1;

    if (std::abs(h - psi_rb) <= 4e-15 * std::abs(psi_rb)) {
        // bottom of the well: r stays at the equilibrium radius; the period
        // degenerates to the small-oscillation limit
        const double dr = 1e-6 * rb;
        const double psi_dd =
            (detail::psi_slope(c, rb + dr) - detail::psi_slope(c, rb - dr)) / (2.0 * dr);
        orbit.period_tau = 2.0 * M_PI / std::sqrt(psi_dd);
        for (std::size_t k = 0; k < n_samples; ++k)
            orbit.samples.push_back({static_cast<double>(k) * dt, rb, 0.0, 0.0});
    } else {
        const auto tp = turning_points(h, lambda, n_ring, p);
        orbit.r_min = tp.r_min;
        orbit.r_max = tp.r_max;
        orbit.period_tau = radial_period(h, lambda, n_ring, p);
        const auto rhs = [&](const std::array<double, 2>& y) {
            return std::array<double, 2>{y[1], -detail::psi_slope(c, y[0])};
        };
        std::array<double, 2> y{tp.r_min, 0.0};
        orbit.samples.push_back({0.0, y[0], y[1], 0.0});
        for (std::size_t k = 1; k < n_samples; ++k) {
            const double t0 = static_cast<double>(k - 1) * dt;
            const double t1 = static_cast<double>(k) * dt;
            y = detail::integrate_radial_segment(rhs, y, t0, t1, 1e-10, 1e-14);
            orbit.samples.push_back({t1, y[0], y[1], 0.0});
        }
        double drift = 0.0;
        for (const auto& s : orbit.samples)
            drift = std::max(drift,
                             std::abs(0.5 * s.r_dot * s.r_dot + detail::psi_value(c, s.r) - h));
        if (drift > 1e-6 * std::max(1.0, std::abs(h)))
            throw IntegrationError("integrate_radial: energy drift " + std::to_string(drift),
                                   t_end);
    }
    const auto omegas = omega_profile(orbit.samples, +1, lambda, n_ring, p);
    for (std::size_t i = 0; i < omegas.size(); ++i) orbit.samples[i].omega = omegas[i];
    return orbit;
}

// Full 3D states q(t) = r(t) E(omega(t)) q0 of the non-circular family from
// a radial orbit and the unit-scale two-pole base configuration. Velocities
// come from the product rule with omega_dot = sqrt(omega_dot^2(r)).
inline std::vector<SystemState> reconstruct_homographic(const RadialOrbit& orbit,
                                                        const RingConfiguration& base) {
    if (base.family != Family::TwoPlusN)
        throw DomainError("reconstruct_homographic: base must be the two-pole family");
    if (std::abs(base.r0 - 1.0) > 1e-12)
        throw DomainError("reconstruct_homographic: base must have unit pole distance, got r0=" +
                          std::to_string(base.r0));
    const auto q0 = base.positions();
    std::vector<SystemState> states;
    states.reserve(orbit.samples.size());
    for (const auto& s : orbit.samples) {
        const double w2 = omega_dot_squared(s.r, orbit.lambda, orbit.n_ring, orbit.params);
        const double w_dot = std::sqrt(std::max(w2, 0.0));
        const Mat3 rot = rotation_z(s.omega);
        SystemState st;
        st.time = s.t;
        for (const auto& q : q0) {
            const Vec3 u = rot * q;
            const Vec3 pos = s.r * u;
            const Vec3 vel{s.r_dot * u.x - s.r * w_dot * u.y,
                           s.r_dot * u.y + s.r * w_dot * u.x, s.r_dot * u.z};
            st.bodies.push_back({pos, vel});
        }
        states.push_back(std::move(st));
    }
    return states;
}

}  // namespace lj
