#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "lj/configurations.hpp"
#include "lj/errors.hpp"
#include "lj/potential.hpp"
#include "lj/roots.hpp"

namespace lj {

// Unique positive equilibrium of the effective radial potential. Coincides
// with the circular radius of the two-pole family.
inline double equilibrium_radius(double lambda, int n_ring, const PotentialParams& p) {
    detail::check_lambda(lambda, Domain::Exploratory);
    detail::check_ring_count(n_ring);
    const double a = p.alpha, b = p.beta;
    const double num = b * (n_ring * std::pow(2.0, b + 2.0) + 2.0 * std::pow(lambda, b + 2.0));
    const double den = a * (n_ring * std::pow(2.0, a + 2.0) + 2.0 * std::pow(lambda, a + 2.0));
    return std::pow(num / den, 1.0 / (b - a)) / (2.0 * lambda);
}

namespace detail {

// Inner brackets of the cap radius; the cap exists only when both are positive.
struct CapBrackets {
    double alpha_bracket;
    double beta_bracket;
};

inline CapBrackets cap_brackets(double lambda, int n_ring, const PotentialParams& p) {
    const double f = phi(lambda);
    const double ta = theta_sum(p.alpha, n_ring);
    const double tb = theta_sum(p.beta, n_ring);
    const double n2 = static_cast<double>(n_ring - 2);
    const double a = p.alpha, b = p.beta;
    const double ba = n2 * std::pow(2.0 * f, a + 2.0) + 2.0 * std::pow(lambda * f, a + 2.0) -
                      ta * std::pow(2.0 * lambda, a + 2.0);
    const double bb = n2 * std::pow(2.0 * f, b + 2.0) + 2.0 * std::pow(lambda * f, b + 2.0) -
                      tb * std::pow(2.0 * lambda, b + 2.0);
    return {ba, bb};
}

}  // namespace detail

// Largest admissible scale at which the required squared angular rate of the
// non-circular family stays nonnegative. Empty when either inner bracket is
// nonpositive (the cap legitimately fails to exist for small lambda).
inline std::optional<double> cap_radius(double lambda, int n_ring, const PotentialParams& p) {
    detail::check_lambda(lambda, Domain::Exploratory);
    detail::check_ring_count(n_ring);
    const auto [ba, bb] = detail::cap_brackets(lambda, n_ring, p);
    if (ba <= 0.0 || bb <= 0.0) return std::nullopt;
    const double a = p.alpha, b = p.beta;
    return std::pow(b * bb / (a * ba), 1.0 / (b - a)) / (2.0 * lambda * phi(lambda));
}

// Strict admissibility inequality, as the sign of the difference of its two
// sides. Expanding both products shows they share the monomials
// N(N-2) 2^(a+b+4) phi^(b+2) and 4 lambda^(a+b+4) phi^(b+2); those are
// cancelled symbolically here, because evaluated literally they swamp the
// deciding terms in double precision once lambda is large (the two sides
// agree to ~lambda^(a+2) relative). Stays meaningful even where the cap
// radius does not exist.
inline bool admissibility_inequality_holds(double lambda, int n_ring, const PotentialParams& p) {
    detail::check_lambda(lambda, Domain::Exploratory);
    detail::check_ring_count(n_ring);
    const double f = phi(lambda);
    const double a = p.alpha, b = p.beta;
    const double ta = theta_sum(a, n_ring);
    const double tb = theta_sum(b, n_ring);
    const double n = static_cast<double>(n_ring);
    const double f_b2 = std::pow(f, b + 2.0);
    const double diff = std::pow(2.0, a + 4.0) * std::pow(lambda, b + 2.0) * f_b2 -
                        std::pow(2.0, b + 4.0) * std::pow(lambda, a + 2.0) * f_b2 -
                        n * tb * std::pow(2.0, a + b + 4.0) * std::pow(lambda, b + 2.0) -
                        tb * std::pow(2.0, b + 3.0) * std::pow(lambda, a + b + 4.0) +
                        n * ta * std::pow(2.0, a + b + 4.0) * std::pow(lambda, a + 2.0) *
                            std::pow(f, b - a) +
                        ta * std::pow(2.0, a + 3.0) * std::pow(lambda, a + b + 4.0) *
                            std::pow(f, b - a);
    return diff > 0.0;
}

namespace detail {

inline constexpr double kThresholdSearchCap = 1e6;
inline constexpr double kThresholdTol = 1e-6;

// Coarse geometric bracketing of a predicate boundary, then bisection. The
// scan assumes the predicate, once located, is persistently true; callers
// that cannot rely on monotonicity re-verify on a grid above the candidate.
template <class P>
double threshold_search(P&& pred, double start, const std::string& what) {
    double lam = start;
    if (pred(lam)) return lam;
    while (lam < kThresholdSearchCap) {
        const double next = lam * 1.5;
        if (pred(next)) return predicate_boundary(pred, lam, next, kThresholdTol);
        lam = next;
    }
    throw SearchError(what + ": predicate not satisfied up to lambda=1e6");
}

}  // namespace detail

// Smallest lambda >= 2 from which the two-pole theta-bracket of the squared
// angular speed is guaranteed nonnegative. Monotone in lambda, so one
// boundary bisection suffices.
inline double find_lambda1(int n_ring, const PotentialParams& p) {
    detail::check_ring_count(n_ring);
    const double target = std::pow(theta_sum(p.beta, n_ring) / theta_sum(p.alpha, n_ring),
                                   1.0 / (p.beta - p.alpha));
    return detail::threshold_search(
        [&](double lam) { return g1(lam, n_ring, p, Domain::Exploratory) >= target; }, 2.0,
        "find_lambda1");
}

// Analogue for the family with a central body.
inline double find_lambda2(int n_ring, const PotentialParams& p) {
    detail::check_ring_count(n_ring);
    const double t1 = std::pow(theta_sum(p.beta, n_ring) / theta_sum(p.alpha, n_ring),
                               1.0 / (p.beta - p.alpha));
    const double t2 = std::pow(p.beta / p.alpha, 1.0 / (p.beta - p.alpha));
    const double target = std::max(t1, t2);
    return detail::threshold_search(
        [&](double lam) { return g2(lam, n_ring, p, Domain::Exploratory) >= target; }, 2.0,
        "find_lambda2");
}

// Smallest lambda from which the admissibility inequality holds and keeps
// holding on a verification grid up to 10x the candidate. The inequality is
// not monotone in lambda (it can hold on a spurious low-lambda window where
// the cap radius does not exist), so the predicate also requires the cap to
// exist and every candidate is re-checked on the grid.
inline double find_lambda0(int n_ring, const PotentialParams& p, int verify_points = 400) {
    detail::check_ring_count(n_ring);
    const auto pred = [&](double lam) {
        return admissibility_inequality_holds(lam, n_ring, p) &&
               cap_radius(lam, n_ring, p).has_value();
    };
    double lam = 1.0 + 1e-6;
    while (lam < detail::kThresholdSearchCap) {
        const double next = lam * 1.5;
        if (pred(next)) {
            const double candidate =
                pred(lam) ? lam : predicate_boundary(pred, lam, next, detail::kThresholdTol);
            bool verified = true;
            double failed_at = candidate;
            for (int i = 0; i <= verify_points; ++i) {
                const double lv =
                    candidate + (10.0 * candidate - candidate) * static_cast<double>(i) /
                                    static_cast<double>(verify_points);
                if (!pred(lv)) {
                    verified = false;
                    failed_at = lv;
                    break;
                }
            }
            if (verified) return candidate;
            lam = failed_at;  // resume the scan past the failure
            continue;
        }
        lam = next;
    }
    throw SearchError("find_lambda0: inequality never stabilized up to lambda=1e6");
}

// All three existence thresholds for one parameter set.
struct ThresholdReport {
    double lambda1;
    double lambda2;
    double lambda0;
    int n_ring;
    PotentialParams params;
    double grid_resolution;
};

inline ThresholdReport compute_thresholds(int n_ring, const PotentialParams& p) {
    ThresholdReport rep{find_lambda1(n_ring, p), find_lambda2(n_ring, p),
                        find_lambda0(n_ring, p), n_ring, p, detail::kThresholdTol};
    return rep;
}

}  // namespace lj
