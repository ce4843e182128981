#pragma once

#include <cmath>
#include <limits>
#include <utility>

#include "lj/errors.hpp"

namespace lj {

// Bisection for f(x) = 0 on [lo, hi]; f(lo) and f(hi) must have opposite signs.
// Runs down to the requested relative width (floored at a few ulps).
template <class F>
double bisect(F&& f, double lo, double hi, double rel_tol = 1e-15) {
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo < 0.0) == (fhi < 0.0))
        throw DomainError("bisect: no sign change on the given bracket");
    const bool lo_negative = flo < 0.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;  // interval down to one ulp
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm < 0.0) == lo_negative)
            lo = mid;
        else
            hi = mid;
        if (hi - lo <= rel_tol * std::max(std::abs(lo), std::abs(hi))) break;
    }
    return 0.5 * (lo + hi);
}

// Boundary of a monotone predicate: pred(lo) is false, pred(hi) is true.
// Returns the smallest x (within abs_tol) with pred(x) true; the returned
// point itself satisfies the predicate.
template <class P>
double predicate_boundary(P&& pred, double lo, double hi, double abs_tol = 1e-6) {
    for (int i = 0; i < 200 && hi - lo > abs_tol; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        if (pred(mid))
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

}  // namespace lj
