// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>

#include "vacpack/error.hpp"

namespace vacpack
{
/*!
 * Locate the switch point of a monotone predicate on [lo, hi].
 *
 * \c pred must be false at \c lo and true at \c hi (the caller checks the
 * ends). Returns the final bracket once its width is at most \c tol; the
 * predicate is false at \c first and true at \c second.
 */
struct Bracket
{
    double first;
    double second;
};

template<class Pred>
Bracket bisect_predicate(Pred&& pred, double lo, double hi, double tol)
{
    constexpr int max_iters = 200;
    for (int i = 0; i < max_iters && hi - lo > tol; ++i)
    {
        double mid = lo + (hi - lo) / 2;
        if (pred(mid))
            hi = mid;
        else
            lo = mid;
    }
    return {lo, hi};
}

//! Smallest integer k in [lo, hi] with pred(k) true, assuming pred is
//! monotone and pred(hi) holds.
template<class Pred>
std::int64_t first_true_index(Pred&& pred, std::int64_t lo, std::int64_t hi)
{
    while (lo < hi)
    {
        std::int64_t mid = lo + (hi - lo) / 2;
        if (pred(mid))
            hi = mid;
        else
            lo = mid + 1;
    }
    return lo;
}

//! Root of a continuous function with a sign change on [lo, hi].
template<class F>
double bisect_root(F&& f, double lo, double hi, double tol)
{
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0)
        return lo;
    if (fhi == 0)
        return hi;
    if (std::signbit(flo) == std::signbit(fhi))
        throw SolverError("bisect_root: root is not bracketed");
    auto [a, b] = bisect_predicate(
        [&](double x) { return std::signbit(f(x)) == std::signbit(fhi); }, lo, hi, tol);
    return a + (b - a) / 2;
}
}  // namespace vacpack
