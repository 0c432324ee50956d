#pragma once

#include "tilepath/types.hpp"

#include <functional>
#include <optional>

namespace tilepath {

using ScalarFn = std::function<double(double)>;

/// Bracketed scalar root problem: f(lo) and f(hi) must differ in sign.
struct BracketedProblem {
    ScalarFn f;
    double lo;
    double hi;
    double tol_rel = 1e-9;
};

/// Bisection. Returns a point with bracket width <= tol_rel * max(1, |root|).
/// Throws std::invalid_argument on equal endpoint signs, numeric_error on
/// non-finite evaluations or iteration cap (200).
double bisect(const BracketedProblem& p);

/// Secant iteration confined to (lo, hi): any iterate escaping the current
/// bracket is replaced by its midpoint. The caller guarantees a root exists
/// in the open interval.
double guarded_secant(const ScalarFn& f, double lo, double hi, double tol_rel = 1e-9);

/// Smallest root of f - g in (lo, hi), or nullopt when the endpoint values
/// show no sign change of the difference.
std::optional<double> crossing(const ScalarFn& f, const ScalarFn& g, double lo, double hi,
                               double tol_rel = 1e-9);

}  // namespace tilepath
