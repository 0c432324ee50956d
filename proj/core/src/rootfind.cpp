#include "tilepath/rootfind.hpp"

#include <cmath>

namespace tilepath {

namespace {

constexpr int kMaxIter = 200;

double checked_eval(const ScalarFn& f, double x) {
    double v = f(x);
    if (!std::isfinite(v)) throw numeric_error("root find: non-finite function value");
    return v;
}

bool tight_enough(double lo, double hi, double tol_rel) {
    double mid = 0.5 * (lo + hi);
    return (hi - lo) <= tol_rel * std::max(1.0, std::abs(mid));
}

}  // namespace

double bisect(const BracketedProblem& p) {
    if (!(p.lo < p.hi)) throw std::invalid_argument("bisect: lo must be < hi");
    double flo = checked_eval(p.f, p.lo);
    double fhi = checked_eval(p.f, p.hi);
    if (flo == 0.0) return p.lo;
    if (fhi == 0.0) return p.hi;
    if ((flo < 0.0) == (fhi < 0.0))
        throw std::invalid_argument("bisect: endpoint signs must differ");

    double lo = p.lo, hi = p.hi;
    for (int it = 0; it < kMaxIter; ++it) {
        if (tight_enough(lo, hi, p.tol_rel)) return 0.5 * (lo + hi);
        double mid = 0.5 * (lo + hi);
        double fm = checked_eval(p.f, mid);
        if (fm == 0.0) return mid;
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    throw numeric_error("bisect: iteration cap exceeded");
}

double guarded_secant(const ScalarFn& f, double lo, double hi, double tol_rel) {
    if (!(lo < hi)) throw std::invalid_argument("guarded_secant: lo must be < hi");
    double a = lo, b = hi;
    double fa = checked_eval(f, a);
    double fb = checked_eval(f, b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    bool bracketed = (fa < 0.0) != (fb < 0.0);

    double x0 = a, f0 = fa, x1 = b, f1 = fb;
    for (int it = 0; it < kMaxIter; ++it) {
        if (tight_enough(a, b, tol_rel)) return 0.5 * (a + b);
        double x2;
        if (f1 != f0) {
            x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
        } else {
            x2 = 0.5 * (a + b);
        }
        if (!(x2 > a && x2 < b) || !std::isfinite(x2)) x2 = 0.5 * (a + b);
        double f2 = checked_eval(f, x2);
        if (f2 == 0.0) return x2;
        if (bracketed) {
            if ((f2 < 0.0) == (fa < 0.0)) {
                a = x2;
                fa = f2;
            } else {
                b = x2;
                fb = f2;
            }
        } else {
            // No sign change at the endpoints; shrink towards the iterate.
            if (x2 < x1) b = std::min(b, x1); else a = std::max(a, x1);
        }
        x0 = x1;
        f0 = f1;
        x1 = x2;
        f1 = f2;
    }
    throw numeric_error("guarded_secant: iteration cap exceeded");
}

std::optional<double> crossing(const ScalarFn& f, const ScalarFn& g, double lo, double hi,
                               double tol_rel) {
    auto diff = [&](double x) { return f(x) - g(x); };
    double dlo = checked_eval(diff, lo);
    double dhi = checked_eval(diff, hi);
    if (dlo == 0.0) return lo;
    if (dhi == 0.0) return hi;
    if ((dlo < 0.0) == (dhi < 0.0)) return std::nullopt;
    return guarded_secant(diff, lo, hi, tol_rel);
}

}  // namespace tilepath
