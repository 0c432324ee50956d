#pragma once

#include "tilepath/transform.hpp"
#include "tilepath/types.hpp"

#include <optional>
#include <vector>

namespace tilepath {

/// Cholesky factor of the active-column Gram matrix, updated and downdated
/// as single columns join or leave the active set.
class ActiveGram {
public:
    explicit ActiveGram(int m = 0) : cols_(m, 0) {}

    void reset(int m);
    int size() const { return static_cast<int>(order_.size()); }
    const std::vector<int>& order() const { return order_; }

    /// Append column b for index j. Throws numeric_error when the updated
    /// factor is numerically singular (condition estimate in the message).
    void add(int j, const Vector& b);
    /// Remove the column of index j (Givens re-triangularization).
    void remove(int j);

    /// Solve (B_I^T B_I) x = rhs with rhs given in insertion order.
    Vector solve(const Vector& rhs) const;
    /// B_I in insertion order, m x k.
    const Matrix& active_columns() const { return cols_; }
    /// Squared ratio of extreme factor diagonals; cheap condition estimate.
    double condition_estimate() const;

private:
    Matrix L_;
    Matrix cols_;
    std::vector<int> order_;
};

enum class PathVariant { lasso, lars };

/// Candidate knot value for one index (Eq.-7 style ratio).
struct Candidate {
    double value;  // alpha at which index j would enter/leave; -inf when undefined
    int gamma;     // sign an entering index would take; 0 for leave candidates
};

/// All candidate values for a support/sign pattern at one beta.
/// `prev_left` is the index that left the support at the immediately
/// preceding knot (its candidate sign is flipped), or -1.
std::vector<Candidate> candidate_alphas(const BetaTransform& bt, double beta,
                                        const SignPattern& pattern, int prev_left = -1,
                                        PathVariant variant = PathVariant::lasso);

/// Single candidate; prev_left applies to this j.
Candidate candidate_alpha(const BetaTransform& bt, double beta, const SignPattern& pattern,
                          int j, bool prev_left = false);

/// Candidate value with a fixed entering sign, used to re-evaluate stored
/// boundary formulas. For j in the support the leave ratio is returned and
/// gamma is ignored.
double candidate_alpha_fixed_gamma(const BetaTransform& bt, double beta,
                                   const SignPattern& pattern, int j, int gamma);

struct Knot {
    double alpha;
    std::vector<int> movers;  // argmax set, ascending
    std::vector<int> gammas;  // +/-1 for entering movers, 0 for leaving ones
    bool tie;
};

/// Next knot strictly below alpha_current, or nullopt when the path runs to
/// alpha -> 0 with no further support change.
std::optional<Knot> next_knot(const BetaTransform& bt, double beta, const SignPattern& pattern,
                              double alpha_current, int prev_left = -1,
                              PathVariant variant = PathVariant::lasso);

struct PathKnot {
    double alpha;
    SignPattern pattern;      // support and signs below this knot
    std::vector<int> movers;
    std::vector<int> gammas;
    bool tie;

    bool entered() const { return !gammas.empty() && gammas.front() != 0; }
};

struct PathResult {
    std::vector<PathKnot> knots;
    int tie_events = 0;
};

/// Lasso path at fixed beta, from alpha = inf down until the support would
/// exceed s_max. Under the lars variant indices never leave the support.
PathResult path(const BetaTransform& bt, double beta, int s_max,
                PathVariant variant = PathVariant::lasso);

/// Closed-form solution on a fixed support: (B_I^T B_I)^{-1}(B_I^T y_beta - alpha sigma),
/// returned in pattern.indices() order.
Vector solve_on_support(const BetaTransform& bt, double beta, const SignPattern& pattern,
                        double alpha);

/// Scatter of solve_on_support into a full length-n vector.
Vector solve_on_support_full(const BetaTransform& bt, double beta, const SignPattern& pattern,
                             double alpha);

/// Maximum KKT violation of a full-length coefficient vector.
double kkt_check(const BetaTransform& bt, double beta, double alpha, const Vector& u);

}  // namespace tilepath
