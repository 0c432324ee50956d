#pragma once

#include "tilepath/tiling.hpp"
#include "tilepath/types.hpp"

#include <set>
#include <vector>

namespace tilepath {

/// A support with its regressed coefficient/noise estimates and score
/// min_i |u_i| / ||v||_inf (+inf when v vanishes).
struct SupportCandidate {
    std::vector<int> support;
    Vector u_hat;  // over the support
    Vector v_hat;  // length n
    double score = 0.0;
};

/// Distinct (support, signs) pairs over all tiles of the given support size.
std::set<SignPattern> enumerate_supports(const TilingGraph& graph, int s);

/// u_hat = argmin ||A_I u - y||_2, v_hat = A^+(y - A_I u_hat) with the
/// pseudo-inverse thresholded at 1e-10 sigma_max. Throws numeric_error on a
/// rank-deficient A_I.
SupportCandidate regress(const Problem& problem, const std::vector<int>& support);

double selection_score(const SupportCandidate& cand);

/// Highest-scoring support among the candidates (all of size s); candidates
/// failing the regression are skipped. Ties go to the support with the
/// smallest symmetric difference to the lexicographically smallest tied
/// candidate, then lexicographically.
std::vector<int> rank_supports(const Problem& problem,
                               const std::vector<std::vector<int>>& candidates, int s);

int symmetric_difference(const std::vector<int>& a, const std::vector<int>& b);

/// Candidate with the smallest symmetric difference to the true support;
/// ties break lexicographically.
std::vector<int> oracle_closest(const std::vector<std::vector<int>>& candidates,
                                const std::vector<int>& true_support);

}  // namespace tilepath
