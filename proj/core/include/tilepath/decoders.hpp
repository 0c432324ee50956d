#pragma once

#include "tilepath/lasso_path.hpp"
#include "tilepath/types.hpp"

#include <string>
#include <vector>

namespace tilepath {

/// Output of one sparse decoder on one problem. OMP and IHT produce a single
/// support; the path decoders list every support visited up to the size cap.
struct DecoderResult {
    std::string method;
    std::vector<std::vector<int>> supports;
    std::vector<Vector> coefficients;  // least-squares refit per support
    double wall_time_ms = 0.0;
    int tie_events = 0;
    std::string notes;
};

/// Orthogonal matching pursuit with a full least-squares refit per step.
DecoderResult omp(const Problem& problem, int s);

/// Iterative hard thresholding u <- H_s(u + mu A^T(y - A u)) with
/// mu = 1/||A||_2^2, warm-started from the s largest entries of the Lasso
/// solution at the largest alpha on the path with >= s active entries.
/// Stops when the support stabilizes, capped at 500 iterations.
DecoderResult iht_warm(const Problem& problem, int s);

/// Supports of size <= s_max along the standard Lasso path on (A, y),
/// realized through the beta -> inf equivalence at beta = 1e12.
DecoderResult lasso_supports(const Problem& problem, int s_max);

/// Lasso path on the preconditioned pair (F A, F y) with F = U Sigma^+ U^T
/// from the SVD of A; singular values below 1e-10 sigma_max are zeroed.
DecoderResult plasso_supports(const Problem& problem, int s_max);

/// The preconditioner F of plasso_supports.
Matrix plasso_preconditioner(const Matrix& A);

constexpr double kLassoLimitBeta = 1e12;

}  // namespace tilepath
