#pragma once

#include "tilepath/types.hpp"

#include <cstdint>
#include <memory>
#include <mutex>
#include <unordered_map>

namespace tilepath {

/// Cached spectral decomposition of A*A^T driving the beta-parameterized
/// reduction to a single-penalty Lasso.
///
/// With A*A^T = U diag(d) U^T, the transform operator
///     M_beta = (I + A*A^T/beta)^{-1/2} = U diag((1+d/beta)^{-1/2}) U^T
/// gives B_beta = M_beta * A and y_beta = M_beta * y. Columns of B_beta and
/// correlations B_beta^T x are evaluated on demand in O(m^2) / O(m^2 + m n)
/// without ever forming B_beta.
///
/// Immutable after construction; the per-beta column cache is guarded by a
/// mutex and safe for concurrent access.
class BetaTransform {
public:
    const Matrix& A() const { return A_; }
    const Vector& y() const { return y_; }
    int m() const { return static_cast<int>(A_.rows()); }
    int n() const { return static_cast<int>(A_.cols()); }

    const Matrix& eigenvectors() const { return U_; }
    const Vector& eigenvalues() const { return d_; }

    /// (I + A A^T/beta)^{-1/2} x.
    Vector apply_half_inverse(double beta, const Vector& x) const;

    /// Column j of B_beta (memoized per exact beta bit pattern).
    Vector column(double beta, int j) const;

    /// y_beta (memoized).
    Vector transformed_y(double beta) const;

    /// B_beta^T x for all columns at once: A^T (M_beta x).
    Vector correlations(double beta, const Vector& x) const;

    /// B_beta restricted to the given columns, m x |I|.
    Matrix columns(double beta, const std::vector<int>& idx) const;

    /// Largest eigenvalue of B_beta^T B_beta, i.e. max_i d_i/(1+d_i/beta).
    double operator_norm_sq(double beta) const;

    void clear_cache() const;

private:
    friend BetaTransform decompose(const Problem&);

    Matrix A_;
    Vector y_;
    Matrix U_;    // eigenvectors of A A^T
    Vector d_;    // eigenvalues, clamped to >= 0
    Matrix UtA_;  // U^T A, precomputed
    Vector Uty_;  // U^T y

    struct BetaSlot {
        Vector weights;  // (1 + d/beta)^{-1/2}
        Vector ybeta;
        bool has_ybeta = false;
        std::unordered_map<int, Vector> cols;
    };
    struct Cache {
        std::unordered_map<std::uint64_t, BetaSlot> slots;
        std::mutex mu;
    };
    std::unique_ptr<Cache> cache_ = std::make_unique<Cache>();

    BetaSlot& slot(double beta) const;  // caller must hold cache_->mu
    Vector weights_for(double beta) const;
};

/// Throws std::invalid_argument unless beta is positive and finite.
void check_beta(double beta);

/// Eigendecomposition of A A^T with near-null eigenvalues clamped to zero.
/// Throws numeric_error on non-finite input (message names the entry).
BetaTransform decompose(const Problem& problem);

/// Columns I of B_beta = (I + A A^T/beta)^{-1/2} A.
Matrix columns_B(const BetaTransform& bt, double beta, const std::vector<int>& idx);

/// y_beta = (I + A A^T/beta)^{-1/2} y.
Vector transformed_y(const BetaTransform& bt, double beta);

/// v minimizing the quadratic part of the functional at fixed u:
/// v = (beta + A^T A)^{-1} A^T (y - A u), evaluated through the m x m identity
/// A^T (beta I + A A^T)^{-1} (y - A u).
Vector recover_v(const BetaTransform& bt, double beta, const Vector& u);

}  // namespace tilepath
