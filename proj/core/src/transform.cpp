#include "tilepath/transform.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstring>
#include <sstream>

namespace tilepath {

namespace {

std::uint64_t beta_key(double beta) {
    std::uint64_t k;
    std::memcpy(&k, &beta, sizeof(k));
    return k;
}

constexpr size_t kCacheBetaLimit = 8192;

}  // namespace

void check_beta(double beta) {
    if (!(beta > 0.0) || !std::isfinite(beta))
        throw std::invalid_argument("beta must be positive and finite");
}

Vector BetaTransform::weights_for(double beta) const {
    return (1.0 + d_.array() / beta).rsqrt().matrix();
}

BetaTransform::BetaSlot& BetaTransform::slot(double beta) const {
    if (cache_->slots.size() > kCacheBetaLimit) cache_->slots.clear();
    auto [it, inserted] = cache_->slots.try_emplace(beta_key(beta));
    if (inserted) it->second.weights = weights_for(beta);
    return it->second;
}

Vector BetaTransform::apply_half_inverse(double beta, const Vector& x) const {
    check_beta(beta);
    return U_ * (weights_for(beta).cwiseProduct(U_.transpose() * x));
}

Vector BetaTransform::column(double beta, int j) const {
    check_beta(beta);
    if (j < 0 || j >= n()) throw std::invalid_argument("column index out of range");
    std::lock_guard<std::mutex> lock(cache_->mu);
    BetaSlot& s = slot(beta);
    auto it = s.cols.find(j);
    if (it == s.cols.end())
        it = s.cols.emplace(j, U_ * s.weights.cwiseProduct(UtA_.col(j))).first;
    return it->second;
}

Vector BetaTransform::transformed_y(double beta) const {
    check_beta(beta);
    std::lock_guard<std::mutex> lock(cache_->mu);
    BetaSlot& s = slot(beta);
    if (!s.has_ybeta) {
        s.ybeta = U_ * s.weights.cwiseProduct(Uty_);
        s.has_ybeta = true;
    }
    return s.ybeta;
}

Vector BetaTransform::correlations(double beta, const Vector& x) const {
    return A_.transpose() * apply_half_inverse(beta, x);
}

Matrix BetaTransform::columns(double beta, const std::vector<int>& idx) const {
    Matrix out(m(), static_cast<int>(idx.size()));
    for (size_t k = 0; k < idx.size(); ++k) out.col(static_cast<int>(k)) = column(beta, idx[k]);
    return out;
}

double BetaTransform::operator_norm_sq(double beta) const {
    check_beta(beta);
    double best = 0.0;
    for (int i = 0; i < d_.size(); ++i) best = std::max(best, d_[i] / (1.0 + d_[i] / beta));
    return best;
}

void BetaTransform::clear_cache() const {
    std::lock_guard<std::mutex> lock(cache_->mu);
    cache_->slots.clear();
}

BetaTransform decompose(const Problem& problem) {
    const Matrix& A = problem.A;
    for (int j = 0; j < A.cols(); ++j)
        for (int i = 0; i < A.rows(); ++i)
            if (!std::isfinite(A(i, j))) {
                std::ostringstream os;
                os << "decompose: non-finite entry A(" << i << "," << j << ")";
                throw numeric_error(os.str());
            }

    BetaTransform bt;
    bt.A_ = A;
    bt.y_ = problem.y;
    Matrix AAt = A * A.transpose();
    Eigen::SelfAdjointEigenSolver<Matrix> es(AAt);
    if (es.info() != Eigen::Success) throw numeric_error("decompose: eigensolver failed");
    bt.U_ = es.eigenvectors();
    bt.d_ = es.eigenvalues();
    // Gamma/Gaussian ensembles produce near-null directions; negative
    // round-off must not reach the square roots.
    double dmax = bt.d_.size() ? bt.d_.maxCoeff() : 0.0;
    for (int i = 0; i < bt.d_.size(); ++i)
        if (bt.d_[i] < 1e-12 * dmax) bt.d_[i] = 0.0;
    bt.UtA_ = bt.U_.transpose() * A;
    bt.Uty_ = bt.U_.transpose() * problem.y;
    return bt;
}

Matrix columns_B(const BetaTransform& bt, double beta, const std::vector<int>& idx) {
    return bt.columns(beta, idx);
}

Vector transformed_y(const BetaTransform& bt, double beta) {
    return bt.transformed_y(beta);
}

Vector recover_v(const BetaTransform& bt, double beta, const Vector& u) {
    check_beta(beta);
    Vector r = bt.y() - bt.A() * u;
    // (beta I + A A^T)^{-1} r = U diag(1/(beta + d)) U^T r
    Vector z = bt.eigenvectors().transpose() * r;
    z.array() /= (beta + bt.eigenvalues().array());
    return bt.A().transpose() * (bt.eigenvectors() * z);
}

}  // namespace tilepath
