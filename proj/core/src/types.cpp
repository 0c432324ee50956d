#include "tilepath/types.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace tilepath {

SignPattern::SignPattern(std::vector<int> indices, std::vector<int> signs)
    : indices_(std::move(indices)), signs_(std::move(signs)) {
    if (indices_.size() != signs_.size())
        throw std::invalid_argument("SignPattern: index/sign length mismatch");
    std::vector<int> order(indices_.size());
    for (size_t k = 0; k < order.size(); ++k) order[k] = static_cast<int>(k);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return indices_[a] < indices_[b]; });
    std::vector<int> idx(indices_.size()), sgn(indices_.size());
    for (size_t k = 0; k < order.size(); ++k) {
        idx[k] = indices_[order[k]];
        sgn[k] = signs_[order[k]];
        if (sgn[k] != 1 && sgn[k] != -1)
            throw std::invalid_argument("SignPattern: sign must be +1 or -1");
        if (k > 0 && idx[k] == idx[k - 1])
            throw std::invalid_argument("SignPattern: duplicate index");
    }
    indices_ = std::move(idx);
    signs_ = std::move(sgn);
}

bool SignPattern::contains(int j) const {
    return std::binary_search(indices_.begin(), indices_.end(), j);
}

int SignPattern::position(int j) const {
    auto it = std::lower_bound(indices_.begin(), indices_.end(), j);
    if (it == indices_.end() || *it != j) return -1;
    return static_cast<int>(it - indices_.begin());
}

int SignPattern::sign_of(int j) const {
    int p = position(j);
    if (p < 0) throw std::invalid_argument("SignPattern::sign_of: index not in support");
    return signs_[p];
}

SignPattern SignPattern::with(int j, int gamma) const {
    if (contains(j)) throw std::invalid_argument("SignPattern::with: index already present");
    auto idx = indices_;
    auto sgn = signs_;
    auto it = std::lower_bound(idx.begin(), idx.end(), j);
    size_t p = static_cast<size_t>(it - idx.begin());
    idx.insert(it, j);
    sgn.insert(sgn.begin() + static_cast<long>(p), gamma);
    SignPattern out;
    out.indices_ = std::move(idx);
    out.signs_ = std::move(sgn);
    return out;
}

SignPattern SignPattern::without(int j) const {
    int p = position(j);
    if (p < 0) throw std::invalid_argument("SignPattern::without: index not in support");
    SignPattern out;
    out.indices_ = indices_;
    out.signs_ = signs_;
    out.indices_.erase(out.indices_.begin() + p);
    out.signs_.erase(out.signs_.begin() + p);
    return out;
}

bool SignPattern::operator<(const SignPattern& o) const {
    if (indices_ != o.indices_) return indices_ < o.indices_;
    return signs_ < o.signs_;
}

std::string SignPattern::to_string() const {
    std::ostringstream os;
    os << '{';
    for (int k = 0; k < size(); ++k) {
        if (k) os << ',';
        os << (signs_[k] > 0 ? '+' : '-') << indices_[k];
    }
    os << '}';
    return os.str();
}

Problem::Problem(Matrix A_, Vector y_, std::optional<GroundTruth> truth_)
    : A(std::move(A_)), y(std::move(y_)), truth(std::move(truth_)) {
    if (A.rows() < 1 || A.cols() < 1) throw std::invalid_argument("Problem: empty matrix");
    if (y.size() != A.rows()) throw std::invalid_argument("Problem: datum length != rows(A)");
    if (truth) {
        if (truth->u_true.size() != A.cols() || truth->v_true.size() != A.cols() ||
            truth->delta.size() != A.rows())
            throw std::invalid_argument("Problem: ground-truth dimensions mismatch");
        Vector resid = A * (truth->u_true + truth->v_true) + truth->delta - y;
        double scale = std::max(1.0, y.norm());
        if (resid.norm() > 1e-12 * scale)
            throw std::invalid_argument("Problem: ground truth inconsistent with datum");
    }
}

std::string support_to_string(const std::vector<int>& support) {
    std::ostringstream os;
    os << '{';
    for (size_t k = 0; k < support.size(); ++k) {
        if (k) os << ',';
        os << support[k];
    }
    os << '}';
    return os.str();
}

}  // namespace tilepath
