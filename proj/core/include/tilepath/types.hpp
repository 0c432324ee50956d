#pragma once

#include <Eigen/Core>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace tilepath {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Numerical failure (singular Gram, non-convergent root find, ...).
class numeric_error : public std::runtime_error {
public:
    explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

/// Support set together with its sign pattern.
///
/// Indices are kept sorted; signs[k] is the sign (+1/-1) of the entry at
/// indices[k]. The key set *is* the support.
class SignPattern {
public:
    SignPattern() = default;
    SignPattern(std::vector<int> indices, std::vector<int> signs);

    int size() const { return static_cast<int>(indices_.size()); }
    bool empty() const { return indices_.empty(); }

    const std::vector<int>& indices() const { return indices_; }
    const std::vector<int>& signs() const { return signs_; }

    bool contains(int j) const;
    /// Sign of index j; throws if j is not in the support.
    int sign_of(int j) const;
    /// Position of j within indices(), or -1.
    int position(int j) const;

    /// Copy with index j added (sign gamma). j must not be present.
    SignPattern with(int j, int gamma) const;
    /// Copy with index j removed. j must be present.
    SignPattern without(int j) const;

    bool operator==(const SignPattern& o) const {
        return indices_ == o.indices_ && signs_ == o.signs_;
    }
    bool operator!=(const SignPattern& o) const { return !(*this == o); }
    /// Lexicographic on (indices, signs); used for deterministic ordering.
    bool operator<(const SignPattern& o) const;

    std::string to_string() const;

private:
    std::vector<int> indices_;
    std::vector<int> signs_;
};

/// Ground truth of a synthetic unmixing instance.
struct GroundTruth {
    Vector u_true;
    Vector v_true;
    Vector delta;
};

/// Unmixing problem instance: A(u+v) + delta = y.
struct Problem {
    Matrix A;
    Vector y;
    std::optional<GroundTruth> truth;

    Problem(Matrix A_, Vector y_, std::optional<GroundTruth> truth_ = std::nullopt);

    int m() const { return static_cast<int>(A.rows()); }
    int n() const { return static_cast<int>(A.cols()); }
};

std::string support_to_string(const std::vector<int>& support);

}  // namespace tilepath
