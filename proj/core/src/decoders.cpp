#include "tilepath/decoders.hpp"

#include "tilepath/transform.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>

namespace tilepath {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

Vector least_squares(const Matrix& A, const std::vector<int>& idx, const Vector& y) {
    Matrix Ai(A.rows(), static_cast<int>(idx.size()));
    for (size_t k = 0; k < idx.size(); ++k) Ai.col(static_cast<int>(k)) = A.col(idx[k]);
    Eigen::ColPivHouseholderQR<Matrix> qr(Ai);
    if (qr.rank() < Ai.cols()) throw numeric_error("least squares: rank-deficient columns");
    return qr.solve(y);
}

std::vector<int> largest_magnitude(const Vector& u, int s) {
    std::vector<int> order(static_cast<size_t>(u.size()));
    for (int i = 0; i < u.size(); ++i) order[static_cast<size_t>(i)] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        double va = std::abs(u(a)), vb = std::abs(u(b));
        if (va != vb) return va > vb;
        return a < b;
    });
    order.resize(static_cast<size_t>(s));
    std::sort(order.begin(), order.end());
    return order;
}

std::vector<std::vector<int>> path_supports(const PathResult& pr, int s_max) {
    std::vector<std::vector<int>> out;
    std::set<std::vector<int>> seen;
    std::vector<int> empty;
    out.push_back(empty);
    seen.insert(empty);
    for (const auto& knot : pr.knots) {
        if (knot.pattern.size() > s_max) continue;
        if (seen.insert(knot.pattern.indices()).second) out.push_back(knot.pattern.indices());
    }
    return out;
}

}  // namespace

DecoderResult omp(const Problem& problem, int s) {
    if (s > problem.m()) throw std::invalid_argument("omp: s must be <= m");
    auto t0 = Clock::now();
    DecoderResult res;
    res.method = "omp";

    std::vector<int> support;
    Vector resid = problem.y;
    Vector coef;
    for (int step = 0; step < s; ++step) {
        Vector corr = problem.A.transpose() * resid;
        int best = -1;
        double best_val = -1.0;
        for (int j = 0; j < problem.n(); ++j) {
            if (std::find(support.begin(), support.end(), j) != support.end()) continue;
            double v = std::abs(corr(j));
            if (v > best_val) {
                best_val = v;
                best = j;
            }
        }
        support.push_back(best);
        std::sort(support.begin(), support.end());
        coef = least_squares(problem.A, support, problem.y);
        Vector fit = Vector::Zero(problem.m());
        for (size_t k = 0; k < support.size(); ++k)
            fit += problem.A.col(support[k]) * coef(static_cast<int>(k));
        resid = problem.y - fit;
    }
    res.supports.push_back(support);
    res.coefficients.push_back(s > 0 ? coef : Vector(0));
    res.wall_time_ms = ms_since(t0);
    return res;
}

DecoderResult iht_warm(const Problem& problem, int s) {
    if (s > problem.m()) throw std::invalid_argument("iht_warm: s must be <= m");
    auto t0 = Clock::now();
    DecoderResult res;
    res.method = "l1iht";

    if (s == 0) {
        res.supports.push_back({});
        res.coefficients.push_back(Vector(0));
        res.wall_time_ms = ms_since(t0);
        return res;
    }

    BetaTransform bt = decompose(problem);
    double mu = 1.0 / std::max(bt.eigenvalues().maxCoeff(), 1e-300);

    // Warm start: Lasso solution at the largest alpha with >= s active entries,
    // evaluated just below the knot so the entering coordinate is nonzero.
    Vector u = Vector::Zero(problem.n());
    PathResult pr = path(bt, kLassoLimitBeta, s, PathVariant::lasso);
    for (const auto& knot : pr.knots) {
        if (knot.pattern.size() >= s) {
            Vector on = solve_on_support_full(bt, kLassoLimitBeta, knot.pattern,
                                              knot.alpha * (1.0 - 1e-9));
            u = on;
            break;
        }
    }
    {
        auto keep = largest_magnitude(u, s);
        Vector thr = Vector::Zero(problem.n());
        for (int j : keep) thr(j) = u(j);
        u = thr;
    }

    std::vector<int> support = largest_magnitude(u, s);
    const int cap = 500;
    for (int it = 0; it < cap; ++it) {
        Vector grad_step = u + mu * (problem.A.transpose() * (problem.y - problem.A * u));
        auto keep = largest_magnitude(grad_step, s);
        Vector next = Vector::Zero(problem.n());
        for (int j : keep) next(j) = grad_step(j);
        u = next;
        if (keep == support) break;
        support = keep;
    }

    res.supports.push_back(support);
    try {
        res.coefficients.push_back(least_squares(problem.A, support, problem.y));
    } catch (const numeric_error&) {
        Vector on(static_cast<int>(support.size()));
        for (size_t k = 0; k < support.size(); ++k) on(static_cast<int>(k)) = u(support[k]);
        res.coefficients.push_back(on);
        res.notes = "refit skipped: rank-deficient support";
    }
    res.wall_time_ms = ms_since(t0);
    return res;
}

DecoderResult lasso_supports(const Problem& problem, int s_max) {
    if (s_max > problem.m()) throw std::invalid_argument("lasso_supports: s_max must be <= m");
    auto t0 = Clock::now();
    DecoderResult res;
    res.method = "lasso";
    BetaTransform bt = decompose(problem);
    PathResult pr = path(bt, kLassoLimitBeta, s_max, PathVariant::lasso);
    res.tie_events = pr.tie_events;
    res.supports = path_supports(pr, s_max);
    for (const auto& sup : res.supports) {
        if (sup.empty()) {
            res.coefficients.push_back(Vector(0));
            continue;
        }
        try {
            res.coefficients.push_back(least_squares(problem.A, sup, problem.y));
        } catch (const numeric_error&) {
            res.coefficients.push_back(Vector(0));
        }
    }
    res.wall_time_ms = ms_since(t0);
    return res;
}

Matrix plasso_preconditioner(const Matrix& A) {
    Eigen::JacobiSVD<Matrix> svd(A, Eigen::ComputeThinU);
    const Vector& sv = svd.singularValues();
    double cut = 1e-10 * (sv.size() ? sv(0) : 0.0);
    Vector inv = Vector::Zero(sv.size());
    for (int i = 0; i < sv.size(); ++i) inv(i) = sv(i) > cut ? 1.0 / sv(i) : 0.0;
    return svd.matrixU() * inv.asDiagonal() * svd.matrixU().transpose();
}

DecoderResult plasso_supports(const Problem& problem, int s_max) {
    if (s_max > problem.m()) throw std::invalid_argument("plasso_supports: s_max must be <= m");
    auto t0 = Clock::now();
    Matrix F = plasso_preconditioner(problem.A);
    Problem pre(F * problem.A, F * problem.y);
    DecoderResult res = lasso_supports(pre, s_max);
    res.method = "plasso";
    // Refit against the original problem, not the preconditioned one.
    res.coefficients.clear();
    for (const auto& sup : res.supports) {
        if (sup.empty()) {
            res.coefficients.push_back(Vector(0));
            continue;
        }
        try {
            res.coefficients.push_back(least_squares(problem.A, sup, problem.y));
        } catch (const numeric_error&) {
            res.coefficients.push_back(Vector(0));
        }
    }
    res.wall_time_ms = ms_since(t0);
    return res;
}

}  // namespace tilepath
