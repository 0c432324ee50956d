#include "oracles.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace tilepath::oracle {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double soft(double x, double t) {
    if (x > t) return x - t;
    if (x < -t) return x + t;
    return 0.0;
}

double duality_gap(const Matrix& B, const Vector& y, double alpha, const Vector& u) {
    Vector r = y - B * u;
    Vector c = B.transpose() * r;
    double cmax = c.size() ? c.cwiseAbs().maxCoeff() : 0.0;
    double scale = cmax > alpha ? alpha / cmax : 1.0;
    Vector nu = scale * r;
    double primal = 0.5 * r.squaredNorm() + alpha * u.cwiseAbs().sum();
    double dual = y.dot(nu) - 0.5 * nu.squaredNorm();
    return primal - dual;
}

}  // namespace

LassoSolution fista_lasso(const Matrix& B, const Vector& y, double alpha, double gap_tol,
                          int max_iter) {
    const int n = static_cast<int>(B.cols());
    Eigen::SelfAdjointEigenSolver<Matrix> es(B.transpose() * B);
    double L = std::max(es.eigenvalues().maxCoeff(), 1e-300);

    Vector u = Vector::Zero(n), z = u, u_prev = u;
    double t = 1.0;
    double tol = gap_tol * std::max(1.0, 0.5 * y.squaredNorm());
    LassoSolution out{u, kInf, 0};
    for (int it = 1; it <= max_iter; ++it) {
        Vector g = B.transpose() * (B * z - y);
        Vector u_next(n);
        for (int j = 0; j < n; ++j) u_next(j) = soft(z(j) - g(j) / L, alpha / L);
        double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        Vector diff = u_next - u;
        // adaptive restart on a momentum reversal
        if ((z - u_next).dot(diff) > 0) {
            z = u_next;
            t_next = 1.0;
        } else {
            z = u_next + ((t - 1.0) / t_next) * diff;
        }
        u_prev = u;
        u = u_next;
        t = t_next;
        if (it % 10 == 0 || it == max_iter) {
            double gap = duality_gap(B, y, alpha, u);
            if (gap <= tol) {
                out.u = u;
                out.gap = gap;
                out.iterations = it;
                return out;
            }
        }
    }
    out.u = u;
    out.gap = duality_gap(B, y, alpha, u);
    out.iterations = max_iter;
    return out;
}

Vector cd_lasso(const Matrix& B, const Vector& y, double alpha, Vector u0, double tol,
                int max_sweeps) {
    const int n = static_cast<int>(B.cols());
    Vector norms(n);
    for (int j = 0; j < n; ++j) norms(j) = B.col(j).squaredNorm();
    Vector u = std::move(u0);
    Vector r = y - B * u;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double delta = 0.0;
        for (int j = 0; j < n; ++j) {
            if (norms(j) == 0.0) continue;
            double old = u(j);
            double rho = B.col(j).dot(r) + norms(j) * old;
            double next = soft(rho, alpha) / norms(j);
            if (next != old) {
                u(j) = next;
                r += B.col(j) * (old - next);
                delta = std::max(delta, std::abs(next - old));
            }
        }
        if (delta <= tol) break;
    }
    return u;
}

std::pair<Matrix, Vector> dense_transform(const Matrix& A, const Vector& y, double beta) {
    const int m = static_cast<int>(A.rows());
    Matrix S = Matrix::Identity(m, m) + A * A.transpose() / beta;
    Eigen::SelfAdjointEigenSolver<Matrix> es(S);
    Vector w = es.eigenvalues().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
    Matrix M = es.eigenvectors() * w.asDiagonal() * es.eigenvectors().transpose();
    return {M * A, M * y};
}

SignPattern solve_pattern(const Matrix& A, const Vector& y, double beta, double alpha,
                          double gap_tol) {
    auto [B, yb] = dense_transform(A, y, beta);
    LassoSolution sol = fista_lasso(B, yb, alpha, gap_tol);

    // screen by near-active correlations, then polish on the screened set
    Vector c = B.transpose() * (yb - B * sol.u);
    double umax = sol.u.size() ? sol.u.cwiseAbs().maxCoeff() : 0.0;
    std::vector<int> screened;
    for (int j = 0; j < B.cols(); ++j)
        if (std::abs(c(j)) >= alpha * (1.0 - 1e-5) || std::abs(sol.u(j)) > 1e-7 * std::max(1.0, umax))
            screened.push_back(j);

    Matrix Bs(B.rows(), static_cast<int>(screened.size()));
    Vector us(static_cast<int>(screened.size()));
    for (size_t k = 0; k < screened.size(); ++k) {
        Bs.col(static_cast<int>(k)) = B.col(screened[k]);
        us(static_cast<int>(k)) = sol.u(screened[k]);
    }
    Vector polished = cd_lasso(Bs, yb, alpha, us);

    double pmax = polished.size() ? polished.cwiseAbs().maxCoeff() : 0.0;
    std::vector<int> support, signs;
    for (size_t k = 0; k < screened.size(); ++k) {
        double v = polished(static_cast<int>(k));
        if (std::abs(v) > 1e-9 * std::max(1.0, pmax)) {
            support.push_back(screened[k]);
            signs.push_back(v > 0 ? 1 : -1);
        }
    }
    return SignPattern(support, signs);
}

std::vector<PathStep> textbook_lasso_path(const Matrix& A, const Vector& y, int s_max) {
    const int n = static_cast<int>(A.cols());
    std::vector<int> I;
    std::vector<int> sigma;
    std::vector<PathStep> steps;
    double alpha = kInf;

    for (int knot = 0; knot < 50 * std::max(1, s_max) + 5; ++knot) {
        Matrix Ai(A.rows(), static_cast<int>(I.size()));
        for (size_t k = 0; k < I.size(); ++k) Ai.col(static_cast<int>(k)) = A.col(I[k]);
        Vector h, g;
        if (!I.empty()) {
            Matrix G = Ai.transpose() * Ai;
            Eigen::LDLT<Matrix> ldlt(G);
            Vector sig(static_cast<int>(I.size()));
            for (size_t k = 0; k < I.size(); ++k) sig(static_cast<int>(k)) = sigma[k];
            h = ldlt.solve(Ai.transpose() * y);
            g = ldlt.solve(sig);
        }

        double best = -kInf;
        int best_j = -1, best_sign = 0;
        bool best_leave = false;
        double cutoff = std::isfinite(alpha) ? alpha * (1.0 - 1e-12) : kInf;

        Vector resid = I.empty() ? y : Vector(y - Ai * h);
        Vector num = A.transpose() * resid;
        Vector tv = I.empty() ? Vector(Vector::Zero(n)) : Vector(A.transpose() * (Ai * g));
        for (int j = 0; j < n; ++j) {
            if (std::find(I.begin(), I.end(), j) != I.end()) continue;
            for (int gam : {+1, -1}) {
                double den = gam - tv(j);
                if (den == 0.0) continue;
                double cand = num(j) / den;
                if (!std::isfinite(cand) || cand <= 0 || cand >= cutoff) continue;
                if (cand > best) {
                    best = cand;
                    best_j = j;
                    best_sign = gam;
                    best_leave = false;
                }
            }
        }
        for (size_t k = 0; k < I.size(); ++k) {
            double cand = h(static_cast<int>(k)) / g(static_cast<int>(k));
            if (!std::isfinite(cand) || cand <= 0 || cand >= cutoff) continue;
            if (cand > best) {
                best = cand;
                best_j = I[k];
                best_sign = 0;
                best_leave = true;
            }
        }
        if (best_j < 0) break;

        if (best_leave) {
            size_t pos = static_cast<size_t>(std::find(I.begin(), I.end(), best_j) - I.begin());
            I.erase(I.begin() + static_cast<long>(pos));
            sigma.erase(sigma.begin() + static_cast<long>(pos));
        } else {
            if (static_cast<int>(I.size()) + 1 > s_max) break;
            I.push_back(best_j);
            sigma.push_back(best_sign);
        }
        std::vector<int> sorted_I = I;
        std::vector<int> sorted_s(sorted_I.size());
        std::vector<size_t> order(I.size());
        for (size_t k = 0; k < I.size(); ++k) order[k] = k;
        std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return I[a] < I[b]; });
        for (size_t k = 0; k < I.size(); ++k) {
            sorted_I[k] = I[order[k]];
            sorted_s[k] = sigma[order[k]];
        }
        steps.push_back(PathStep{best, sorted_I, sorted_s});
        alpha = best;
    }
    return steps;
}

}  // namespace tilepath::oracle
