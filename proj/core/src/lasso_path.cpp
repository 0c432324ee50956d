#include "tilepath/lasso_path.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace tilepath {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kCondLimit = 1e12;
// Knots within this relative distance of the current alpha are the one just
// processed and must not be re-selected.
constexpr double kAlphaExcludeRel = 1e-12;
// Relative tolerance for argmax ties.
constexpr double kTieRel = 1e-10;

int sgn_or_plus(double x) { return x < 0.0 ? -1 : 1; }

// Rank-one update L L^T + v v^T -> L' L'^T, in place.
void chol_update(Eigen::Ref<Matrix> L, Vector v) {
    const int k = static_cast<int>(L.rows());
    for (int i = 0; i < k; ++i) {
        double r = std::hypot(L(i, i), v(i));
        double c = r / L(i, i);
        double s = v(i) / L(i, i);
        L(i, i) = r;
        for (int t = i + 1; t < k; ++t) {
            L(t, i) = (L(t, i) + s * v(t)) / c;
            v(t) = c * v(t) - s * L(t, i);
        }
    }
}

}  // namespace

void ActiveGram::reset(int m) {
    L_.resize(0, 0);
    cols_.resize(m, 0);
    order_.clear();
}

void ActiveGram::add(int j, const Vector& b) {
    const int k = size();
    Vector w(k);
    if (k > 0) {
        Vector g = cols_.leftCols(k).transpose() * b;
        w = L_.triangularView<Eigen::Lower>().solve(g);
    }
    double diag_sq = b.squaredNorm() - w.squaredNorm();
    double dmax = L_.diagonal().size() > 0 ? L_.diagonal().maxCoeff() : 0.0;
    dmax = std::max(dmax, std::sqrt(std::max(diag_sq, 0.0)));
    if (!(diag_sq > 0.0) || diag_sq < 1e-14 * b.squaredNorm()) {
        std::ostringstream os;
        os << "singular Gram while adding column " << j
           << " (condition estimate " << (diag_sq > 0.0 ? dmax * dmax / diag_sq : kInf) << ")";
        throw numeric_error(os.str());
    }
    Matrix L(k + 1, k + 1);
    L.setZero();
    L.topLeftCorner(k, k) = L_;
    L.row(k).head(k) = w.transpose();
    L(k, k) = std::sqrt(diag_sq);
    L_ = std::move(L);
    cols_.conservativeResize(Eigen::NoChange, k + 1);
    cols_.col(k) = b;
    order_.push_back(j);

    double est = condition_estimate();
    if (est > kCondLimit) {
        std::ostringstream os;
        os << "ill-conditioned Gram while adding column " << j << " (condition estimate " << est
           << ")";
        throw numeric_error(os.str());
    }
}

void ActiveGram::remove(int j) {
    auto it = std::find(order_.begin(), order_.end(), j);
    if (it == order_.end()) throw std::invalid_argument("ActiveGram::remove: index not active");
    const int p = static_cast<int>(it - order_.begin());
    const int k = size();

    Vector v = L_.col(p).segment(p + 1, k - p - 1);
    Matrix L(k - 1, k - 1);
    L.setZero();
    L.topLeftCorner(p, p) = L_.topLeftCorner(p, p);
    L.bottomLeftCorner(k - 1 - p, p) = L_.block(p + 1, 0, k - 1 - p, p);
    L.bottomRightCorner(k - 1 - p, k - 1 - p) = L_.block(p + 1, p + 1, k - 1 - p, k - 1 - p);
    if (k - 1 - p > 0) chol_update(L.bottomRightCorner(k - 1 - p, k - 1 - p), v);
    L_ = std::move(L);

    for (int c = p; c + 1 < k; ++c) cols_.col(c) = cols_.col(c + 1);
    cols_.conservativeResize(Eigen::NoChange, k - 1);
    order_.erase(it);
}

Vector ActiveGram::solve(const Vector& rhs) const {
    Vector t = L_.triangularView<Eigen::Lower>().solve(rhs);
    return L_.transpose().triangularView<Eigen::Upper>().solve(t);
}

double ActiveGram::condition_estimate() const {
    if (size() == 0) return 1.0;
    double lo = L_.diagonal().minCoeff();
    double hi = L_.diagonal().maxCoeff();
    if (!(lo > 0.0)) return kInf;
    return (hi / lo) * (hi / lo);
}

namespace {

// Shared per-(beta, I, sigma) solves.
struct SupportSolves {
    Vector ybeta;
    Vector h;  // (B_I^T B_I)^{-1} B_I^T y_beta, insertion order
    Vector g;  // (B_I^T B_I)^{-1} sigma, insertion order
};

SupportSolves make_solves(const BetaTransform& bt, double beta, const SignPattern& pattern,
                          const ActiveGram& gram) {
    SupportSolves s;
    s.ybeta = bt.transformed_y(beta);
    const int k = gram.size();
    if (k > 0) {
        Vector sigma(k);
        for (int c = 0; c < k; ++c) sigma(c) = pattern.sign_of(gram.order()[c]);
        s.h = gram.solve(gram.active_columns().transpose() * s.ybeta);
        s.g = gram.solve(sigma);
    }
    return s;
}

ActiveGram fresh_gram(const BetaTransform& bt, double beta, const SignPattern& pattern) {
    ActiveGram gram(bt.m());
    for (int j : pattern.indices()) gram.add(j, bt.column(beta, j));
    return gram;
}

std::vector<Candidate> candidates_from(const BetaTransform& bt, double beta,
                                       const SignPattern& pattern, int prev_left,
                                       PathVariant variant, const ActiveGram& gram,
                                       const SupportSolves& s) {
    const int n = bt.n();
    std::vector<Candidate> out(n, Candidate{-kInf, 0});

    Vector num, tvec;
    if (gram.size() == 0) {
        num = bt.correlations(beta, s.ybeta);
        tvec = Vector::Zero(n);
    } else {
        Vector resid = s.ybeta - gram.active_columns() * s.h;
        num = bt.correlations(beta, resid);
        tvec = bt.correlations(beta, gram.active_columns() * s.g);
    }

    for (int j = 0; j < n; ++j) {
        int pos = pattern.position(j);
        if (pos >= 0) {
            if (variant == PathVariant::lars) continue;
            int c = static_cast<int>(std::find(gram.order().begin(), gram.order().end(), j) -
                                     gram.order().begin());
            double v = s.h(c) / s.g(c);
            out[j] = Candidate{std::isfinite(v) ? v : -kInf, 0};
        } else {
            int gamma = sgn_or_plus(num(j));
            if (j == prev_left) gamma = -gamma;
            double den = gamma - tvec(j);
            double v = num(j) / den;
            out[j] = Candidate{std::isfinite(v) ? v : -kInf, gamma};
        }
    }
    return out;
}

}  // namespace

std::vector<Candidate> candidate_alphas(const BetaTransform& bt, double beta,
                                        const SignPattern& pattern, int prev_left,
                                        PathVariant variant) {
    ActiveGram gram = fresh_gram(bt, beta, pattern);
    SupportSolves s = make_solves(bt, beta, pattern, gram);
    return candidates_from(bt, beta, pattern, prev_left, variant, gram, s);
}

Candidate candidate_alpha(const BetaTransform& bt, double beta, const SignPattern& pattern,
                          int j, bool prev_left) {
    ActiveGram gram = fresh_gram(bt, beta, pattern);
    SupportSolves s = make_solves(bt, beta, pattern, gram);

    int pos = pattern.position(j);
    if (pos >= 0) {
        int c = static_cast<int>(std::find(gram.order().begin(), gram.order().end(), j) -
                                 gram.order().begin());
        double v = s.h(c) / s.g(c);
        return Candidate{std::isfinite(v) ? v : -kInf, 0};
    }
    Vector bj = bt.column(beta, j);
    double num, t;
    if (gram.size() == 0) {
        num = bj.dot(s.ybeta);
        t = 0.0;
    } else {
        num = bj.dot(s.ybeta - gram.active_columns() * s.h);
        t = bj.dot(gram.active_columns() * s.g);
    }
    int gamma = sgn_or_plus(num);
    if (prev_left) gamma = -gamma;
    double v = num / (gamma - t);
    return Candidate{std::isfinite(v) ? v : -kInf, gamma};
}

double candidate_alpha_fixed_gamma(const BetaTransform& bt, double beta,
                                   const SignPattern& pattern, int j, int gamma) {
    ActiveGram gram = fresh_gram(bt, beta, pattern);
    SupportSolves s = make_solves(bt, beta, pattern, gram);
    int pos = pattern.position(j);
    if (pos >= 0) {
        int c = static_cast<int>(std::find(gram.order().begin(), gram.order().end(), j) -
                                 gram.order().begin());
        return s.h(c) / s.g(c);
    }
    Vector bj = bt.column(beta, j);
    double num, t;
    if (gram.size() == 0) {
        num = bj.dot(s.ybeta);
        t = 0.0;
    } else {
        num = bj.dot(s.ybeta - gram.active_columns() * s.h);
        t = bj.dot(gram.active_columns() * s.g);
    }
    return num / (gamma - t);
}

namespace {

std::optional<Knot> next_knot_impl(const BetaTransform& bt, double beta,
                                   const SignPattern& pattern, double alpha_current,
                                   int prev_left, PathVariant variant, const ActiveGram& gram,
                                   const SupportSolves& solves) {
    auto cands = candidates_from(bt, beta, pattern, prev_left, variant, gram, solves);
    double cutoff = std::isfinite(alpha_current) ? alpha_current * (1.0 - kAlphaExcludeRel) : kInf;

    double best = -kInf;
    for (int j = 0; j < static_cast<int>(cands.size()); ++j) {
        double v = cands[j].value;
        if (!std::isfinite(v) || v >= cutoff) continue;
        best = std::max(best, v);
    }
    if (!(best > 0.0)) return std::nullopt;  // path runs to alpha -> 0

    Knot k;
    k.alpha = best;
    for (int j = 0; j < static_cast<int>(cands.size()); ++j) {
        double v = cands[j].value;
        if (!std::isfinite(v) || v >= cutoff) continue;
        if (v >= best - kTieRel * std::abs(best)) {
            k.movers.push_back(j);
            k.gammas.push_back(cands[j].gamma);
        }
    }
    k.tie = k.movers.size() > 1;
    return k;
}

}  // namespace

std::optional<Knot> next_knot(const BetaTransform& bt, double beta, const SignPattern& pattern,
                              double alpha_current, int prev_left, PathVariant variant) {
    ActiveGram gram = fresh_gram(bt, beta, pattern);
    SupportSolves solves = make_solves(bt, beta, pattern, gram);
    return next_knot_impl(bt, beta, pattern, alpha_current, prev_left, variant, gram, solves);
}

PathResult path(const BetaTransform& bt, double beta, int s_max, PathVariant variant) {
    if (s_max > bt.m()) throw std::invalid_argument("path: s_max must be <= m");
    PathResult res;
    SignPattern pattern;
    ActiveGram gram(bt.m());
    double alpha = kInf;
    int prev_left = -1;
    const int cap = 50 * std::max(1, s_max);

    while (true) {
        SupportSolves solves = make_solves(bt, beta, pattern, gram);
        auto nk = next_knot_impl(bt, beta, pattern, alpha, prev_left, variant, gram, solves);
        if (!nk) break;

        // Ties are recorded and broken by smallest index (Assumption of
        // finitely many ties); applying the full argmax set would make the
        // Gram singular for duplicated columns.
        std::vector<int> movers(nk->movers.begin(),
                                nk->movers.begin() + (nk->tie ? 1 : nk->movers.size()));
        std::vector<int> gammas(nk->gammas.begin(),
                                nk->gammas.begin() + (nk->tie ? 1 : nk->gammas.size()));

        SignPattern next = pattern;
        int leavers = 0, last_left = -1;
        for (size_t i = 0; i < movers.size(); ++i) {
            int j = movers[i];
            if (gammas[i] != 0) {
                next = next.with(j, gammas[i]);
            } else {
                next = next.without(j);
                ++leavers;
                last_left = j;
            }
        }
        if (next.size() > s_max) break;

        for (size_t i = 0; i < movers.size(); ++i) {
            int j = movers[i];
            if (gammas[i] != 0)
                gram.add(j, bt.column(beta, j));
            else
                gram.remove(j);
        }
        if (nk->tie) ++res.tie_events;
        res.knots.push_back(PathKnot{nk->alpha, next, movers, gammas, nk->tie});
        if (static_cast<int>(res.knots.size()) > cap) {
            std::ostringstream os;
            os << "path: knot cap " << cap << " exceeded at beta=" << beta;
            throw numeric_error(os.str());
        }
        prev_left = (leavers == 1) ? last_left : -1;
        alpha = nk->alpha;
        pattern = std::move(next);
    }
    return res;
}

Vector solve_on_support(const BetaTransform& bt, double beta, const SignPattern& pattern,
                        double alpha) {
    if (pattern.empty()) return Vector(0);
    ActiveGram gram = fresh_gram(bt, beta, pattern);
    SupportSolves s = make_solves(bt, beta, pattern, gram);
    Vector u = s.h - alpha * s.g;  // insertion order == sorted support order
    return u;
}

Vector solve_on_support_full(const BetaTransform& bt, double beta, const SignPattern& pattern,
                             double alpha) {
    Vector u = Vector::Zero(bt.n());
    Vector on = solve_on_support(bt, beta, pattern, alpha);
    const auto& idx = pattern.indices();
    for (size_t k = 0; k < idx.size(); ++k) u(idx[k]) = on(static_cast<int>(k));
    return u;
}

double kkt_check(const BetaTransform& bt, double beta, double alpha, const Vector& u) {
    Vector ybeta = bt.transformed_y(beta);
    Vector Bu = Vector::Zero(bt.m());
    for (int j = 0; j < u.size(); ++j)
        if (u(j) != 0.0) Bu += bt.column(beta, j) * u(j);
    Vector corr = bt.correlations(beta, ybeta - Bu);
    double viol = 0.0;
    for (int j = 0; j < u.size(); ++j) {
        if (u(j) != 0.0)
            viol = std::max(viol, std::abs(corr(j) - alpha * (u(j) > 0 ? 1.0 : -1.0)));
        else
            viol = std::max(viol, std::max(0.0, std::abs(corr(j)) - alpha));
    }
    return viol;
}

}  // namespace tilepath
