#include "tilepath/selection.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

namespace tilepath {

std::set<SignPattern> enumerate_supports(const TilingGraph& graph, int s) {
    if (s > graph.s_max)
        throw std::invalid_argument("enumerate_supports: s exceeds the tiling depth");
    std::set<SignPattern> out;
    for (int id : graph.alive_ids()) {
        const Tile& t = graph.tile(id);
        if (t.support_size() == s) out.insert(t.pattern);
    }
    return out;
}

SupportCandidate regress(const Problem& problem, const std::vector<int>& support) {
    SupportCandidate cand;
    cand.support = support;

    Matrix Ai(problem.m(), static_cast<int>(support.size()));
    for (size_t k = 0; k < support.size(); ++k) Ai.col(static_cast<int>(k)) = problem.A.col(support[k]);
    if (!support.empty()) {
        Eigen::ColPivHouseholderQR<Matrix> qr(Ai);
        if (qr.rank() < Ai.cols()) throw numeric_error("regress: rank-deficient support columns");
        cand.u_hat = qr.solve(problem.y);
    } else {
        cand.u_hat = Vector(0);
    }

    Vector resid = problem.y - (support.empty() ? Vector::Zero(problem.m())
                                                : Vector(Ai * cand.u_hat));
    Eigen::JacobiSVD<Matrix> svd(problem.A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector& sv = svd.singularValues();
    double cut = 1e-10 * (sv.size() ? sv(0) : 0.0);
    Vector z = svd.matrixU().transpose() * resid;
    for (int i = 0; i < sv.size(); ++i) z(i) = sv(i) > cut ? z(i) / sv(i) : 0.0;
    cand.v_hat = svd.matrixV() * z;

    cand.score = selection_score(cand);
    return cand;
}

double selection_score(const SupportCandidate& cand) {
    double vmax = cand.v_hat.size() ? cand.v_hat.cwiseAbs().maxCoeff() : 0.0;
    double umin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < cand.u_hat.size(); ++i) umin = std::min(umin, std::abs(cand.u_hat(i)));
    // a noise estimate at round-off scale is a vanished one; the noiseless
    // case must rank highest
    double floor = 1e-14 * std::max(1.0, std::isfinite(umin) ? umin : 1.0);
    if (vmax <= floor) return std::numeric_limits<double>::infinity();
    if (!std::isfinite(umin)) return std::numeric_limits<double>::infinity();  // empty support
    return umin / vmax;
}

int symmetric_difference(const std::vector<int>& a, const std::vector<int>& b) {
    std::vector<int> diff;
    std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(),
                                  std::back_inserter(diff));
    return static_cast<int>(diff.size());
}

std::vector<int> rank_supports(const Problem& problem,
                               const std::vector<std::vector<int>>& candidates, int s) {
    if (candidates.empty()) throw std::invalid_argument("rank_supports: empty candidate set");
    std::vector<std::pair<std::vector<int>, double>> scored;
    for (const auto& c : candidates) {
        if (static_cast<int>(c.size()) != s)
            throw std::invalid_argument("rank_supports: candidate size mismatch");
        try {
            scored.emplace_back(c, regress(problem, c).score);
        } catch (const numeric_error&) {
            // rank-deficient candidate skipped
        }
    }
    if (scored.empty()) throw numeric_error("rank_supports: every candidate failed regression");

    double best = -std::numeric_limits<double>::infinity();
    for (auto& [c, sc] : scored) best = std::max(best, sc);
    std::vector<std::vector<int>> tied;
    for (auto& [c, sc] : scored)
        if (sc == best) tied.push_back(c);
    std::sort(tied.begin(), tied.end());
    const std::vector<int>& anchor = tied.front();
    std::vector<int> pick = anchor;
    int pick_sd = 0;
    for (const auto& c : tied) {
        int sd = symmetric_difference(c, anchor);
        if (sd < pick_sd || (sd == pick_sd && c < pick)) {
            pick = c;
            pick_sd = sd;
        }
    }
    return pick;
}

std::vector<int> oracle_closest(const std::vector<std::vector<int>>& candidates,
                                const std::vector<int>& true_support) {
    if (candidates.empty()) throw std::invalid_argument("oracle_closest: empty candidate set");
    const std::vector<int>* best = nullptr;
    int best_sd = 0;
    for (const auto& c : candidates) {
        int sd = symmetric_difference(c, true_support);
        if (!best || sd < best_sd || (sd == best_sd && c < *best)) {
            best = &c;
            best_sd = sd;
        }
    }
    return *best;
}

}  // namespace tilepath
