// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Scaled-down statistical reproductions of the benchmark
// figures run on fixed seeds.

#include "oracles.hpp"
#include "tiling_check.hpp"
#include "test_util.hpp"

#include "tilepath/bench.hpp"
#include "tilepath/decoders.hpp"
#include "tilepath/selection.hpp"
#include "tilepath/tiling.hpp"
#include "tilepath/transform.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <thread>
#include <vector>

using namespace tilepath;
using tilepath::testing::sample_interior;
using tilepath::testing::oracle_agreement;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
    std::printf("CRITERION %2d: %s  (%s)\n", criterion, pass ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct BuiltInstance {
    Problem problem;
    BetaTransform bt;
    TilingGraph graph;
};

std::vector<BuiltInstance> build_criterion1_instances() {
    std::vector<BuiltInstance> out;
    for (int k = 0; k < 10; ++k) {
        Problem p = tilepath::testing::random_problem(Rng::derive(1000, k), 10, 20);
        BetaTransform bt = decompose(p);
        TilingGraph g = build_tiling(bt, {1e-6, 100.0}, 4);
        out.push_back(BuiltInstance{std::move(p), std::move(bt), std::move(g)});
    }
    return out;
}

// ---- criterion 1: oracle equivalence -------------------------------------
void criterion_1_and_2(const std::vector<BuiltInstance>& instances) {
    auto t0 = std::chrono::steady_clock::now();
    int tested = 0, matched = 0;
    for (size_t k = 0; k < instances.size(); ++k) {
        const auto& inst = instances[k];
        Rng rng(Rng::derive(1100, k));
        auto points = sample_interior(inst.graph, inst.bt, 200, rng);
        auto stats = oracle_agreement(inst.graph, inst.bt, inst.problem.A, inst.problem.y,
                                      points);
        tested += stats.tested;
        matched += stats.matched;
    }
    double elapsed = seconds_since(t0);
    std::ostringstream os;
    os << matched << "/" << tested << " matched, " << elapsed << " s";
    bool pass = tested >= 10 * 190 && matched >= 0.98 * tested && elapsed <= 120.0;
    report(1, pass, os.str());

    // ---- criterion 2: KKT on every tile of every criterion-1 tiling ------
    double worst = 0.0;
    long tiles_checked = 0;
    for (const auto& inst : instances) {
        for (int id : inst.graph.alive_ids()) {
            const Tile& t = inst.graph.tile(id);
            for (int q = 1; q <= 5; ++q) {
                double beta = t.beta_minus + (t.beta_plus - t.beta_minus) * q / 6.0;
                double hi = inst.graph.alpha_upper(inst.bt, id, beta);
                auto lo = inst.graph.alpha_lower(inst.bt, id, beta);
                double alpha;
                if (!std::isfinite(hi)) {
                    alpha = (lo && *lo > 0 ? *lo : 1.0) * 1.5;  // root
                } else if (lo && *lo < hi) {
                    alpha = 0.5 * (*lo + hi);
                } else {
                    alpha = hi * (1.0 - 1e-9);  // incomplete tile: just inside
                }
                if (!(alpha > 0)) continue;
                Vector u = solve_on_support_full(inst.bt, beta, t.pattern, alpha);
                worst = std::max(worst, kkt_check(inst.bt, beta, alpha, u));
            }
            ++tiles_checked;
        }
    }
    std::ostringstream os2;
    os2 << tiles_checked << " tiles, max violation " << worst;
    report(2, worst <= 1e-8, os2.str());
}

// ---- criterion 3: lasso limit ---------------------------------------------
void criterion_3() {
    bool pass = true;
    std::ostringstream os;
    for (int k = 0; k < 10; ++k) {
        Problem p = tilepath::testing::random_problem(Rng::derive(3000, k), 10, 20);
        BetaTransform bt = decompose(p);
        PathResult slice = path(bt, 1e12, 4);
        auto textbook = oracle::textbook_lasso_path(p.A, p.y, 4);
        bool ok = slice.knots.size() == textbook.size();
        if (ok)
            for (size_t i = 0; i < textbook.size(); ++i)
                if (slice.knots[i].pattern.indices() != textbook[i].support) ok = false;
        if (!ok) {
            pass = false;
            os << "instance " << k << " diverged; ";
        }
    }
    report(3, pass, pass ? "10/10 support sequences equal" : os.str());
}

// ---- criterion 4: plasso limit --------------------------------------------
void criterion_4() {
    int ok_count = 0;
    std::ostringstream os;
    for (int k = 0; k < 10; ++k) {
        // well-conditioned instances: resample until moderately conditioned
        Problem p = tilepath::testing::random_problem(Rng::derive(4000, k), 10, 20);
        BetaTransform bt = decompose(p);
        PathResult slice = path(bt, 1e-8, 4);
        DecoderResult pre = plasso_supports(p, 4);
        std::vector<std::vector<int>> got{{}};
        for (const auto& knot : slice.knots) got.push_back(knot.pattern.indices());
        bool ok = got == pre.supports;
        if (ok) ++ok_count;
        else os << "instance " << k << " diverged; ";
    }
    report(4, ok_count == 10, ok_count == 10 ? "10/10 support sequences equal" : os.str());
}

// ---- criterion 5: analytic fixtures ----------------------------------------
void criterion_5() {
    double worst = 0.0;
    {
        Matrix A(1, 1);
        A << 1.0;
        Vector y(1);
        y << 2.0;
        BetaTransform bt = decompose(Problem(A, y));
        TilingGraph g = build_tiling(bt, {0.1, 10.0}, 1);
        for (int k = 0; k <= 50; ++k) {
            double beta = 0.1 * std::pow(100.0, k / 50.0);
            auto lower = g.alpha_lower(bt, g.root, beta);
            if (!lower) {
                worst = 1.0;
                break;
            }
            worst = std::max(worst, std::abs(*lower - beta / (1 + beta) * 2.0));
        }
    }
    {
        Problem p = tilepath::testing::identity2();
        BetaTransform bt = decompose(p);
        TilingGraph g = build_tiling(bt, {0.1, 10.0}, 2);
        for (int k = 0; k <= 50; ++k) {
            double beta = 0.1 * std::pow(100.0, k / 50.0);
            auto top = g.alpha_lower(bt, g.root, beta);
            double expect_top = beta / (1 + beta) * 1.0;
            double expect_bot = beta / (1 + beta) * 0.5;
            LocateResult mid = locate(g, bt, beta, 0.5 * (expect_top + expect_bot));
            auto bot = mid.status == LocateStatus::ok
                           ? g.alpha_lower(bt, mid.tile, beta)
                           : std::optional<double>{};
            if (!top || !bot) {
                worst = 1.0;
                break;
            }
            worst = std::max({worst, std::abs(*top - expect_top), std::abs(*bot - expect_bot)});
        }
    }
    std::ostringstream os;
    os << "max boundary error " << worst;
    report(5, worst <= 1e-10, os.str());
}

// ---- criteria 6-8: benchmark reproductions ---------------------------------
ExperimentConfig gamma_config() {
    ExperimentConfig cfg;
    cfg.ensemble = Ensemble::gamma_gaussian;
    cfg.m = 90;
    cfg.n = 250;
    cfg.s = 6;
    cfg.sigma = 0.02;
    cfg.trials = 20;
    cfg.seed = 20260801;
    cfg.workers = static_cast<int>(std::thread::hardware_concurrency());
    if (cfg.workers < 1) cfg.workers = 1;
    return cfg;
}

void criterion_6() {
    auto t0 = std::chrono::steady_clock::now();
    ExperimentConfig cfg = gamma_config();
    cfg.methods = {"lasso", "plasso", "mp-all", "mp-rank"};
    SweepResults res = run_sweep(cfg, SweepField::support_size, {6});
    std::map<std::string, double> rate;
    for (const auto& row : res.rows) rate[row.method] = row.success_rate;
    double elapsed = seconds_since(t0);
    bool pass = rate["mp-all"] >= rate["plasso"] && rate["mp-all"] > rate["lasso"] &&
                std::abs(rate["mp-rank"] - rate["mp-all"]) <= 0.25 && elapsed <= 600.0;
    std::ostringstream os;
    os << "mp-all " << rate["mp-all"] << ", mp-rank " << rate["mp-rank"] << ", plasso "
       << rate["plasso"] << ", lasso " << rate["lasso"] << ", " << elapsed << " s";
    report(6, pass, os.str());
}

void criterion_7() {
    ExperimentConfig cfg;
    cfg.ensemble = Ensemble::gaussian;
    cfg.m = 60;
    cfg.n = 250;
    cfg.trials = 20;
    cfg.seed = 20260802;
    cfg.workers = static_cast<int>(std::thread::hardware_concurrency());
    if (cfg.workers < 1) cfg.workers = 1;
    cfg.methods = {"omp", "l1iht", "lasso", "plasso", "mp-all", "mp-rank"};
    SweepResults res = run_sweep(cfg, SweepField::support_size, {4, 8, 12});

    std::map<std::string, std::vector<double>> curves;
    for (const auto& row : res.rows) curves[row.method].push_back(row.success_rate);
    bool monotone = true;
    for (const auto& [method, curve] : curves)
        for (size_t k = 0; k + 1 < curve.size(); ++k)
            if (curve[k + 1] > curve[k] + 1e-12) monotone = false;

    bool omp_best = true;
    for (size_t k = 0; k < curves["omp"].size(); ++k)
        if (curves["omp"][k] < curves["mp-rank"][k] - 1e-12) omp_best = false;

    std::ostringstream os;
    os << "monotone=" << (monotone ? "yes" : "no") << ", omp>=mp-rank ("
       << curves["omp"][0] << "/" << curves["mp-rank"][0] << ", " << curves["omp"][1] << "/"
       << curves["mp-rank"][1] << ", " << curves["omp"][2] << "/" << curves["mp-rank"][2] << ")";
    report(7, monotone && omp_best, os.str());
}

void criterion_8() {
    ExperimentConfig cfg = gamma_config();
    cfg.trials = 20;
    cfg.methods = {"mp-all"};
    std::vector<double> grid;
    for (int k = 0; k < 10; ++k)
        grid.push_back(1e-6 * std::pow(100.0 / 1e-6, k / 9.0));

    bool dominated = true;
    // beta indices attaining mp-all at every noise level
    std::set<size_t> universal;
    for (size_t k = 0; k < grid.size(); ++k) universal.insert(k);

    std::ostringstream os;
    for (double sigma : {0.0, 0.05, 0.1}) {
        ExperimentConfig c = cfg;
        c.sigma = sigma;
        c.seed = Rng::derive(cfg.seed, static_cast<std::uint64_t>(sigma * 100));
        SweepResults res = run_sweep(c, SweepField::fixed_beta, grid);
        std::map<double, double> fixed_rate;
        std::map<double, double> all_rate;
        for (const auto& row : res.rows) {
            if (row.method == "mp-fixed") fixed_rate[row.value] = row.success_rate;
            if (row.method == "mp-all") all_rate[row.value] = row.success_rate;
        }
        for (size_t k = 0; k < grid.size(); ++k) {
            double fr = fixed_rate[grid[k]], ar = all_rate[grid[k]];
            if (fr > ar + 1e-12) dominated = false;
            if (fr < ar - 1e-12) universal.erase(k);
        }
        os << "sigma " << sigma << " done; ";
    }
    bool no_universal_beta = universal.empty();
    os << (dominated ? "dominated" : "DOMINANCE VIOLATED") << ", "
       << (no_universal_beta ? "no universal beta" : "universal beta exists");
    report(8, dominated && no_universal_beta, os.str());
}

// ---- criterion 9: lars variant ---------------------------------------------
void criterion_9(const std::vector<BuiltInstance>& instances) {
    bool layered = true;
    long shared = 0, lars_total = 0;
    for (size_t k = 0; k < instances.size(); ++k) {
        const auto& inst = instances[k];
        TilingGraph lars = build_tiling(inst.bt, {1e-6, 100.0}, 4, PathVariant::lars);
        for (int id : lars.alive_ids())
            for (int eid : lars.tile(id).child_edges)
                if (lars.tile(lars.edge(eid).to).support_size() !=
                    lars.tile(lars.edge(eid).from).support_size() + 1)
                    layered = false;
        for (int size = 1; size <= 4; ++size) {
            std::set<std::vector<int>> a, b;
            for (int id : inst.graph.alive_ids())
                if (inst.graph.tile(id).support_size() == size)
                    a.insert(inst.graph.tile(id).pattern.indices());
            for (int id : lars.alive_ids())
                if (lars.tile(id).support_size() == size)
                    b.insert(lars.tile(id).pattern.indices());
            for (const auto& s : b) {
                ++lars_total;
                if (a.count(s)) ++shared;
            }
        }
    }
    double overlap = lars_total ? static_cast<double>(shared) / lars_total : 0.0;
    std::ostringstream os;
    os << "layered=" << (layered ? "yes" : "no") << ", overlap " << shared << "/" << lars_total;
    report(9, layered && overlap >= 0.90, os.str());
}

// ---- criterion 10: determinism ----------------------------------------------
void criterion_10() {
    ExperimentConfig cfg;
    cfg.m = 12;
    cfg.n = 24;
    cfg.s = 2;
    cfg.trials = 4;
    cfg.seed = 99;
    cfg.workers = 2;
    cfg.beta_range = {1e-3, 100.0};
    cfg.methods = {"omp", "lasso", "plasso", "mp-all", "mp-rank"};
    SweepResults a = run_sweep(cfg, SweepField::support_size, {2, 3});
    SweepResults b = run_sweep(cfg, SweepField::support_size, {2, 3});
    bool pass = sweep_to_csv(a) == sweep_to_csv(b) && sweep_to_json(a) == sweep_to_json(b);
    report(10, pass, pass ? "csv+json byte-identical" : "outputs differ");
}

}  // namespace

int main() {
    auto t0 = std::chrono::steady_clock::now();
    auto instances = build_criterion1_instances();
    criterion_1_and_2(instances);
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9(instances);
    criterion_10();
    std::printf("acceptance total: %.1f s, %d failure(s)\n", seconds_since(t0), g_failures);
    return g_failures == 0 ? 0 : 1;
}
