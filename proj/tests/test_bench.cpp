#include "tilepath/bench.hpp"

#include "tilepath/io.hpp"

#include <doctest.h>

#include <cmath>

using namespace tilepath;

TEST_CASE("gen_matrix: trivial gaussian, circulant entries, column norms") {
    ExperimentConfig cfg;
    cfg.m = 1;
    cfg.n = 1;
    cfg.s = 0;
    Rng rng(601);
    Matrix one = gen_matrix(cfg, rng);
    CHECK(one.rows() == 1);
    CHECK(one.cols() == 1);  // scale 1/sqrt(1) keeps the raw normal draw

    ExperimentConfig circ;
    circ.ensemble = Ensemble::circulant;
    circ.m = 6;
    circ.n = 16;
    circ.s = 2;
    Rng rng2(602);
    Matrix C = gen_matrix(circ, rng2);
    double val = 1.0 / std::sqrt(6.0);
    for (int i = 0; i < C.rows(); ++i)
        for (int j = 0; j < C.cols(); ++j)
            CHECK(std::abs(std::abs(C(i, j)) - val) <= 1e-12);

    ExperimentConfig big;
    big.m = 200;
    big.n = 80;
    big.s = 0;
    // column norms concentrate near 1 after the 1/sqrt(m) rescaling
    big.n = 250;
    Rng rng3(603);
    Matrix G = gen_matrix(big, rng3);
    double mean = 0.0;
    for (int j = 0; j < G.cols(); ++j) mean += G.col(j).norm();
    mean /= G.cols();
    CHECK(mean >= 0.9);
    CHECK(mean <= 1.1);
}

TEST_CASE("gen_signal: pinned minimum, zero noise, exact noise ratio") {
    ExperimentConfig cfg;
    cfg.m = 20;
    cfg.n = 50;
    cfg.s = 5;
    Rng rng(604);
    Matrix A = gen_matrix(cfg, rng);
    Signal sig = gen_signal(cfg, A, rng);
    double min_abs = 1e300;
    for (int j : sig.support) min_abs = std::min(min_abs, std::abs(sig.u_true(j)));
    CHECK(min_abs == cfg.c_min);

    double ratio = sig.delta.norm() / (A * (sig.u_true + sig.v_true)).norm();
    CHECK(std::abs(ratio - cfg.sigma) <= 1e-12);

    ExperimentConfig clean = cfg;
    clean.sigma = 0.0;
    Rng rng2(605);
    Matrix A2 = gen_matrix(clean, rng2);
    Signal s2 = gen_signal(clean, A2, rng2);
    CHECK(s2.delta.norm() == 0.0);
    CHECK((s2.y - A2 * (s2.u_true + s2.v_true)).norm() == 0.0);
}

TEST_CASE("run_trial: easy regime, empty support, oracle dominates ranking") {
    ExperimentConfig cfg;
    cfg.m = 20;
    cfg.n = 40;
    cfg.s = 2;
    cfg.sigma = 0.0;
    cfg.v_amplitude = 0.0;
    cfg.beta_range = {1e-3, 100.0};
    TrialResult tr = run_trial(cfg, 606, 0);
    for (const auto& o : tr.outcomes) {
        INFO(o.method, " ", o.error);
        CHECK(o.success);
    }

    ExperimentConfig zero = cfg;
    zero.s = 0;
    zero.methods = {"omp", "l1iht"};
    TrialResult tz = run_trial(zero, 607, 0);
    for (const auto& o : tz.outcomes) CHECK(o.success);

    ExperimentConfig noisy;
    noisy.m = 12;
    noisy.n = 24;
    noisy.s = 2;
    noisy.sigma = 0.05;
    noisy.beta_range = {1e-3, 100.0};
    noisy.methods = {"mp-all", "mp-rank"};
    for (int t = 0; t < 10; ++t) {
        TrialResult trial = run_trial(noisy, Rng::derive(608, 0, t), t);
        const MethodOutcome* all = trial.outcome("mp-all");
        const MethodOutcome* rank = trial.outcome("mp-rank");
        REQUIRE(all);
        REQUIRE(rank);
        CHECK(all->sd <= rank->sd);
    }
}

TEST_CASE("run_sweep: single row shape, determinism, fixed-beta bound") {
    ExperimentConfig cfg;
    cfg.m = 10;
    cfg.n = 20;
    cfg.s = 2;
    cfg.trials = 2;
    cfg.beta_range = {1e-3, 100.0};
    cfg.methods = {"omp"};
    SweepResults one = run_sweep(cfg, SweepField::support_size, {2});
    CHECK(one.rows.size() == 1);
    CHECK(one.rows[0].method == "omp");
    CHECK(one.rows[0].trials == 2);
    CHECK(one.rows[0].success_rate >= 0.0);
    CHECK(one.rows[0].success_rate <= 1.0);

    // determinism: identical config and seed give identical CSV bytes
    cfg.methods = {"omp", "lasso", "mp-all", "mp-rank"};
    cfg.workers = 2;
    SweepResults a = run_sweep(cfg, SweepField::support_size, {1, 2});
    SweepResults b = run_sweep(cfg, SweepField::support_size, {1, 2});
    CHECK(sweep_to_csv(a) == sweep_to_csv(b));
    CHECK(sweep_to_json(a) == sweep_to_json(b));
    for (const auto& row : a.rows) CHECK(row.mean_sd <= 2.0 * cfg.s);

    // fixed-beta runs never beat the full-tiling oracle choice
    ExperimentConfig fb;
    fb.m = 10;
    fb.n = 20;
    fb.s = 2;
    fb.trials = 4;
    fb.beta_range = {1e-3, 100.0};
    fb.methods = {"mp-all"};
    SweepResults fixed = run_sweep(fb, SweepField::fixed_beta, {0.01, 1.0, 50.0});
    for (size_t vi = 0; vi < fixed.values.size(); ++vi) {
        double all_rate = 0, fixed_rate = 0;
        for (const auto& row : fixed.rows) {
            if (row.value != fixed.values[vi]) continue;
            if (row.method == "mp-all") all_rate = row.success_rate;
            if (row.method == "mp-fixed") fixed_rate = row.success_rate;
        }
        CHECK(fixed_rate <= all_rate + 1e-12);
        // per-trial dominance as well
        for (const auto& tr : fixed.details[vi]) {
            const MethodOutcome* all = tr.outcome("mp-all");
            const MethodOutcome* fx = tr.outcome("mp-fixed");
            REQUIRE(all);
            REQUIRE(fx);
            CHECK((!fx->success || all->success));
        }
    }
}
