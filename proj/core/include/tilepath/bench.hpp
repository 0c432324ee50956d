#pragma once

#include "tilepath/rng.hpp"
#include "tilepath/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace tilepath {

enum class Ensemble { gaussian, circulant, gamma_gaussian };

Ensemble ensemble_from_string(const std::string& name);
std::string ensemble_name(Ensemble e);

struct ExperimentConfig {
    Ensemble ensemble = Ensemble::gaussian;
    int m = 60;
    int n = 250;
    int s = 6;
    double c_min = 1.5;
    double c_max = 5.0;
    double v_amplitude = 0.2;
    double sigma = 0.02;
    int trials = 20;
    std::uint64_t seed = 1;
    std::pair<double, double> beta_range{1e-6, 100.0};
    std::vector<std::string> methods{"omp", "l1iht", "lasso", "plasso", "mp-all", "mp-rank"};
    std::optional<double> fixed_beta;
    int workers = 1;

    void validate() const;
};

Matrix gen_matrix(const ExperimentConfig& config, Rng& rng);

struct Signal {
    Vector u_true;
    Vector v_true;
    Vector delta;
    Vector y;
    std::vector<int> support;
};

Signal gen_signal(const ExperimentConfig& config, const Matrix& A, Rng& rng);

struct MethodOutcome {
    std::string method;
    std::vector<int> support;
    bool success = false;
    int sd = 0;
    double wall_time_ms = 0.0;
    bool errored = false;
    std::string error;
    std::vector<int> candidate_sizes;  // sizes of path/tiling supports considered
};

struct TrialResult {
    int trial_index = 0;
    std::vector<MethodOutcome> outcomes;

    const MethodOutcome* outcome(const std::string& method) const;
};

TrialResult run_trial(const ExperimentConfig& config, std::uint64_t trial_seed, int trial_index);

enum class SweepField { support_size, dimension, noise, fixed_beta };

SweepField sweep_from_string(const std::string& name);
std::string sweep_name(SweepField f);

struct SweepRow {
    double value = 0.0;
    std::string method;
    int trials = 0;
    double success_rate = 0.0;
    double mean_sd = 0.0;
    double mean_time_ms = 0.0;
    int errors = 0;
};

struct SweepResults {
    ExperimentConfig config;
    SweepField sweep = SweepField::support_size;
    std::vector<double> values;
    std::vector<SweepRow> rows;                      // one per (value, method)
    std::vector<std::vector<TrialResult>> details;   // per value, per trial
};

/// Runs `config.trials` trials per swept value, trials executed concurrently
/// up to config.workers; aggregation is order-independent.
SweepResults run_sweep(const ExperimentConfig& config, SweepField sweep,
                       const std::vector<double>& values);

/// Emitted files are deterministic for a fixed (config, seed): wall-time
/// stats live in SweepResults and the display table but not in the files.
std::string sweep_to_csv(const SweepResults& results);
std::string sweep_to_json(const SweepResults& results);
std::string sweep_display_table(const SweepResults& results);  // includes timing

}  // namespace tilepath
