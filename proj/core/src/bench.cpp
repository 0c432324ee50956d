#include "tilepath/bench.hpp"

#include "tilepath/decoders.hpp"
#include "tilepath/io.hpp"
#include "tilepath/log.hpp"
#include "tilepath/selection.hpp"
#include "tilepath/tiling.hpp"
#include "tilepath/transform.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <sstream>
#include <thread>

namespace tilepath {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

bool wants(const ExperimentConfig& c, const std::string& m) {
    return std::find(c.methods.begin(), c.methods.end(), m) != c.methods.end();
}

MethodOutcome assess(std::string method, std::vector<int> support,
                     const std::vector<int>& truth, double ms) {
    MethodOutcome out;
    out.method = std::move(method);
    out.support = std::move(support);
    out.sd = symmetric_difference(out.support, truth);
    out.success = out.sd == 0;
    out.wall_time_ms = ms;
    return out;
}

MethodOutcome failed(std::string method, const std::vector<int>& truth, const std::string& why,
                     double ms) {
    MethodOutcome out;
    out.method = std::move(method);
    out.sd = static_cast<int>(truth.size());
    out.success = false;
    out.errored = true;
    out.error = why;
    out.wall_time_ms = ms;
    return out;
}

// Expected miss (no support of the requested size reachable), not an error.
MethodOutcome unreached(std::string method, const std::vector<int>& truth,
                        const std::string& why, double ms) {
    MethodOutcome out = failed(std::move(method), truth, why, ms);
    out.errored = false;
    return out;
}

}  // namespace

Ensemble ensemble_from_string(const std::string& name) {
    if (name == "gaussian") return Ensemble::gaussian;
    if (name == "circulant") return Ensemble::circulant;
    if (name == "gamma_gaussian") return Ensemble::gamma_gaussian;
    throw std::invalid_argument("unknown ensemble: " + name);
}

std::string ensemble_name(Ensemble e) {
    switch (e) {
        case Ensemble::gaussian: return "gaussian";
        case Ensemble::circulant: return "circulant";
        case Ensemble::gamma_gaussian: return "gamma_gaussian";
    }
    return "?";
}

SweepField sweep_from_string(const std::string& name) {
    if (name == "support_size") return SweepField::support_size;
    if (name == "dimension") return SweepField::dimension;
    if (name == "noise") return SweepField::noise;
    if (name == "fixed_beta") return SweepField::fixed_beta;
    throw std::invalid_argument("unknown sweep: " + name);
}

std::string sweep_name(SweepField f) {
    switch (f) {
        case SweepField::support_size: return "support_size";
        case SweepField::dimension: return "dimension";
        case SweepField::noise: return "noise";
        case SweepField::fixed_beta: return "fixed_beta";
    }
    return "?";
}

void ExperimentConfig::validate() const {
    if (!(s >= 0 && s <= m && m <= n)) throw std::invalid_argument("config: need s <= m <= n");
    if (!(c_min <= c_max)) throw std::invalid_argument("config: need c_min <= c_max");
    if (sigma < 0) throw std::invalid_argument("config: sigma must be >= 0");
    if (trials < 1) throw std::invalid_argument("config: trials must be >= 1");
    if (!(beta_range.first > 0 && beta_range.first < beta_range.second))
        throw std::invalid_argument("config: bad beta range");
}

Matrix gen_matrix(const ExperimentConfig& config, Rng& rng) {
    const int m = config.m, n = config.n;
    Matrix A(m, n);
    switch (config.ensemble) {
        case Ensemble::gaussian: {
            double scale = 1.0 / std::sqrt(static_cast<double>(m));
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < n; ++j) A(i, j) = rng.normal() * scale;
            break;
        }
        case Ensemble::circulant: {
            // Rademacher pulse; m random columns of the n x n circulant,
            // transposed into an m x n sensing matrix.
            std::vector<int> b(static_cast<size_t>(n));
            for (int i = 0; i < n; ++i) b[static_cast<size_t>(i)] = rng.sign();
            std::vector<int> picks = rng.sample_indices(n, m);
            double scale = 1.0 / std::sqrt(static_cast<double>(m));
            for (int r = 0; r < m; ++r) {
                int col = picks[static_cast<size_t>(r)];
                for (int j = 0; j < n; ++j) {
                    int k = ((col - j) % n + n) % n;  // circulant entry (j, col)
                    A(r, j) = b[static_cast<size_t>(k)] * scale;
                }
            }
            break;
        }
        case Ensemble::gamma_gaussian: {
            for (int i = 0; i < m; ++i) {
                double g = rng.exponential();  // Gamma(1, 1)
                for (int j = 0; j < n; ++j) A(i, j) = rng.normal() / g;
            }
            break;
        }
    }
    return A;
}

Signal gen_signal(const ExperimentConfig& config, const Matrix& A, Rng& rng) {
    const int n = config.n, m = config.m, s = config.s;
    Signal sig;
    sig.support = rng.sample_indices(n, s);
    sig.u_true = Vector::Zero(n);
    for (int j : sig.support) sig.u_true(j) = rng.uniform(config.c_min, config.c_max);
    if (s > 0) {
        int pinned = sig.support[static_cast<size_t>(rng.below(s))];
        sig.u_true(pinned) = config.c_min;  // the minimum is attained exactly
    }
    for (int j : sig.support) sig.u_true(j) *= rng.sign();

    sig.v_true = Vector(n);
    for (int j = 0; j < n; ++j) sig.v_true(j) = rng.uniform(-config.v_amplitude, config.v_amplitude);

    Vector clean = A * (sig.u_true + sig.v_true);
    sig.delta = Vector::Zero(m);
    if (config.sigma > 0) {
        Vector g(m);
        for (int i = 0; i < m; ++i) g(i) = rng.normal();
        double norm = g.norm();
        if (norm > 0) sig.delta = g * (config.sigma * clean.norm() / norm);
    }
    sig.y = clean + sig.delta;
    return sig;
}

const MethodOutcome* TrialResult::outcome(const std::string& method) const {
    for (const auto& o : outcomes)
        if (o.method == method) return &o;
    return nullptr;
}

TrialResult run_trial(const ExperimentConfig& config, std::uint64_t trial_seed,
                      int trial_index) {
    config.validate();
    Rng rng(trial_seed);
    Matrix A = gen_matrix(config, rng);
    Signal sig = gen_signal(config, A, rng);
    Problem problem(A, sig.y, GroundTruth{sig.u_true, sig.v_true, sig.delta});
    const std::vector<int>& truth = sig.support;

    TrialResult res;
    res.trial_index = trial_index;

    if (wants(config, "omp")) {
        auto t0 = Clock::now();
        try {
            DecoderResult d = omp(problem, config.s);
            res.outcomes.push_back(assess("omp", d.supports.front(), truth, d.wall_time_ms));
        } catch (const std::exception& e) {
            res.outcomes.push_back(failed("omp", truth, e.what(), ms_since(t0)));
        }
    }
    if (wants(config, "l1iht")) {
        auto t0 = Clock::now();
        try {
            DecoderResult d = iht_warm(problem, config.s);
            res.outcomes.push_back(assess("l1iht", d.supports.front(), truth, d.wall_time_ms));
        } catch (const std::exception& e) {
            res.outcomes.push_back(failed("l1iht", truth, e.what(), ms_since(t0)));
        }
    }
    // Path decoders get the closest support of size <= s among those visited.
    for (const char* name : {"lasso", "plasso"}) {
        if (!wants(config, name)) continue;
        auto t0 = Clock::now();
        try {
            DecoderResult d = std::string(name) == "lasso" ? lasso_supports(problem, config.s)
                                                           : plasso_supports(problem, config.s);
            MethodOutcome out = assess(name, oracle_closest(d.supports, truth), truth,
                                       d.wall_time_ms);
            for (const auto& sup : d.supports) out.candidate_sizes.push_back(static_cast<int>(sup.size()));
            res.outcomes.push_back(std::move(out));
        } catch (const std::exception& e) {
            res.outcomes.push_back(failed(name, truth, e.what(), ms_since(t0)));
        }
    }

    bool needs_tiling = wants(config, "mp-all") || wants(config, "mp-rank");
    bool needs_bt = needs_tiling || (wants(config, "mp-fixed") && config.fixed_beta);
    if (needs_bt) {
        std::optional<BetaTransform> bt;
        auto t_bt = Clock::now();
        std::string bt_error;
        try {
            bt.emplace(decompose(problem));
        } catch (const std::exception& e) {
            bt_error = e.what();
        }

        if (needs_tiling) {
            auto t0 = Clock::now();
            try {
                if (!bt) throw numeric_error(bt_error);
                TilingGraph graph = build_tiling(*bt, config.beta_range, config.s);
                auto patterns = enumerate_supports(graph, config.s);
                std::vector<std::vector<int>> candidates;
                for (const auto& p : patterns) {
                    if (candidates.empty() || candidates.back() != p.indices())
                        candidates.push_back(p.indices());
                }
                double build_ms = ms_since(t0);
                if (wants(config, "mp-all")) {
                    if (candidates.empty()) {
                        res.outcomes.push_back(unreached(
                            "mp-all", truth, "no supports of the requested size", build_ms));
                    } else {
                        MethodOutcome out = assess("mp-all", oracle_closest(candidates, truth),
                                                   truth, build_ms);
                        out.candidate_sizes.assign(candidates.size(), config.s);
                        res.outcomes.push_back(std::move(out));
                    }
                }
                if (wants(config, "mp-rank")) {
                    auto t1 = Clock::now();
                    if (candidates.empty()) {
                        res.outcomes.push_back(unreached(
                            "mp-rank", truth, "no supports of the requested size", build_ms));
                    } else {
                        std::vector<int> pick = rank_supports(problem, candidates, config.s);
                        res.outcomes.push_back(
                            assess("mp-rank", pick, truth, build_ms + ms_since(t1)));
                    }
                }
            } catch (const std::exception& e) {
                if (wants(config, "mp-all"))
                    res.outcomes.push_back(failed("mp-all", truth, e.what(), ms_since(t0)));
                if (wants(config, "mp-rank"))
                    res.outcomes.push_back(failed("mp-rank", truth, e.what(), ms_since(t0)));
            }
        }

        if (wants(config, "mp-fixed") && config.fixed_beta) {
            auto t0 = Clock::now();
            try {
                if (!bt) throw numeric_error(bt_error);
                PathResult pr = path(*bt, *config.fixed_beta, config.s);
                std::vector<std::vector<int>> candidates;
                for (const auto& knot : pr.knots)
                    if (knot.pattern.size() == config.s) {
                        auto idx = knot.pattern.indices();
                        if (std::find(candidates.begin(), candidates.end(), idx) ==
                            candidates.end())
                            candidates.push_back(idx);
                    }
                if (candidates.empty()) {
                    res.outcomes.push_back(unreached(
                        "mp-fixed", truth, "path reached no support of the requested size",
                        ms_since(t0)));
                } else {
                    res.outcomes.push_back(assess("mp-fixed", oracle_closest(candidates, truth),
                                                  truth, ms_since(t0)));
                }
            } catch (const std::exception& e) {
                res.outcomes.push_back(failed("mp-fixed", truth, e.what(), ms_since(t0)));
            }
        }
        (void)t_bt;
    }
    return res;
}

SweepResults run_sweep(const ExperimentConfig& config, SweepField sweep,
                       const std::vector<double>& values) {
    if (values.empty()) throw std::invalid_argument("run_sweep: empty value list");
    SweepResults results;
    results.config = config;
    results.sweep = sweep;
    results.values = values;

    for (size_t vi = 0; vi < values.size(); ++vi) {
        ExperimentConfig cfg = config;
        double value = values[vi];
        switch (sweep) {
            case SweepField::support_size: cfg.s = static_cast<int>(value); break;
            case SweepField::dimension: cfg.n = static_cast<int>(value); break;
            case SweepField::noise: cfg.sigma = value; break;
            case SweepField::fixed_beta:
                cfg.fixed_beta = value;
                if (!wants(cfg, "mp-fixed")) cfg.methods.push_back("mp-fixed");
                break;
        }
        cfg.validate();

        std::vector<TrialResult> trials(static_cast<size_t>(cfg.trials));
        std::atomic<int> next{0};
        int workers = std::max(1, std::min(cfg.workers, cfg.trials));
        auto worker = [&]() {
            while (true) {
                int t = next.fetch_add(1);
                if (t >= cfg.trials) break;
                std::uint64_t seed = Rng::derive(cfg.seed, vi, static_cast<std::uint64_t>(t));
                trials[static_cast<size_t>(t)] = run_trial(cfg, seed, t);
            }
        };
        if (workers == 1) {
            worker();
        } else {
            std::vector<std::thread> pool;
            for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
            for (auto& th : pool) th.join();
        }

        for (const auto& method : cfg.methods) {
            SweepRow row;
            row.value = value;
            row.method = method;
            for (const auto& tr : trials) {
                const MethodOutcome* o = tr.outcome(method);
                if (!o) continue;
                ++row.trials;
                row.success_rate += o->success ? 1.0 : 0.0;
                row.mean_sd += o->sd;
                row.mean_time_ms += o->wall_time_ms;
                row.errors += o->errored ? 1 : 0;
            }
            if (row.trials > 0) {
                row.success_rate /= row.trials;
                row.mean_sd /= row.trials;
                row.mean_time_ms /= row.trials;
            }
            results.rows.push_back(std::move(row));
        }
        results.details.push_back(std::move(trials));
        TILEPATH_INFO("sweep " << sweep_name(sweep) << " value " << value << " done");
    }
    return results;
}

std::string sweep_to_csv(const SweepResults& results) {
    std::ostringstream os;
    os << "sweep,value,method,trials,success_rate,mean_sd,errors\n";
    for (const auto& r : results.rows) {
        os << sweep_name(results.sweep) << ',' << format_double(r.value) << ',' << r.method << ','
           << r.trials << ',' << format_double(r.success_rate) << ',' << format_double(r.mean_sd)
           << ',' << r.errors << '\n';
    }
    return os.str();
}

std::string sweep_display_table(const SweepResults& results) {
    std::ostringstream os;
    os << "sweep,value,method,trials,success_rate,mean_sd,mean_time_ms,errors\n";
    for (const auto& r : results.rows) {
        os << sweep_name(results.sweep) << ',' << format_double(r.value) << ',' << r.method << ','
           << r.trials << ',' << format_double(r.success_rate) << ',' << format_double(r.mean_sd)
           << ',' << format_double(r.mean_time_ms) << ',' << r.errors << '\n';
    }
    return os.str();
}

std::string sweep_to_json(const SweepResults& results) {
    nlohmann::ordered_json root;
    const auto& c = results.config;
    root["config"] = {{"ensemble", ensemble_name(c.ensemble)},
                      {"m", c.m},
                      {"n", c.n},
                      {"s", c.s},
                      {"c_min", c.c_min},
                      {"c_max", c.c_max},
                      {"v_amplitude", c.v_amplitude},
                      {"sigma", c.sigma},
                      {"trials", c.trials},
                      {"seed", c.seed},
                      {"beta_range", {c.beta_range.first, c.beta_range.second}},
                      {"methods", c.methods},
                      {"iht", {{"step", "1/opnorm(A)^2"}, {"max_iter", 500},
                               {"stop", "support stabilization"},
                               {"warm_start", "largest alpha with >= s active entries"}}}};
    root["sweep"] = sweep_name(results.sweep);
    root["values"] = results.values;

    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& r : results.rows)
        rows.push_back({{"value", r.value},
                        {"method", r.method},
                        {"trials", r.trials},
                        {"success_rate", r.success_rate},
                        {"mean_sd", r.mean_sd},
                        {"errors", r.errors}});
    root["rows"] = std::move(rows);

    nlohmann::ordered_json details = nlohmann::ordered_json::array();
    for (size_t vi = 0; vi < results.details.size(); ++vi) {
        nlohmann::ordered_json value_block = nlohmann::ordered_json::array();
        for (const auto& tr : results.details[vi]) {
            nlohmann::ordered_json jt;
            jt["trial"] = tr.trial_index;
            nlohmann::ordered_json outs = nlohmann::ordered_json::array();
            for (const auto& o : tr.outcomes) {
                nlohmann::ordered_json jo;
                jo["method"] = o.method;
                jo["support"] = o.support;
                jo["success"] = o.success;
                jo["sd"] = o.sd;
                if (o.errored) jo["error"] = o.error;
                if (!o.candidate_sizes.empty()) jo["candidate_sizes"] = o.candidate_sizes;
                outs.push_back(std::move(jo));
            }
            jt["outcomes"] = std::move(outs);
            value_block.push_back(std::move(jt));
        }
        details.push_back({{"value", results.values[vi]}, {"trials", std::move(value_block)}});
    }
    root["details"] = std::move(details);
    return root.dump(2) + "\n";
}

}  // namespace tilepath
