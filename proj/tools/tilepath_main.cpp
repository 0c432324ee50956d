#include "tilepath/bench.hpp"
#include "tilepath/decoders.hpp"
#include "tilepath/io.hpp"
#include "tilepath/log.hpp"
#include "tilepath/selection.hpp"
#include "tilepath/tiling.hpp"
#include "tilepath/tiling_export.hpp"
#include "tilepath/transform.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

namespace {

using namespace tilepath;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitIo = 2;

Problem load_problem(const std::string& matrix_path, const std::string& datum_path,
                     const std::string& truth_path) {
    Matrix A = load_matrix(matrix_path);
    Vector y = load_vector(datum_path);
    std::optional<GroundTruth> truth;
    if (!truth_path.empty()) {
        Matrix T = load_matrix(truth_path);
        if (T.cols() != 2 || T.rows() != A.cols())
            throw io_error(truth_path + ": truth file must be n x 2 (u_true, v_true)");
        GroundTruth gt;
        gt.u_true = T.col(0);
        gt.v_true = T.col(1);
        gt.delta = y - A * (gt.u_true + gt.v_true);
        truth = std::move(gt);
    }
    return Problem(std::move(A), std::move(y), std::move(truth));
}

std::vector<int> true_support(const Problem& p) {
    std::vector<int> out;
    for (int j = 0; j < p.n(); ++j)
        if (p.truth->u_true(j) != 0.0) out.push_back(j);
    return out;
}

struct TilingArgs {
    std::string matrix, datum, out = "tiling";
    double beta_min = 1e-6, beta_max = 100.0;
    int s_max = 4;
    std::string variant = "lasso";
    std::vector<std::string> formats{"json"};
    int resolution = 64;
    std::vector<int> highlight;
};

int cmd_tiling(const TilingArgs& args) {
    Problem problem = load_problem(args.matrix, args.datum, "");
    BetaTransform bt = decompose(problem);
    auto t0 = std::chrono::steady_clock::now();
    TilingGraph graph = build_tiling(bt, {args.beta_min, args.beta_max}, args.s_max,
                                     args.variant == "lars" ? PathVariant::lars
                                                            : PathVariant::lasso);
    double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                    .count();

    ExportOptions opts;
    opts.polyline_points = args.resolution;
    if (!args.highlight.empty()) {
        auto h = args.highlight;
        std::sort(h.begin(), h.end());
        opts.highlight_support = h;
    }
    for (const auto& fmt : args.formats) {
        if (fmt == "json")
            write_text_file(args.out + ".json", tiling_to_json(graph, bt, opts));
        else if (fmt == "svg")
            write_text_file(args.out + ".svg", tiling_to_svg(graph, bt, opts));
        else
            throw std::invalid_argument("tiling: unsupported format '" + fmt + "'");
    }

    std::map<int, int> per_size;
    for (int id : graph.alive_ids()) ++per_size[graph.tile(id).support_size()];
    std::cout << "tiles: " << graph.alive_count() << "\n";
    for (auto [size, count] : per_size)
        std::cout << "  support size " << size << ": " << count << " tiles\n";
    std::cout << "merge events: " << graph.merge_events << ", tie events: " << graph.tie_events
              << "\n";
    std::cout << "wall time: " << format_double(ms) << " ms\n";
    return kExitOk;
}

struct SolveArgs {
    std::string matrix, datum, truth;
    std::string method = "omp";
    int s = 4;
    double beta_min = 1e-6, beta_max = 100.0;
};

void print_chosen(const Problem& problem, const std::vector<int>& support) {
    std::cout << "support: " << support_to_string(support) << "\n";
    if (!support.empty()) {
        SupportCandidate cand = regress(problem, support);
        std::cout << "coefficients:";
        for (int i = 0; i < cand.u_hat.size(); ++i)
            std::cout << ' ' << format_double(cand.u_hat(i));
        std::cout << "\n";
    }
    if (problem.truth) {
        int sd = symmetric_difference(support, true_support(problem));
        std::cout << "symmetric difference: " << sd << "\n";
        std::cout << "success: " << (sd == 0 ? "yes" : "no") << "\n";
    }
}

int cmd_solve(const SolveArgs& args) {
    Problem problem = load_problem(args.matrix, args.datum, args.truth);
    const std::string& m = args.method;

    std::vector<int> chosen;
    if (m == "omp" || m == "l1iht") {
        DecoderResult d = m == "omp" ? omp(problem, args.s) : iht_warm(problem, args.s);
        chosen = d.supports.front();
    } else if (m == "lasso" || m == "plasso") {
        DecoderResult d = m == "lasso" ? lasso_supports(problem, args.s)
                                       : plasso_supports(problem, args.s);
        chosen = problem.truth ? oracle_closest(d.supports, true_support(problem))
                               : d.supports.back();
    } else if (m == "mp-rank" || m == "mp-all") {
        if (m == "mp-all" && !problem.truth)
            throw std::invalid_argument("mp-all needs --truth");
        BetaTransform bt = decompose(problem);
        TilingGraph graph = build_tiling(bt, {args.beta_min, args.beta_max}, args.s);
        auto patterns = enumerate_supports(graph, args.s);
        std::vector<std::vector<int>> candidates;
        for (const auto& p : patterns)
            if (candidates.empty() || candidates.back() != p.indices())
                candidates.push_back(p.indices());
        if (candidates.empty()) throw numeric_error("no supports of the requested size");
        chosen = m == "mp-all" ? oracle_closest(candidates, true_support(problem))
                               : rank_supports(problem, candidates, args.s);
    } else {
        std::cerr << "unknown method '" << m
                  << "' (expected omp|l1iht|lasso|plasso|mp-rank|mp-all)\n";
        return kExitError;
    }
    print_chosen(problem, chosen);
    return kExitOk;
}

struct BenchArgs {
    std::string ensemble = "gaussian";
    int m = 60, n = 250, s = 4;
    double sigma = 0.02;
    int trials = 20;
    std::uint64_t seed = 1;
    std::string sweep = "support_size";
    std::vector<double> values;
    std::vector<std::string> methods;
    int workers = 1;
    std::string out = "bench";
    std::vector<std::string> formats{"csv"};
    double beta_min = 1e-6, beta_max = 100.0;
};

int cmd_bench(const BenchArgs& args) {
    ExperimentConfig cfg;
    cfg.ensemble = ensemble_from_string(args.ensemble);
    cfg.m = args.m;
    cfg.n = args.n;
    cfg.s = args.s;
    cfg.sigma = args.sigma;
    cfg.trials = args.trials;
    cfg.seed = args.seed;
    cfg.workers = args.workers;
    cfg.beta_range = {args.beta_min, args.beta_max};
    if (!args.methods.empty()) cfg.methods = args.methods;

    SweepField field = sweep_from_string(args.sweep);
    std::vector<double> values = args.values;
    if (values.empty()) {
        switch (field) {
            case SweepField::support_size: values = {static_cast<double>(args.s)}; break;
            case SweepField::dimension: values = {static_cast<double>(args.n)}; break;
            case SweepField::noise: values = {args.sigma}; break;
            case SweepField::fixed_beta: values = {1.0}; break;
        }
    }

    SweepResults results = run_sweep(cfg, field, values);
    for (const auto& fmt : args.formats) {
        if (fmt == "csv")
            write_text_file(args.out + ".csv", sweep_to_csv(results));
        else if (fmt == "json")
            write_text_file(args.out + ".json", sweep_to_json(results));
        else
            throw std::invalid_argument("bench: unsupported format '" + fmt + "'");
    }

    std::cout << sweep_display_table(results);

    // A method failing on more than 10% of its trials makes the run unusable.
    for (const auto& row : results.rows) {
        if (row.trials > 0 && row.errors > 0.10 * row.trials) {
            std::cerr << "method " << row.method << " errored on " << row.errors << "/"
                      << row.trials << " trials at value " << row.value << "\n";
            return kExitError;
        }
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"support tilings of the multi-penalty parameter plane"};
    app.require_subcommand(1);

    TilingArgs targs;
    CLI::App* tiling_cmd = app.add_subcommand("tiling", "compute a support tiling from files");
    tiling_cmd->add_option("--matrix", targs.matrix, "measurement matrix (CSV or TPTH)")
        ->required();
    tiling_cmd->add_option("--datum", targs.datum, "datum vector file")->required();
    tiling_cmd->add_option("--beta-min", targs.beta_min, "lower end of the beta range");
    tiling_cmd->add_option("--beta-max", targs.beta_max, "upper end of the beta range");
    tiling_cmd->add_option("--s-max", targs.s_max, "maximal support size");
    tiling_cmd->add_option("--variant", targs.variant, "lasso|lars")
        ->check(CLI::IsMember({"lasso", "lars"}));
    tiling_cmd->add_option("--out", targs.out, "output path prefix");
    tiling_cmd->add_option("--format", targs.formats, "json,svg")->delimiter(',');
    tiling_cmd->add_option("--resolution", targs.resolution, "polyline samples per segment");
    tiling_cmd->add_option("--highlight", targs.highlight, "support to highlight in the SVG")
        ->delimiter(',');

    SolveArgs sargs;
    CLI::App* solve_cmd = app.add_subcommand("solve", "run one decoder on a problem");
    solve_cmd->add_option("--matrix", sargs.matrix, "measurement matrix")->required();
    solve_cmd->add_option("--datum", sargs.datum, "datum vector file")->required();
    solve_cmd->add_option("--truth", sargs.truth, "n x 2 file with columns (u_true, v_true)");
    solve_cmd->add_option("--method", sargs.method, "omp|l1iht|lasso|plasso|mp-rank|mp-all");
    solve_cmd->add_option("--s-max", sargs.s, "target support size");
    solve_cmd->add_option("--beta-min", sargs.beta_min, "");
    solve_cmd->add_option("--beta-max", sargs.beta_max, "");

    BenchArgs bargs;
    CLI::App* bench_cmd = app.add_subcommand("bench", "run benchmark sweeps");
    bench_cmd->add_option("--ensemble", bargs.ensemble, "gaussian|circulant|gamma_gaussian")
        ->check(CLI::IsMember({"gaussian", "circulant", "gamma_gaussian"}));
    bench_cmd->add_option("--m", bargs.m, "rows");
    bench_cmd->add_option("--n", bargs.n, "columns");
    bench_cmd->add_option("--s", bargs.s, "true support size");
    bench_cmd->add_option("--sigma", bargs.sigma, "measurement noise level");
    bench_cmd->add_option("--trials", bargs.trials, "trials per swept value");
    bench_cmd->add_option("--seed", bargs.seed, "RNG seed");
    bench_cmd->add_option("--sweep", bargs.sweep, "support_size|dimension|noise|fixed_beta");
    bench_cmd->add_option("--values", bargs.values, "swept values")->delimiter(',');
    bench_cmd->add_option("--method", bargs.methods, "methods to run")->delimiter(',');
    bench_cmd->add_option("--workers", bargs.workers, "concurrent trials");
    bench_cmd->add_option("--out", bargs.out, "output path prefix");
    bench_cmd->add_option("--format", bargs.formats, "csv,json")->delimiter(',');
    bench_cmd->add_option("--beta-min", bargs.beta_min, "");
    bench_cmd->add_option("--beta-max", bargs.beta_max, "");

    CLI11_PARSE(app, argc, argv);

    try {
        if (tiling_cmd->parsed()) return cmd_tiling(targs);
        if (solve_cmd->parsed()) return cmd_solve(sargs);
        if (bench_cmd->parsed()) return cmd_bench(bargs);
    } catch (const io_error& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}
