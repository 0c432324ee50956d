#pragma once

#include "tilepath/lasso_path.hpp"
#include "tilepath/transform.hpp"
#include "tilepath/types.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace tilepath {

/// One piece of a tile boundary, stored symbolically: the boundary value at
/// beta is the Eq.-7 candidate of `crossing_index` for the source pattern.
/// crossing_index == -1 marks a piece where the tile extends down to
/// alpha = 0 (no child below).
struct BoundarySegment {
    double beta_lo;
    double beta_hi;
    int crossing_index;
    int gamma;           // fixed entering sign; 0 for leave/sentinel pieces
    SignPattern source;  // (I, sigma) whose candidate formula is evaluated
};

double eval_segment(const BetaTransform& bt, const BoundarySegment& seg, double beta);

struct Edge {
    int id;
    int from;
    int to;
    double beta_lo;
    double beta_hi;
};

struct Tile {
    int id = -1;
    SignPattern pattern;
    double beta_minus = 0;
    double beta_plus = 0;
    std::vector<int> parent_edges;  // edge ids, ordered by interval
    std::vector<int> child_edges;   // edge ids, ordered by interval
    bool completed = false;
    bool alive = true;
    std::vector<BoundarySegment> lower;  // known pieces of alpha^-
    std::vector<BoundarySegment> upper;  // alpha^+ pieces; empty for the root
    std::vector<std::pair<double, double>> uncovered;  // S_tau \ T_tau

    int support_size() const { return pattern.size(); }
    bool has_children() const { return !child_edges.empty(); }
};

enum class LocateStatus { ok, below_computed_depth, out_of_range };

struct LocateResult {
    LocateStatus status;
    int tile = -1;
};

struct BuildOptions {
    int max_tiles = 100000;
    double root_tol_rel = 1e-9;       // beta root-finding tolerance
    double adjacency_rel = 1e-9;      // beta-range abutment tolerance for merging
    int dc_depth_limit = 64;
    // Interior verification density for accepted child segments, in argmax
    // evaluations per unit log-beta; catches bumps and islands that violate
    // the interval assumption at the segment endpoints.
    double scan_per_nat = 8.0;
    // Interior samples per support index when bracketing subdivision roots;
    // catches sign-change pairs the endpoint comparison misses.
    int subdivision_samples = 9;
};

struct TilingGraph {
    std::vector<Tile> tiles;  // indexed by id; merged-away tiles keep alive=false
    std::vector<Edge> edges;
    int root = 0;
    double beta_min = 0;
    double beta_max = 0;
    int s_max = 0;
    PathVariant variant = PathVariant::lasso;
    int tie_events = 0;
    int merge_events = 0;

    const Tile& tile(int id) const { return tiles.at(static_cast<size_t>(id)); }
    const Edge& edge(int id) const { return edges.at(static_cast<size_t>(id)); }
    std::vector<int> alive_ids() const;
    int alive_count() const;

    /// alpha^+ at beta (+inf for the root). The covering upper segment's
    /// formula is evaluated; beta outside all segments uses the nearest one.
    double alpha_upper(const BetaTransform& bt, int tile_id, double beta) const;
    /// alpha^- at beta, or nullopt where not yet computed.
    std::optional<double> alpha_lower(const BetaTransform& bt, int tile_id, double beta) const;
    /// Index that left the support at the upper boundary above beta, or -1.
    int left_index_above(int tile_id, double beta) const;
};

/// Child candidate produced on one subinterval before merging.
struct PreliminaryChild {
    SignPattern pattern;  // empty and j == -1 for sentinel (no child) pieces
    double beta_lo;
    double beta_hi;
    int crossing_index;
    int gamma;

    bool sentinel() const { return crossing_index < 0; }
};

/// Roots of s_{tau,i}(beta) = ((B_I^T B_I)^{-1} sigma)_i inside the given
/// intervals, for all i in the tile support (bisection, assuming at most one
/// root per index).
std::vector<double> subdivide(const BetaTransform& bt, const TilingGraph& graph, int tile_id,
                              const std::vector<std::pair<double, double>>& intervals,
                              const BuildOptions& opts = {});

/// Left-to-right children of a tile on one subinterval on which the
/// competing-candidate set is constant.
std::vector<PreliminaryChild> find_children(const BetaTransform& bt, const TilingGraph& graph,
                                            int tile_id, std::pair<double, double> subinterval,
                                            const BuildOptions& opts = {});

/// Merge adjacent preliminary children with equal (support, signs) and
/// abutting beta ranges.
std::vector<PreliminaryChild> merge_preliminary(std::vector<PreliminaryChild> children,
                                                double adjacency_rel = 1e-9);

/// Next incomplete tile to process, or nullopt when construction is done.
std::optional<int> schedule_next(const TilingGraph& graph, const BetaTransform& bt);

/// Complete support tiling of (beta_min, beta_max) x (0, inf) up to sparsity
/// s_max.
TilingGraph build_tiling(const BetaTransform& bt, std::pair<double, double> beta_range,
                         int s_max, PathVariant variant = PathVariant::lasso,
                         const BuildOptions& opts = {});

/// Tile containing (beta, alpha) under the [alpha^-, alpha^+) convention.
LocateResult locate(const TilingGraph& graph, const BetaTransform& bt, double beta,
                    double alpha);

}  // namespace tilepath
