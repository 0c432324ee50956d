#include "tilepath/tiling.hpp"

#include "tilepath/rootfind.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstdio>
#include <cstdlib>
#include <set>
#include <sstream>

namespace tilepath {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Candidates this close (relative) to the upper boundary are the boundary
// itself and do not compete for the next one below.
constexpr double kUpperExcludeRel = 1e-12;
constexpr double kArgmaxTieRel = 1e-10;

bool abuts(double a, double b, double rel) {
    return std::abs(a - b) <= rel * std::max({std::abs(a), std::abs(b), 1e-300});
}

int extra_index(const SignPattern& big, const SignPattern& small) {
    for (int j : big.indices())
        if (!small.contains(j)) return j;
    return -1;
}

}  // namespace

double eval_segment(const BetaTransform& bt, const BoundarySegment& seg, double beta) {
    if (seg.crossing_index < 0) return 0.0;
    return candidate_alpha_fixed_gamma(bt, beta, seg.source, seg.crossing_index, seg.gamma);
}

std::vector<int> TilingGraph::alive_ids() const {
    std::vector<int> out;
    for (const Tile& t : tiles)
        if (t.alive) out.push_back(t.id);
    return out;
}

int TilingGraph::alive_count() const { return static_cast<int>(alive_ids().size()); }

double TilingGraph::alpha_upper(const BetaTransform& bt, int tile_id, double beta) const {
    const Tile& t = tile(tile_id);
    if (t.upper.empty()) return kInf;  // root
    const BoundarySegment* best = nullptr;
    double best_dist = kInf;
    for (const auto& seg : t.upper) {
        if (beta >= seg.beta_lo && beta <= seg.beta_hi) return eval_segment(bt, seg, beta);
        double d = beta < seg.beta_lo ? seg.beta_lo - beta : beta - seg.beta_hi;
        if (d < best_dist) {
            best_dist = d;
            best = &seg;
        }
    }
    return eval_segment(bt, *best, beta);
}

std::optional<double> TilingGraph::alpha_lower(const BetaTransform& bt, int tile_id,
                                               double beta) const {
    const Tile& t = tile(tile_id);
    for (const auto& seg : t.lower)
        if (beta >= seg.beta_lo && beta <= seg.beta_hi) return eval_segment(bt, seg, beta);
    return std::nullopt;
}

int TilingGraph::left_index_above(int tile_id, double beta) const {
    const Tile& t = tile(tile_id);
    for (int eid : t.parent_edges) {
        const Edge& e = edge(eid);
        double tol = 1e-12 * std::max({std::abs(e.beta_lo), std::abs(e.beta_hi), 1e-300});
        if (beta >= e.beta_lo - tol && beta <= e.beta_hi + tol) {
            const Tile& p = tile(e.from);
            if (p.support_size() == t.support_size() + 1) return extra_index(p.pattern, t.pattern);
            return -1;
        }
    }
    return -1;
}

std::vector<double> subdivide(const BetaTransform& bt, const TilingGraph& graph, int tile_id,
                              const std::vector<std::pair<double, double>>& intervals,
                              const BuildOptions& opts) {
    const Tile& t = graph.tile(tile_id);
    std::vector<double> out;
    if (t.pattern.empty()) return out;

    const auto& idx = t.pattern.indices();
    Vector sigma(t.support_size());
    for (int k = 0; k < t.support_size(); ++k) sigma(k) = t.pattern.signs()[k];

    auto s_component = [&](double beta, int pos) {
        ActiveGram gram(bt.m());
        for (int j : idx) gram.add(j, bt.column(beta, j));
        return gram.solve(sigma)(pos);
    };

    const int samples = std::max(2, opts.subdivision_samples);
    for (auto [a, b] : intervals) {
        if (!(b > a)) continue;
        // log-spaced sample grid; interior points catch root pairs invisible
        // to the endpoint sign comparison
        std::vector<double> grid(static_cast<size_t>(samples));
        double la = std::log(a), lb = std::log(b);
        for (int k = 0; k < samples; ++k)
            grid[static_cast<size_t>(k)] = std::exp(la + (lb - la) * k / (samples - 1));
        grid.front() = a;
        grid.back() = b;

        for (int pos = 0; pos < t.support_size(); ++pos) {
            std::vector<double> vals(grid.size());
            for (size_t k = 0; k < grid.size(); ++k) vals[k] = s_component(grid[k], pos);
            for (size_t k = 0; k + 1 < grid.size(); ++k) {
                if (vals[k] == 0.0 || vals[k + 1] == 0.0) continue;
                if ((vals[k] < 0.0) == (vals[k + 1] < 0.0)) continue;
                // candidate formulas change definition at the breakpoint, so
                // the residual there must sit at noise level
                BracketedProblem p{[&](double beta) { return s_component(beta, pos); }, grid[k],
                                   grid[k + 1], 1e-13};
                try {
                    out.push_back(bisect(p));
                } catch (const numeric_error& err) {
                    std::ostringstream os;
                    os << "subdivision of tile " << tile_id << " (" << t.pattern.to_string()
                       << ") on (" << grid[k] << "," << grid[k + 1] << "): " << err.what();
                    throw numeric_error(os.str());
                }
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

// Argmax bookkeeping on the candidate set K (plus the alpha = 0 sentinel at
// position |K|). Candidates at or above the tile's upper boundary are masked
// pointwise, so K itself need not stay constant across the piece.
struct PieceContext {
    const BetaTransform& bt;
    const TilingGraph& graph;
    int tile_id;
    const SignPattern& pattern;
    int prev_left;
    PathVariant variant;
    std::vector<int> K;
    double lo, hi;
    int* tie_events;
};

struct PointEval {
    double beta;
    std::vector<double> vals;  // per K position; last entry is the sentinel 0
    int winner;                // position into vals
    bool raw_tie = false;      // unshifted evaluation was tied
};

std::vector<double> eval_values(const PieceContext& ctx, double beta) {
    auto cands = candidate_alphas(ctx.bt, beta, ctx.pattern, ctx.prev_left, ctx.variant);
    double upper = ctx.graph.alpha_upper(ctx.bt, ctx.tile_id, beta);
    double cutoff = std::isfinite(upper) ? upper * (1.0 - kUpperExcludeRel) : kInf;
    std::vector<double> vals(ctx.K.size() + 1);
    for (size_t p = 0; p < ctx.K.size(); ++p) {
        double v = cands[static_cast<size_t>(ctx.K[p])].value;
        vals[p] = (std::isfinite(v) && v < cutoff) ? v : -kInf;
    }
    vals.back() = 0.0;
    return vals;
}

int top_position(const std::vector<double>& vals, int exclude = -1) {
    int best = -1;
    for (int p = 0; p < static_cast<int>(vals.size()); ++p) {
        if (p == exclude) continue;
        if (!std::isfinite(vals[p]) && vals[p] < 0) continue;
        if (best < 0 || vals[p] > vals[best]) best = p;
    }
    return best;
}

bool tied(double a, double b) {
    return std::abs(a - b) <= kArgmaxTieRel * std::max({std::abs(a), std::abs(b), 1e-300});
}

// Winner at beta. Ambiguous evaluations are retried slightly inside the
// interval in the given direction with shrinking offsets: argmax ties, and
// tile corners where the pinching upper boundary masks every candidate so
// only the sentinel survives.
PointEval eval_point(const PieceContext& ctx, double beta, int dir) {
    PointEval pe;
    pe.beta = beta;
    pe.vals = eval_values(ctx, beta);
    const int sentinel = static_cast<int>(pe.vals.size()) - 1;
    int w = top_position(pe.vals);
    int runner = top_position(pe.vals, w);
    bool tie = runner >= 0 && tied(pe.vals[w], pe.vals[runner]);
    bool pinched = w == sentinel;
    if (tie || pinched) {
        pe.raw_tie = tie;
        double eps = 1e-6 * (ctx.hi - ctx.lo);
        int w_shifted = w;
        for (int attempt = 0; attempt < 4 && eps > 0; ++attempt, eps *= 0.25) {
            double shifted = beta + dir * eps;
            if (shifted <= ctx.lo || shifted >= ctx.hi) continue;
            auto vals = eval_values(ctx, shifted);
            int w2 = top_position(vals);
            int r2 = top_position(vals, w2);
            bool clean = (r2 < 0 || !tied(vals[w2], vals[r2])) && w2 != sentinel;
            if (clean) {
                pe.winner = w2;
                return pe;
            }
            if (w2 != sentinel) w_shifted = w2;
        }
        if (pinched && !tie) {
            // genuinely no candidate below: the tile runs to alpha = 0
            pe.winner = w_shifted;
            return pe;
        }
        // persistent tie: smallest real index wins, sentinel last
        int best = w;
        for (int p = 0; p < static_cast<int>(pe.vals.size()); ++p) {
            if (!tied(pe.vals[w], pe.vals[p])) continue;
            bool p_sent = p == sentinel;
            bool b_sent = best == sentinel;
            if (b_sent || (!p_sent && ctx.K[static_cast<size_t>(p)] < ctx.K[static_cast<size_t>(best)]))
                best = p;
        }
        if (ctx.tie_events) ++*ctx.tie_events;
        pe.winner = best;
        return pe;
    }
    pe.winner = w;
    return pe;
}

ScalarFn candidate_curve(const PieceContext& ctx, int pos) {
    if (pos + 1 == static_cast<int>(ctx.K.size()) + 1) return [](double) { return 0.0; };
    int j = ctx.K[static_cast<size_t>(pos)];
    bool flip = (j == ctx.prev_left);
    const BetaTransform& bt = ctx.bt;
    const SignPattern& pattern = ctx.pattern;
    return [&bt, &pattern, j, flip](double beta) {
        return candidate_alpha(bt, beta, pattern, j, flip).value;
    };
}

struct RawSegment {
    double lo, hi;
    int pos;  // K position, |K| for sentinel
};

double log_midpoint(double a, double b) { return std::sqrt(a * b); }

void dc_segments(const PieceContext& ctx, const PointEval& left, const PointEval& right,
                 int depth, const BuildOptions& opts, std::vector<RawSegment>& out) {
    if (depth > opts.dc_depth_limit)
        throw numeric_error("child search: divide-and-conquer depth limit exceeded");
    double width = right.beta - left.beta;
    if (left.winner == right.winner) {
        if (std::getenv("TILEPATH_DCDBG"))
            std::fprintf(stderr, "dc emit [%.9g, %.9g] pos=%d\n", left.beta, right.beta,
                         left.winner);
        out.push_back({left.beta, right.beta, left.winner});
        return;
    }
    if (width <= 1e-12 * std::max(1.0, std::abs(right.beta))) {
        double mid = 0.5 * (left.beta + right.beta);
        out.push_back({left.beta, mid, left.winner});
        out.push_back({mid, right.beta, right.winner});
        return;
    }

    double mid = log_midpoint(left.beta, right.beta);
    // Crosswise second-largest trigger for the guarded secant.
    int runner_l = top_position(left.vals, left.winner);
    int runner_r = top_position(right.vals, right.winner);
    if (runner_l == right.winner && runner_r == left.winner) {
        try {
            auto cross = crossing(candidate_curve(ctx, left.winner),
                                  candidate_curve(ctx, right.winner), left.beta, right.beta,
                                  opts.root_tol_rel);
            if (cross && *cross > left.beta && *cross < right.beta) mid = *cross;
        } catch (const numeric_error&) {
            // fall back to plain bisection of the interval
        }
    }

    // When mid sits on a crossing the winner differs just left and just
    // right of it; the tie refinement resolves each side separately.
    PointEval at_mid_l = eval_point(ctx, mid, -1);
    PointEval at_mid_r = at_mid_l.raw_tie ? eval_point(ctx, mid, +1) : at_mid_l;
    dc_segments(ctx, left, at_mid_l, depth + 1, opts, out);
    dc_segments(ctx, at_mid_r, right, depth + 1, opts, out);
}

// Interior scan of an accepted segment at a density tied to its log-width;
// returns a beta where the masked argmax disagrees with the assignment.
// Argmax bumps and islands violating the interval assumption are caught down
// to the scan resolution.
std::optional<double> scan_segment(const PieceContext& ctx, const RawSegment& seg,
                                   const BuildOptions& opts) {
    double nats = std::log(seg.hi / std::max(seg.lo, 1e-300));
    int points = std::clamp(static_cast<int>(std::ceil(opts.scan_per_nat * nats)), 8, 256);
    for (int i = 1; i < points; ++i) {
        double beta = seg.lo * std::exp(nats * i / points);
        if (!(beta > seg.lo && beta < seg.hi)) continue;
        PointEval pe = eval_point(ctx, beta, +1);
        if (pe.winner != seg.pos) return beta;
    }
    return std::nullopt;
}

std::vector<PreliminaryChild> find_children_impl(const BetaTransform& bt,
                                                 const TilingGraph& graph, int tile_id,
                                                 std::pair<double, double> sub,
                                                 const BuildOptions& opts, int* tie_events) {
    const Tile& t = graph.tile(tile_id);
    auto [a, b] = sub;
    std::vector<PreliminaryChild> out;
    if (!(b > a)) return out;

    double mid = log_midpoint(a, b);
    int prev_left = graph.left_index_above(tile_id, mid);
    auto cands = candidate_alphas(bt, mid, t.pattern, prev_left, graph.variant);

    PieceContext ctx{bt, graph, tile_id, t.pattern, prev_left, graph.variant, {}, a, b,
                     tie_events};
    for (int j = 0; j < static_cast<int>(cands.size()); ++j)
        if (std::isfinite(cands[static_cast<size_t>(j)].value)) ctx.K.push_back(j);

    std::vector<RawSegment> segs;
    if (ctx.K.empty()) {
        out.push_back(PreliminaryChild{SignPattern{}, a, b, -1, 0});
        return out;
    }

    PointEval pl = eval_point(ctx, a, +1);
    PointEval pr = eval_point(ctx, b, -1);
    dc_segments(ctx, pl, pr, 0, opts, segs);

    // Verification probes split equal-winner spans: stitch them back, and
    // absorb segments narrower than the crossing resolution (vertex noise,
    // not discovered structure).
    auto consolidate = [&](std::vector<RawSegment> in) {
        std::vector<RawSegment> stitched;
        for (const auto& s : in) {
            if (!stitched.empty() && stitched.back().pos == s.pos &&
                stitched.back().hi >= s.lo) {
                stitched.back().hi = std::max(stitched.back().hi, s.hi);
            } else {
                stitched.push_back(s);
            }
        }
        if (stitched.size() <= 1) return stitched;
        std::vector<RawSegment> cleaned;
        for (size_t i = 0; i < stitched.size(); ++i) {
            const auto& s = stitched[i];
            double snap = opts.adjacency_rel * std::max({std::abs(s.lo), std::abs(s.hi), 1e-300});
            if (s.hi - s.lo <= snap) {
                if (!cleaned.empty())
                    cleaned.back().hi = s.hi;
                else if (i + 1 < stitched.size())
                    stitched[i + 1].lo = s.lo;
                else
                    cleaned.push_back(s);
                continue;
            }
            if (!cleaned.empty() && cleaned.back().pos == s.pos)
                cleaned.back().hi = s.hi;
            else
                cleaned.push_back(s);
        }
        return cleaned;
    };

    segs = consolidate(std::move(segs));
    for (int round = 0; round < 8; ++round) {
        bool changed = false;
        std::vector<RawSegment> next;
        for (const auto& seg : segs) {
            auto bad = scan_segment(ctx, seg, opts);
            if (!bad) {
                next.push_back(seg);
                continue;
            }
            changed = true;
            PointEval sl = eval_point(ctx, seg.lo, +1);
            PointEval sr = eval_point(ctx, seg.hi, -1);
            PointEval bl = eval_point(ctx, *bad, -1);
            PointEval br = bl.raw_tie ? eval_point(ctx, *bad, +1) : bl;
            if (std::getenv("TILEPATH_DCDBG")) {
                auto jj = [&](int p) {
                    return p < static_cast<int>(ctx.K.size()) ? ctx.K[static_cast<size_t>(p)]
                                                              : -1;
                };
                std::fprintf(stderr,
                             "rescan seg[%.9g,%.9g] j=%d bad=%.9g sl_j=%d sr_j=%d bl_j=%d "
                             "br_j=%d |K|=%zu slvals13=%.12g slvals14=%.12g\n",
                             seg.lo, seg.hi, jj(seg.pos), *bad, jj(sl.winner), jj(sr.winner),
                             jj(bl.winner), jj(br.winner), ctx.K.size(),
                             sl.vals.size() > 13 ? sl.vals[13] : -1.0,
                             sl.vals.size() > 14 ? sl.vals[14] : -1.0);
            }
            dc_segments(ctx, sl, bl, 0, opts, next);
            dc_segments(ctx, br, sr, 0, opts, next);
        }
        segs = consolidate(std::move(next));
        if (!changed) break;
    }

    const int sentinel_pos = static_cast<int>(ctx.K.size());
    for (const auto& s : segs) {
        if (!(s.hi > s.lo)) continue;
        if (s.pos == sentinel_pos) {
            out.push_back(PreliminaryChild{SignPattern{}, s.lo, s.hi, -1, 0});
            continue;
        }
        int j = ctx.K[static_cast<size_t>(s.pos)];
        double smid = 0.5 * (s.lo + s.hi);
        if (t.pattern.contains(j)) {
            out.push_back(PreliminaryChild{t.pattern.without(j), s.lo, s.hi, j, 0});
        } else {
            auto c = candidate_alpha(bt, smid, t.pattern, j, j == prev_left);
            out.push_back(PreliminaryChild{t.pattern.with(j, c.gamma), s.lo, s.hi, j, c.gamma});
        }
    }
    return out;
}

}  // namespace

std::vector<PreliminaryChild> find_children(const BetaTransform& bt, const TilingGraph& graph,
                                            int tile_id, std::pair<double, double> subinterval,
                                            const BuildOptions& opts) {
    int ties = 0;
    return find_children_impl(bt, graph, tile_id, subinterval, opts, &ties);
}

std::vector<PreliminaryChild> merge_preliminary(std::vector<PreliminaryChild> children,
                                                double adjacency_rel) {
    std::vector<PreliminaryChild> out;
    for (auto& c : children) {
        if (!out.empty()) {
            auto& last = out.back();
            bool same = last.crossing_index == c.crossing_index && last.gamma == c.gamma &&
                        last.pattern == c.pattern;
            if (same && abuts(last.beta_hi, c.beta_lo, adjacency_rel)) {
                last.beta_hi = c.beta_hi;
                continue;
            }
        }
        out.push_back(std::move(c));
    }
    return out;
}

std::optional<int> schedule_next(const TilingGraph& graph, const BetaTransform& bt) {
    struct Key {
        int size;
        int childless;
        double beta;
    };
    std::vector<int> tied;
    Key best{0, 0, 0};
    for (const Tile& t : graph.tiles) {
        if (!t.alive || t.completed || t.support_size() >= graph.s_max) continue;
        Key k{t.support_size(), t.has_children() ? 0 : 1, t.beta_minus};
        if (tied.empty() || std::tie(k.size, k.childless, k.beta) <
                                std::tie(best.size, best.childless, best.beta)) {
            best = k;
            tied.assign(1, t.id);
        } else if (std::tie(k.size, k.childless, k.beta) ==
                   std::tie(best.size, best.childless, best.beta)) {
            tied.push_back(t.id);
        }
    }
    if (tied.empty()) return std::nullopt;
    if (tied.size() == 1) return tied.front();
    // oldest first: largest upper boundary just inside the left border
    int pick = tied.front();
    double pick_alpha = -kInf;
    for (int id : tied) {
        const Tile& t = graph.tile(id);
        double probe = t.beta_minus + 1e-6 * (t.beta_plus - t.beta_minus);
        double a = graph.alpha_upper(bt, id, probe);
        if (a > pick_alpha) {
            pick_alpha = a;
            pick = id;
        }
    }
    return pick;
}

namespace {

class Builder {
public:
    Builder(const BetaTransform& bt, std::pair<double, double> range, int s_max,
            PathVariant variant, const BuildOptions& opts)
        : bt_(bt), opts_(opts) {
        if (!(range.first > 0.0) || !(range.first < range.second))
            throw std::invalid_argument("build_tiling: need 0 < beta_min < beta_max");
        if (s_max < 0 || s_max > bt.m())
            throw std::invalid_argument("build_tiling: need 0 <= s_max <= m");
        g_.beta_min = range.first;
        g_.beta_max = range.second;
        g_.s_max = s_max;
        g_.variant = variant;
        int root = add_tile(SignPattern{}, range.first, range.second);
        g_.root = root;
    }

    TilingGraph run() {
        long steps = 0;
        while (auto next = schedule_next(g_, bt_)) {
            process(*next);
            if (g_.alive_count() > opts_.max_tiles)
                throw numeric_error("build_tiling: tile-count guard exceeded");
            if (++steps > 10L * opts_.max_tiles)
                throw numeric_error("build_tiling: processing-step guard exceeded");
        }
        return std::move(g_);
    }

private:
    const BetaTransform& bt_;
    TilingGraph g_;
    BuildOptions opts_;

    Tile& tile(int id) { return g_.tiles[static_cast<size_t>(id)]; }
    Edge& edge(int id) { return g_.edges[static_cast<size_t>(id)]; }

    int add_tile(SignPattern pattern, double lo, double hi) {
        Tile t;
        t.id = static_cast<int>(g_.tiles.size());
        t.pattern = std::move(pattern);
        t.beta_minus = lo;
        t.beta_plus = hi;
        t.uncovered = {{lo, hi}};
        g_.tiles.push_back(std::move(t));
        return g_.tiles.back().id;
    }

    int add_edge(int from, int to, double lo, double hi) {
        Edge e{static_cast<int>(g_.edges.size()), from, to, lo, hi};
        g_.edges.push_back(e);
        tile(from).child_edges.push_back(e.id);
        tile(to).parent_edges.push_back(e.id);
        return e.id;
    }

    void sort_edges(std::vector<int>& ids) {
        std::sort(ids.begin(), ids.end(),
                  [&](int a, int b) { return edge(a).beta_lo < edge(b).beta_lo; });
    }

    static void sort_segments(std::vector<BoundarySegment>& segs) {
        std::sort(segs.begin(), segs.end(),
                  [](const BoundarySegment& a, const BoundarySegment& b) {
                      return a.beta_lo < b.beta_lo;
                  });
    }

    void coalesce_segments(std::vector<BoundarySegment>& segs) const {
        std::vector<BoundarySegment> out;
        for (auto& s : segs) {
            if (!out.empty()) {
                auto& last = out.back();
                if (last.crossing_index == s.crossing_index && last.gamma == s.gamma &&
                    last.source == s.source && abuts(last.beta_hi, s.beta_lo, opts_.adjacency_rel)) {
                    last.beta_hi = s.beta_hi;
                    continue;
                }
            }
            out.push_back(std::move(s));
        }
        segs = std::move(out);
    }

    void process(int tid) {
        std::vector<std::pair<double, double>> intervals = tile(tid).uncovered;
        std::vector<std::vector<PreliminaryChild>> batches;
        for (auto [a, b] : intervals) {
            if (b - a <= opts_.adjacency_rel * std::max({std::abs(a), std::abs(b), 1e-300}))
                continue;  // below the resolution floor
            std::vector<double> cuts = subdivide(bt_, g_, tid, {{a, b}}, opts_);
            for (int eid : tile(tid).parent_edges) {
                for (double x : {edge(eid).beta_lo, edge(eid).beta_hi})
                    if (x > a && x < b) cuts.push_back(x);
            }
            std::sort(cuts.begin(), cuts.end());
            std::vector<double> grid{a};
            for (double x : cuts)
                if (x > grid.back() + opts_.adjacency_rel * std::max(1.0, std::abs(x)) &&
                    x < b - opts_.adjacency_rel * std::max(1.0, std::abs(b)))
                    grid.push_back(x);
            grid.push_back(b);

            std::vector<PreliminaryChild> batch;
            for (size_t k = 0; k + 1 < grid.size(); ++k) {
                auto piece = find_children_impl(bt_, g_, tid, {grid[k], grid[k + 1]}, opts_,
                                                &g_.tie_events);
                batch.insert(batch.end(), piece.begin(), piece.end());
            }
            batches.push_back(merge_preliminary(std::move(batch), opts_.adjacency_rel));
        }

        for (const auto& batch : batches) {
            for (const auto& c : batch) {
                if (!(c.beta_hi > c.beta_lo)) continue;
                BoundarySegment seg{c.beta_lo, c.beta_hi, c.crossing_index, c.gamma,
                                    tile(tid).pattern};
                if (c.sentinel()) {
                    tile(tid).lower.push_back(std::move(seg));
                    continue;
                }
                int child = add_tile(c.pattern, c.beta_lo, c.beta_hi);
                tile(child).upper.push_back(seg);
                add_edge(tid, child, c.beta_lo, c.beta_hi);
                tile(tid).lower.push_back(std::move(seg));
            }
        }
        {
            Tile& t = tile(tid);
            t.uncovered.clear();
            t.completed = true;
            sort_segments(t.lower);
            coalesce_segments(t.lower);
        }
        sort_edges(tile(tid).child_edges);
        within_parent_merge(tid);
        cross_merge(tid);
    }

    // Drop edge `drop` after extending `keep` over its range.
    void coalesce_edge_pair(int keep, int drop) {
        edge(keep).beta_hi = std::max(edge(keep).beta_hi, edge(drop).beta_hi);
        auto& ce = tile(edge(drop).from).child_edges;
        ce.erase(std::remove(ce.begin(), ce.end(), drop), ce.end());
        auto& pe = tile(edge(drop).to).parent_edges;
        pe.erase(std::remove(pe.begin(), pe.end(), drop), pe.end());
    }

    void coalesce_adjacent_edges(std::vector<int>& ids) {
        for (size_t i = 0; i + 1 < ids.size();) {
            int e1 = ids[i], e2 = ids[i + 1];
            if (edge(e1).from == edge(e2).from && edge(e1).to == edge(e2).to &&
                abuts(edge(e1).beta_hi, edge(e2).beta_lo, opts_.adjacency_rel)) {
                coalesce_edge_pair(e1, e2);
            } else {
                ++i;
            }
        }
    }

    void within_parent_merge(int tid) {
        bool changed = true;
        while (changed) {
            changed = false;
            auto ce = tile(tid).child_edges;
            for (size_t i = 0; i + 1 < ce.size(); ++i) {
                int e1 = ce[i], e2 = ce[i + 1];
                if (!abuts(edge(e1).beta_hi, edge(e2).beta_lo, opts_.adjacency_rel)) continue;
                int t1 = edge(e1).to, t2 = edge(e2).to;
                if (t1 == t2) {
                    coalesce_edge_pair(e1, e2);
                    changed = true;
                    break;
                }
                if (tile(t1).pattern == tile(t2).pattern) {
                    merge_tiles(t1, t2);
                    coalesce_adjacent_edges(tile(tid).child_edges);
                    changed = true;
                    break;
                }
            }
        }
    }

    // Absorb `right` into `left`; the merged tile is incomplete.
    int merge_tiles(int left, int right) {
        Tile& r = tile(right);
        std::vector<int> rp = r.parent_edges, rc = r.child_edges;
        for (int eid : rp) edge(eid).to = left;
        for (int eid : rc) edge(eid).from = left;
        {
            Tile& l = tile(left);
            l.beta_plus = std::max(l.beta_plus, r.beta_plus);
            l.beta_minus = std::min(l.beta_minus, r.beta_minus);
            l.upper.insert(l.upper.end(), r.upper.begin(), r.upper.end());
            l.lower.insert(l.lower.end(), r.lower.begin(), r.lower.end());
            l.uncovered.insert(l.uncovered.end(), r.uncovered.begin(), r.uncovered.end());
            l.parent_edges.insert(l.parent_edges.end(), rp.begin(), rp.end());
            l.child_edges.insert(l.child_edges.end(), rc.begin(), rc.end());
            sort_segments(l.upper);
            coalesce_segments(l.upper);
            sort_segments(l.lower);
            coalesce_segments(l.lower);
            std::sort(l.uncovered.begin(), l.uncovered.end());
            sort_edges(l.parent_edges);
            sort_edges(l.child_edges);
            l.completed = false;
        }
        r.alive = false;
        r.parent_edges.clear();
        r.child_edges.clear();
        coalesce_adjacent_edges(tile(left).parent_edges);
        coalesce_adjacent_edges(tile(left).child_edges);
        ++g_.merge_events;
        return left;
    }

    bool compatible(int candidate, int child, bool left_side) {
        if (candidate == child) return false;
        const Tile& y = tile(candidate);
        const Tile& c = tile(child);
        if (!(y.pattern == c.pattern)) return false;
        return left_side ? abuts(y.beta_plus, c.beta_minus, opts_.adjacency_rel)
                         : abuts(y.beta_minus, c.beta_plus, opts_.adjacency_rel);
    }

    // Trace extreme parents up from `hat` to the first ancestor whose branch
    // is not extreme, step to the adjacent sibling, and walk back down its
    // opposite-extreme children.
    int find_partner(int hat, int child, bool left_side) {
        int cur = hat;
        for (int guard = 0; guard < 100000; ++guard) {
            const auto& pe = tile(cur).parent_edges;
            if (pe.empty()) return -1;  // reached the root
            int e = left_side ? pe.front() : pe.back();
            int ancestor = edge(e).from;
            const auto& ce = tile(ancestor).child_edges;
            auto it = std::find(ce.begin(), ce.end(), e);
            if (it == ce.end()) return -1;
            size_t pos = static_cast<size_t>(it - ce.begin());
            bool is_extreme = left_side ? pos == 0 : pos + 1 == ce.size();
            if (!is_extreme) {
                int sib_edge = left_side ? ce[pos - 1] : ce[pos + 1];
                int y = edge(sib_edge).to;
                for (int g2 = 0; g2 < 100000; ++g2) {
                    if (compatible(y, child, left_side)) return y;
                    const auto& yce = tile(y).child_edges;
                    if (yce.empty()) return -1;
                    y = edge(left_side ? yce.back() : yce.front()).to;
                }
                return -1;
            }
            cur = ancestor;
        }
        return -1;
    }

    void cross_merge(int tid) {
        if (tile(tid).child_edges.empty()) return;
        int cminus = edge(tile(tid).child_edges.front()).to;
        int partner = find_partner(tid, cminus, true);
        if (partner >= 0) merge_tiles(partner, cminus);
        if (tile(tid).child_edges.empty()) return;
        int cplus = edge(tile(tid).child_edges.back()).to;
        int partner2 = find_partner(tid, cplus, false);
        if (partner2 >= 0) merge_tiles(cplus, partner2);
    }
};

}  // namespace

TilingGraph build_tiling(const BetaTransform& bt, std::pair<double, double> beta_range,
                         int s_max, PathVariant variant, const BuildOptions& opts) {
    Builder b(bt, beta_range, s_max, variant, opts);
    return b.run();
}

LocateResult locate(const TilingGraph& graph, const BetaTransform& bt, double beta,
                    double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("locate: alpha must be positive");
    double tol = 1e-12 * std::max(std::abs(graph.beta_min), std::abs(graph.beta_max));
    if (beta < graph.beta_min - tol || beta > graph.beta_max + tol)
        return {LocateStatus::out_of_range, -1};

    int t = graph.root;
    for (int guard = 0; guard < 1000000; ++guard) {
        auto al = graph.alpha_lower(bt, t, beta);
        if (!al) return {LocateStatus::below_computed_depth, -1};
        if (alpha >= *al) return {LocateStatus::ok, t};
        int next = -1;
        for (int eid : graph.tile(t).child_edges) {
            const Edge& e = graph.edge(eid);
            if (beta >= e.beta_lo && beta <= e.beta_hi) {
                next = e.to;
                break;
            }
        }
        if (next < 0) return {LocateStatus::below_computed_depth, -1};
        t = next;
    }
    return {LocateStatus::below_computed_depth, -1};
}

}  // namespace tilepath
