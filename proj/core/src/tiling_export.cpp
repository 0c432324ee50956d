#include "tilepath/tiling_export.hpp"

#include "tilepath/io.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace tilepath {

namespace {

using ordered_json = nlohmann::ordered_json;

std::vector<double> sample_betas(double lo, double hi, int points) {
    std::vector<double> out;
    int k = std::max(2, points);
    double llo = std::log(lo), lhi = std::log(hi);
    for (int i = 0; i < k; ++i)
        out.push_back(std::exp(llo + (lhi - llo) * i / (k - 1)));
    out.front() = lo;
    out.back() = hi;
    return out;
}

struct Polyline {
    std::vector<double> beta;
    std::vector<double> alpha;
};

Polyline sample_boundary(const BetaTransform& bt, const std::vector<BoundarySegment>& segs,
                         int points) {
    Polyline p;
    for (const auto& seg : segs) {
        for (double b : sample_betas(seg.beta_lo, seg.beta_hi, points)) {
            p.beta.push_back(b);
            p.alpha.push_back(eval_segment(bt, seg, b));
        }
    }
    return p;
}

// Edge records reachable from alive tiles; merged-away edge slots are skipped.
std::vector<int> live_edges(const TilingGraph& g) {
    std::vector<int> out;
    for (int id : g.alive_ids())
        for (int eid : g.tile(id).child_edges) out.push_back(eid);
    std::sort(out.begin(), out.end());
    return out;
}

const char* kPalette[] = {"#4878cf", "#6acc65", "#d65f5f", "#b47cc7",
                          "#c4ad66", "#77bedb", "#e0a23d", "#8c8c8c"};

}  // namespace

std::string tiling_to_json(const TilingGraph& graph, const BetaTransform& bt,
                           const ExportOptions& opts) {
    ordered_json root;
    root["beta_range"] = {graph.beta_min, graph.beta_max};
    root["s_max"] = graph.s_max;
    root["variant"] = graph.variant == PathVariant::lars ? "lars" : "lasso";
    auto ids = graph.alive_ids();
    root["tile_count"] = ids.size();
    root["tie_events"] = graph.tie_events;
    root["merge_events"] = graph.merge_events;

    ordered_json tiles = ordered_json::array();
    for (int id : ids) {
        const Tile& t = graph.tile(id);
        ordered_json jt;
        jt["id"] = t.id;
        jt["support"] = t.pattern.indices();
        jt["signs"] = t.pattern.signs();
        jt["beta_range"] = {t.beta_minus, t.beta_plus};
        jt["completed"] = t.completed;
        auto lower = sample_boundary(bt, t.lower, opts.polyline_points);
        jt["lower_boundary"] = {{"beta", lower.beta}, {"alpha", lower.alpha}};
        if (t.upper.empty()) {
            jt["upper_boundary"] = nullptr;  // root, alpha^+ = inf
        } else {
            auto upper = sample_boundary(bt, t.upper, opts.polyline_points);
            jt["upper_boundary"] = {{"beta", upper.beta}, {"alpha", upper.alpha}};
        }
        tiles.push_back(std::move(jt));
    }
    root["tiles"] = std::move(tiles);

    ordered_json edges = ordered_json::array();
    for (int eid : live_edges(graph)) {
        const Edge& e = graph.edge(eid);
        edges.push_back({{"from", e.from}, {"to", e.to}, {"beta_range", {e.beta_lo, e.beta_hi}}});
    }
    root["edges"] = std::move(edges);
    return root.dump(2) + "\n";
}

std::string tiling_to_svg(const TilingGraph& graph, const BetaTransform& bt,
                          const ExportOptions& opts) {
    const double W = opts.svg_width, H = opts.svg_height, margin = 50;
    auto ids = graph.alive_ids();

    // Display range from the sampled boundary values.
    double amin = std::numeric_limits<double>::infinity(), amax = 0.0;
    std::vector<std::pair<Polyline, Polyline>> polylines;  // (lower, upper) per tile
    for (int id : ids) {
        const Tile& t = graph.tile(id);
        Polyline lo = sample_boundary(bt, t.lower, opts.polyline_points);
        Polyline up = sample_boundary(bt, t.upper, opts.polyline_points);
        for (double a : lo.alpha)
            if (a > 0 && std::isfinite(a)) {
                amin = std::min(amin, a);
                amax = std::max(amax, a);
            }
        for (double a : up.alpha)
            if (a > 0 && std::isfinite(a)) {
                amin = std::min(amin, a);
                amax = std::max(amax, a);
            }
        polylines.emplace_back(std::move(lo), std::move(up));
    }
    if (!(amax > 0)) {
        amin = 1e-3;
        amax = 1.0;
    }
    amax *= 2.0;
    amin *= 0.5;

    double lbmin = std::log10(graph.beta_min), lbmax = std::log10(graph.beta_max);
    double lamin = std::log10(amin), lamax = std::log10(amax);
    auto X = [&](double b) {
        return margin + (std::log10(b) - lbmin) / (lbmax - lbmin) * (W - 2 * margin);
    };
    auto Y = [&](double a) {
        double c = std::clamp(a, amin, amax);
        return H - margin - (std::log10(c) - lamin) / (lamax - lamin) * (H - 2 * margin);
    };

    std::ostringstream svg;
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
        << "\" viewBox=\"0 0 " << W << " " << H << "\">\n"
        << "<rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H
        << "\" fill=\"white\"/>\n";

    for (size_t k = 0; k < ids.size(); ++k) {
        const Tile& t = graph.tile(ids[k]);
        const auto& [lo, up] = polylines[k];
        std::ostringstream pts;
        if (lo.beta.empty()) {
            // incomplete tile: draw between its known upper boundary and the display bottom
            pts << X(t.beta_minus) << ',' << Y(amin) << ' ' << X(t.beta_plus) << ',' << Y(amin)
                << ' ';
        } else {
            for (size_t i = 0; i < lo.beta.size(); ++i)
                pts << X(lo.beta[i]) << ',' << Y(std::max(lo.alpha[i], amin)) << ' ';
        }
        if (up.beta.empty()) {
            pts << X(t.beta_plus) << ',' << Y(amax) << ' ' << X(t.beta_minus) << ',' << Y(amax);
        } else {
            for (size_t i = up.beta.size(); i-- > 0;)
                pts << X(up.beta[i]) << ',' << Y(std::min(up.alpha[i], amax))
                    << (i == 0 ? "" : " ");
        }
        bool highlighted = opts.highlight_support &&
                           t.pattern.indices() == *opts.highlight_support;
        const char* fill = highlighted
                               ? "#ffd700"
                               : kPalette[static_cast<size_t>(t.support_size()) %
                                          (sizeof(kPalette) / sizeof(kPalette[0]))];
        svg << "<polygon points=\"" << pts.str() << "\" fill=\"" << fill
            << "\" fill-opacity=\"0.65\" stroke=\"" << (highlighted ? "#c00000" : "#303030")
            << "\" stroke-width=\"" << (highlighted ? 2.0 : 0.5) << "\">";
        svg << "<title>support " << t.pattern.to_string() << "</title></polygon>\n";
    }

    svg << "<text x=\"" << W / 2 << "\" y=\"" << H - 12
        << "\" text-anchor=\"middle\" font-size=\"14\">log10 beta</text>\n"
        << "<text x=\"14\" y=\"" << H / 2
        << "\" text-anchor=\"middle\" font-size=\"14\" transform=\"rotate(-90 14 " << H / 2
        << ")\">log10 alpha</text>\n"
        << "</svg>\n";
    return svg.str();
}

}  // namespace tilepath
