#include "routeval/metrics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "routeval/spatial_index.hpp"

namespace routeval::metrics {

namespace {

bool sorted_intersect(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b) {
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] < b[j]) {
            ++i;
        } else if (b[j] < a[i]) {
            ++j;
        } else {
            return true;
        }
    }
    return false;
}

}  // namespace

TraversablePairSet traversable_pairs(const clip::PolygonGraph& pg, std::uint32_t polygon_id) {
    TraversablePairSet out;
    out.polygon_id = polygon_id;
    if (pg.terminators.empty()) return out;

    const auto [component_count, labels] = graph::alg::components(pg.adjacency());
    (void)component_count;

    // Component labels of the terminators on each boundary side, sorted so
    // same-side duplicates and cross-side overlaps are cheap to detect.
    const auto by_side = pg.terminators_by_boundary();
    std::vector<std::vector<std::uint32_t>> side_labels(pg.side_count);
    for (std::uint32_t s = 0; s < pg.side_count; ++s) {
        side_labels[s].reserve(by_side[s].size());
        for (std::uint32_t local : by_side[s]) side_labels[s].push_back(labels[local]);
        std::sort(side_labels[s].begin(), side_labels[s].end());
    }

    for (std::uint32_t i = 0; i < pg.side_count; ++i) {
        const auto& li = side_labels[i];
        for (std::size_t k = 0; k + 1 < li.size(); ++k) {
            if (li[k] == li[k + 1]) {  // two distinct terminators, one component
                out.pairs.emplace(i, i);
                break;
            }
        }
        for (std::uint32_t j = 0; j < i; ++j) {
            if (sorted_intersect(li, side_labels[j])) out.pairs.emplace(i, j);
        }
    }
    return out;
}

double traversability_similarity(const TraversablePairSet& a, const TraversablePairSet& b) {
    if (a.polygon_id != b.polygon_id)
        throw std::invalid_argument("traversability_similarity: pair sets describe different polygons");
    if (a.pairs.empty() && b.pairs.empty()) return 1.0;
    std::size_t inter = 0;
    for (const auto& p : a.pairs) inter += b.pairs.count(p);
    const std::size_t uni = a.pairs.size() + b.pairs.size() - inter;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

namespace {

struct LocalStats {
    std::size_t components = 0;
    double mean_bc = 0.0;
    std::size_t nodes = 0;
};

LocalStats local_stats(const clip::PolygonGraph& pg, graph::BcWeight weight) {
    LocalStats s;
    s.nodes = pg.node_count();
    if (s.nodes == 0) return s;
    const auto adj = pg.adjacency();
    s.components = graph::alg::components(adj).first;

    std::vector<double> bc;
    if (weight == graph::BcWeight::Hops) {
        bc = graph::alg::brandes(adj, /*normalized=*/true);
    } else {
        std::vector<std::vector<std::pair<std::uint32_t, double>>> wadj(s.nodes);
        for (const auto& pc : pg.pieces) {
            wadj[pc.a].emplace_back(pc.b, pc.length);
            wadj[pc.b].emplace_back(pc.a, pc.length);
        }
        bc = graph::alg::brandes_weighted(wadj, /*normalized=*/true);
    }
    double sum = 0.0;
    for (double v : bc) sum += v;
    s.mean_bc = sum / static_cast<double>(bc.size());
    return s;
}

}  // namespace

PolygonMetrics cell_metrics(std::uint32_t cell_index, const clip::PolygonGraph& truth,
                            const clip::PolygonGraph& pred, graph::BcWeight bc_weight) {
    PolygonMetrics m;
    m.cell_index = cell_index;

    const TraversablePairSet pt = traversable_pairs(truth, cell_index);
    const TraversablePairSet pp = traversable_pairs(pred, cell_index);
    m.similarity = traversability_similarity(pt, pp);
    m.pairs_truth = pt.pairs.size();
    m.pairs_pred = pp.pairs.size();

    const LocalStats st = local_stats(truth, bc_weight);
    const LocalStats sp = local_stats(pred, bc_weight);
    m.components_truth = st.components;
    m.components_pred = sp.components;
    m.mean_bc_truth = st.mean_bc;
    m.mean_bc_pred = sp.mean_bc;
    m.nodes_truth = st.nodes;
    m.nodes_pred = sp.nodes;
    return m;
}

std::vector<PolygonMetrics> polygon_metrics(const graph::SpatialGraph& truth,
                                            const graph::SpatialGraph& pred,
                                            const partition::TIPartition& part,
                                            const MetricsOptions& opts) {
    const std::size_t n = part.cells.size();
    std::vector<PolygonMetrics> out(n);
    if (n == 0) return out;

    // Bucket size on the order of a cell keeps candidate lists short.
    const geom::BBox rb = part.region.bbox();
    const double extent = std::max(rb.hi.x - rb.lo.x, rb.hi.y - rb.lo.y);
    const double bucket = std::max(extent / std::max(1.0, std::sqrt(static_cast<double>(n))), 1e-3);

    geom::GridIndex truth_edges(bucket);
    geom::GridIndex truth_nodes(bucket);
    geom::GridIndex pred_edges(bucket);
    geom::GridIndex pred_nodes(bucket);
    auto index_graph = [](const graph::SpatialGraph& g, geom::GridIndex& edges,
                          geom::GridIndex& nodes) {
        for (std::uint32_t i = 0; i < g.edges.size(); ++i) {
            geom::BBox b;
            for (const auto& p : g.edges[i].polyline) b.expand(p);
            edges.insert(i, b);
        }
        for (std::uint32_t i = 0; i < g.nodes.size(); ++i) {
            geom::BBox b;
            b.expand(g.nodes[i]);
            nodes.insert(i, b);
        }
    };
    index_graph(truth, truth_edges, truth_nodes);
    index_graph(pred, pred_edges, pred_nodes);

    unsigned jobs = opts.jobs > 0 ? static_cast<unsigned>(opts.jobs)
                                  : std::max(1u, std::thread::hardware_concurrency());
    jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, n));

    // Cells map into preallocated slots, so the result (and every report
    // derived from it) is byte-identical no matter how many workers ran.
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr error;
    auto worker = [&]() {
        try {
            for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
                const geom::Polygon& cell = part.cells[i];
                const geom::BBox cb = cell.bbox();
                const auto te = truth_edges.query(cb);
                const auto tn = truth_nodes.query(cb);
                const auto pe = pred_edges.query(cb);
                const auto pn = pred_nodes.query(cb);
                const auto truth_pg = clip::clip_graph(truth, cell, opts.clip, &te, &tn);
                const auto pred_pg = clip::clip_graph(pred, cell, opts.clip, &pe, &pn);
                out[i] = cell_metrics(static_cast<std::uint32_t>(i), truth_pg, pred_pg,
                                      opts.bc_weight);
            }
        } catch (...) {
            const std::lock_guard<std::mutex> lock(error_mutex);
            if (!error) error = std::current_exception();
        }
    };

    if (jobs <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(jobs);
        for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (error) std::rethrow_exception(error);
    return out;
}

AggregateMetrics aggregate(const std::vector<PolygonMetrics>& cells, bool exclude_empty_cells) {
    if (cells.empty()) throw std::invalid_argument("aggregate: empty cell list");
    AggregateMetrics agg;
    agg.cells_total = cells.size();

    double sim = 0.0;
    double cc_t = 0.0;
    double cc_p = 0.0;
    double bc_t = 0.0;
    double bc_p = 0.0;
    std::size_t scored = 0;
    for (const PolygonMetrics& c : cells) {
        cc_t += static_cast<double>(c.components_truth);
        cc_p += static_cast<double>(c.components_pred);
        bc_t += c.mean_bc_truth;
        bc_p += c.mean_bc_pred;
        if (exclude_empty_cells && c.pairs_truth == 0 && c.pairs_pred == 0) continue;
        sim += c.similarity;
        ++scored;
    }
    const auto nd = static_cast<double>(cells.size());
    agg.mean_components_truth = cc_t / nd;
    agg.mean_components_pred = cc_p / nd;
    agg.mean_bc_truth = bc_t / nd;
    agg.mean_bc_pred = bc_p / nd;
    agg.cells_scored = scored;
    agg.mean_similarity = scored == 0 ? 1.0 : sim / static_cast<double>(scored);
    return agg;
}

double polyline_min_distance(const std::vector<geom::Point2D>& a,
                             const std::vector<geom::Point2D>& b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("polyline_min_distance: empty polyline");
    double best = std::numeric_limits<double>::infinity();
    if (a.size() == 1 || b.size() == 1) {
        const auto& pts = a.size() == 1 ? b : a;
        const geom::Point2D p = a.size() == 1 ? a.front() : b.front();
        if (pts.size() == 1) return geom::distance(p, pts.front());
        for (std::size_t i = 0; i + 1 < pts.size(); ++i)
            best = std::min(best, geom::distance_point_segment(p, pts[i], pts[i + 1]));
        return best;
    }
    for (std::size_t i = 0; i + 1 < a.size(); ++i) {
        for (std::size_t j = 0; j + 1 < b.size(); ++j) {
            best = std::min(best,
                            geom::distance_segment_segment(a[i], a[i + 1], b[j], b[j + 1]));
            if (best == 0.0) return 0.0;
        }
    }
    return best;
}

namespace {

double directed_hausdorff(const std::vector<geom::Point2D>& from,
                          const std::vector<geom::Point2D>& to, double step) {
    double worst = 0.0;
    auto point_to_polyline = [&](const geom::Point2D& p) {
        double best = std::numeric_limits<double>::infinity();
        if (to.size() == 1) return geom::distance(p, to.front());
        for (std::size_t j = 0; j + 1 < to.size(); ++j)
            best = std::min(best, geom::distance_point_segment(p, to[j], to[j + 1]));
        return best;
    };
    for (std::size_t i = 0; i + 1 < from.size(); ++i) {
        const double len = geom::distance(from[i], from[i + 1]);
        const auto samples = static_cast<std::size_t>(std::ceil(len / step));
        for (std::size_t k = 0; k <= samples; ++k) {
            const double t = samples == 0 ? 0.0 : static_cast<double>(k) / static_cast<double>(samples);
            worst = std::max(worst,
                             point_to_polyline(from[i] + (from[i + 1] - from[i]) * t));
        }
    }
    if (from.size() == 1) worst = std::max(worst, point_to_polyline(from.front()));
    return worst;
}

}  // namespace

double polyline_hausdorff_distance(const std::vector<geom::Point2D>& a,
                                   const std::vector<geom::Point2D>& b, double step) {
    if (a.empty() || b.empty())
        throw std::invalid_argument("polyline_hausdorff_distance: empty polyline");
    if (step <= 0.0) throw std::invalid_argument("polyline_hausdorff_distance: step must be > 0");
    return std::max(directed_hausdorff(a, b, step), directed_hausdorff(b, a, step));
}

EdgeRetrieval edge_retrieval(const graph::SpatialGraph& truth, const graph::SpatialGraph& pred,
                             double threshold, EdgeDistance distance) {
    if (threshold < 0.0) throw std::invalid_argument("edge_retrieval: threshold must be >= 0");
    EdgeRetrieval r;
    r.truth_edges = truth.edges.size();
    r.pred_edges = pred.edges.size();
    if (truth.edges.empty() || pred.edges.empty()) return r;

    const double step = std::max(threshold / 4.0, 0.25);
    auto close = [&](const std::vector<geom::Point2D>& a, const std::vector<geom::Point2D>& b) {
        if (distance == EdgeDistance::MinDistance)
            return polyline_min_distance(a, b) <= threshold;
        return polyline_hausdorff_distance(a, b, step) <= threshold;
    };

    auto count_matched = [&](const graph::SpatialGraph& from, const graph::SpatialGraph& to) {
        const double extent = 50.0 + 2.0 * threshold;
        geom::GridIndex index(extent);
        for (std::uint32_t i = 0; i < to.edges.size(); ++i) {
            geom::BBox b;
            for (const auto& p : to.edges[i].polyline) b.expand(p);
            index.insert(i, b);
        }
        std::size_t matched = 0;
        for (const auto& e : from.edges) {
            geom::BBox b;
            for (const auto& p : e.polyline) b.expand(p);
            b.dilate(threshold + 1e-9);
            for (std::uint32_t cand : index.query(b)) {
                if (close(e.polyline, to.edges[cand].polyline)) {
                    ++matched;
                    break;
                }
            }
        }
        return matched;
    };

    r.truth_matched = count_matched(truth, pred);   // recall numerator
    r.pred_matched = count_matched(pred, truth);    // precision numerator
    r.recall = static_cast<double>(r.truth_matched) / static_cast<double>(r.truth_edges);
    r.precision = static_cast<double>(r.pred_matched) / static_cast<double>(r.pred_edges);
    r.f1 = (r.precision + r.recall) > 0.0
               ? 2.0 * r.precision * r.recall / (r.precision + r.recall)
               : 0.0;
    return r;
}

}  // namespace routeval::metrics
