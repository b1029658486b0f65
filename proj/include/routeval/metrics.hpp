// Routability metrics over clipped polygon graphs and full networks:
//   - traversable boundary pairs and their Jaccard similarity per polygon,
//   - local connectivity statistics (components, betweenness centrality),
//   - geometry-based edge retrieval precision / recall / F1.

#pragma once

#include <cstdint>
#include <set>
#include <utility>
#include <vector>

#include "routeval/clip.hpp"
#include "routeval/graph.hpp"
#include "routeval/partition.hpp"

namespace routeval::metrics {

// Unordered pairs (i, j) of boundary sides, stored with j <= i.  Pair (i, i)
// means two distinct terminating nodes on side i connect through the cell.
struct TraversablePairSet {
    std::uint32_t polygon_id = 0;
    std::set<std::pair<std::uint32_t, std::uint32_t>> pairs;
};

TraversablePairSet traversable_pairs(const clip::PolygonGraph& pg, std::uint32_t polygon_id = 0);

// Jaccard overlap of the two pair sets.  Both empty counts as full agreement
// (an empty cell predicted empty is correct).  Throws std::invalid_argument
// when the sets describe different polygons.
double traversability_similarity(const TraversablePairSet& a, const TraversablePairSet& b);

struct PolygonMetrics {
    std::uint32_t cell_index = 0;
    double similarity = 1.0;
    std::size_t components_truth = 0;
    std::size_t components_pred = 0;
    double mean_bc_truth = 0.0;
    double mean_bc_pred = 0.0;
    std::size_t pairs_truth = 0;
    std::size_t pairs_pred = 0;
    std::size_t nodes_truth = 0;  // local node counts, terminators included
    std::size_t nodes_pred = 0;
};

// Metrics for one already-clipped cell.
PolygonMetrics cell_metrics(std::uint32_t cell_index, const clip::PolygonGraph& truth,
                            const clip::PolygonGraph& pred,
                            graph::BcWeight bc_weight = graph::BcWeight::Hops);

struct MetricsOptions {
    clip::ClipOptions clip;
    graph::BcWeight bc_weight = graph::BcWeight::Hops;
    int jobs = 1;  // <= 0 means hardware concurrency
};

// Clips both graphs to every cell of the partition and computes per-cell
// metrics.  Results are indexed by cell and independent of `jobs`.
std::vector<PolygonMetrics> polygon_metrics(const graph::SpatialGraph& truth,
                                            const graph::SpatialGraph& pred,
                                            const partition::TIPartition& part,
                                            const MetricsOptions& opts = {});

struct AggregateMetrics {
    double mean_similarity = 1.0;
    double mean_components_truth = 0.0;
    double mean_components_pred = 0.0;
    double mean_bc_truth = 0.0;
    double mean_bc_pred = 0.0;
    std::size_t cells_total = 0;
    std::size_t cells_scored = 0;  // cells entering the similarity mean
};

// Averages per-cell metrics.  With exclude_empty_cells, cells whose truth and
// prediction both produced no traversable pairs are left out of the
// similarity mean (they still count for the connectivity means); if that
// leaves nothing, the similarity is 1.0.  Throws std::invalid_argument on an
// empty input list.
AggregateMetrics aggregate(const std::vector<PolygonMetrics>& cells,
                           bool exclude_empty_cells = false);

enum class EdgeDistance {
    MinDistance,  // closest approach between the two polylines
    Hausdorff,    // symmetric Hausdorff distance over sampled points
};

struct EdgeRetrieval {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t truth_edges = 0;
    std::size_t pred_edges = 0;
    std::size_t truth_matched = 0;
    std::size_t pred_matched = 0;
};

// An edge is retrieved when some edge of the other graph lies within
// `threshold` meters under the chosen distance.  Either graph empty yields
// all-zero scores.
EdgeRetrieval edge_retrieval(const graph::SpatialGraph& truth, const graph::SpatialGraph& pred,
                             double threshold = 4.0,
                             EdgeDistance distance = EdgeDistance::MinDistance);

// Closest approach between two polylines in meters.
double polyline_min_distance(const std::vector<geom::Point2D>& a,
                             const std::vector<geom::Point2D>& b);

// Symmetric Hausdorff distance between two polylines, evaluated on points
// sampled at most `step` meters apart (vertices always included).
double polyline_hausdorff_distance(const std::vector<geom::Point2D>& a,
                                   const std::vector<geom::Point2D>& b, double step);

}  // namespace routeval::metrics
