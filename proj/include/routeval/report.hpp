// End-to-end evaluation and report emission: runs the full pipeline
// (projection-space graphs -> intersection seeds -> tessellation -> per-cell
// metrics -> aggregates + edge retrieval) and serializes the result as
// canonical JSON, a flattened CSV view, and a per-cell choropleth GeoJSON.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "routeval/geom.hpp"
#include "routeval/graph.hpp"
#include "routeval/metrics.hpp"
#include "routeval/partition.hpp"

namespace routeval::report {

struct EvalOptions {
    double threshold = 4.0;            // edge-retrieval match distance, meters
    int min_degree = 3;                // intersection seed degree filter
    double seed_merge_radius = 10.0;   // near-duplicate intersection merge
    double region_dilation = 50.0;     // hull clearance when no region given
    bool strict_clip = false;          // narrower cut-edge clipping model
    bool include_pass_through = true;  // ignored (forced off) when strict_clip
    bool exclude_empty_cells = false;  // leave empty/empty cells out of the mean
    graph::BcWeight bc_weight = graph::BcWeight::Hops;
    metrics::EdgeDistance edge_distance = metrics::EdgeDistance::MinDistance;
    int jobs = 0;                      // <= 0: all hardware threads
    std::uint64_t seed = 0;            // echoed into the report config
    std::string method_label = "prediction";
    std::string area_label;
};

struct EvaluationReport {
    std::string method_label;
    std::string area_label;
    graph::GraphCounts counts_truth;
    graph::GraphCounts counts_pred;
    metrics::AggregateMetrics aggregates;
    metrics::EdgeRetrieval retrieval;
    std::vector<metrics::PolygonMetrics> per_polygon;
    partition::TIPartition partition;
    bool used_degree2_fallback = false;
    std::size_t intersection_nodes_merged = 0;
    EvalOptions config;
};

// Runs the evaluation in projected coordinates.  When `region` is empty the
// test area defaults to the dilated convex hull of both graphs' nodes.
// Throws std::invalid_argument for unusable inputs (no nodes to derive a
// region from, empty road graph, no seeds inside the region).
EvaluationReport evaluate(const graph::SpatialGraph& truth, const graph::SpatialGraph& pred,
                          const graph::SpatialGraph& roads,
                          const std::optional<geom::Polygon>& region, const EvalOptions& opts);

// Canonical JSON document (schema_version 1).  Key order and number
// formatting are deterministic, so equal reports serialize to equal bytes.
// The requested job count is deliberately not echoed: results do not depend
// on it and neither should the bytes.
std::string report_json(const EvaluationReport& rep);

// Flattened key,value view of the same document: one row per scalar, keys as
// JSON pointers, values in the exact serialization report_json uses.
std::string report_csv(const EvaluationReport& rep);

// FeatureCollection of cell polygons (WGS84) with per-cell metric properties
// for choropleth rendering.
std::string cells_geojson(const EvaluationReport& rep, const geom::LocalProjection& proj);

// Human-readable table for the `report` subcommand.
std::string format_table(const std::string& report_json_text);

}  // namespace routeval::report
