// Spatial pathway graphs: GeoJSON in/out, basic statistics, connectivity,
// and betweenness centrality.

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "routeval/geom.hpp"

namespace routeval::graph {

using NodeId = std::uint32_t;
using EdgeId = std::uint32_t;

enum class EdgeClass { Sidewalk, Crossing, Other };

const char* to_string(EdgeClass c);

// Undirected graph embedded in the local metric plane.  Nodes are indexed
// densely; edges carry their full polyline geometry (first/last polyline
// vertices equal the endpoint node positions) and a class tag.  No self
// loops, no duplicate unordered endpoint pairs.
struct SpatialGraph {
    struct Edge {
        NodeId u = 0;
        NodeId v = 0;
        std::vector<geom::Point2D> polyline;
        EdgeClass cls = EdgeClass::Other;
    };

    std::vector<geom::Point2D> nodes;
    std::vector<Edge> edges;

    std::size_t node_count() const { return nodes.size(); }
    std::size_t edge_count() const { return edges.size(); }

    // Neighbor lists, sorted ascending.
    std::vector<std::vector<NodeId>> adjacency() const;
    std::vector<std::size_t> degrees() const;

    geom::BBox bbox() const;
    static double polyline_length(const std::vector<geom::Point2D>& pts);
};

// Incremental construction with endpoint snapping and edge deduplication.
class GraphBuilder {
  public:
    explicit GraphBuilder(double snap = 0.1);

    // Reuses any existing node within the snap radius, else creates one.
    NodeId snap_node(const geom::Point2D& p);
    // Always creates a new node (exact coordinates).
    NodeId add_node(const geom::Point2D& p);

    // Polyline may be empty (straight edge assumed); endpoints are rewritten
    // to the node positions.  Returns false when the edge is dropped as a
    // self loop, zero-length geometry, or duplicate pair.
    bool add_edge(NodeId u, NodeId v, std::vector<geom::Point2D> polyline, EdgeClass cls);

    std::size_t dropped_self_loops() const { return dropped_self_loops_; }
    std::size_t dropped_zero_length() const { return dropped_zero_length_; }
    std::size_t dropped_duplicates() const { return dropped_duplicates_; }

    SpatialGraph take();

  private:
    double snap_;
    SpatialGraph g_;
    std::unordered_map<std::uint64_t, std::vector<NodeId>> grid_;  // snap buckets
    std::unordered_map<std::uint64_t, char> edge_keys_;            // unordered endpoint pairs
    std::size_t dropped_self_loops_ = 0;
    std::size_t dropped_zero_length_ = 0;
    std::size_t dropped_duplicates_ = 0;
};

// ============================================================================
// GeoJSON
// ============================================================================

// Raised for documents that cannot be parsed; the message carries the byte
// offset reported by the JSON parser.
class ParseError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Maps GeoJSON feature properties to edge classes: the first rule whose key
// is present with the given string value wins; everything else is Other.
struct ClassTagConfig {
    struct Rule {
        std::string key;
        std::string value;
        EdgeClass cls;
    };
    std::vector<Rule> rules;

    static ClassTagConfig defaults();
};

struct LoadResult {
    SpatialGraph graph;
    std::size_t skipped_features = 0;    // non-line geometries
    std::size_t dropped_zero_length = 0; // degenerate geometry
    std::size_t dropped_self_loops = 0;  // closed lines, snap-collapsed ends
    std::size_t dropped_duplicates = 0;  // repeated unordered endpoint pair
};

// Parses a GeoJSON FeatureCollection (RFC 7946, WGS84 lon/lat order) into a
// SpatialGraph.  LineString features become edges, MultiLineString parts
// become individual edges, other geometry types are skipped and counted.
// Endpoints within `snap` meters of an existing node are merged.  Throws
// ParseError for malformed JSON and std::invalid_argument for documents that
// are structurally wrong or not interpretable as WGS84 (coordinates out of
// range, foreign "crs" member).  An empty FeatureCollection is a valid empty
// graph.
LoadResult load_geojson(const std::string& text, const geom::LocalProjection& proj,
                        double snap = 0.1,
                        const ClassTagConfig& classes = ClassTagConfig::defaults());

// Inverse of load_geojson: one LineString feature per edge, class tags as a
// "footway" property, no other properties.
std::string export_geojson(const SpatialGraph& g, const geom::LocalProjection& proj);

// Longitude/latitude bounds of every coordinate in a GeoJSON document; used
// to pick a projection origin before loading.  Returns false for documents
// without coordinates.
bool lonlat_bounds(const std::string& text, geom::LonLat& lo, geom::LonLat& hi);

// ============================================================================
// Statistics
// ============================================================================

struct GraphCounts {
    std::size_t n_nodes = 0;
    std::size_t n_edges = 0;
    double avg_degree = 0.0;  // 2E/N, 0 for the empty graph
};

GraphCounts counts(const SpatialGraph& g);

struct ComponentsResult {
    std::size_t count = 0;
    std::vector<std::uint32_t> labels;  // per node
};

ComponentsResult connected_components(const SpatialGraph& g);

enum class BcWeight { Hops, Length };

/// Exact betweenness centrality (Brandes), unordered-pair convention: the
// path a-b-c gives b a raw score of 1.  Normalization divides by
// (n-1)(n-2)/2; graphs with n <= 2 score all zeros.  Hops counts edges;
// Length uses polyline lengths as edge weights.
std::vector<double> betweenness_centrality(const SpatialGraph& g, bool normalized = true,
                                           BcWeight weight = BcWeight::Hops);

// ============================================================================
// Reusable cores (also used for clipped polygon graphs)
// ============================================================================

namespace alg {

std::pair<std::size_t, std::vector<std::uint32_t>> components(
    const std::vector<std::vector<std::uint32_t>>& adj);

std::vector<double> brandes(const std::vector<std::vector<std::uint32_t>>& adj,
                            bool normalized);

// Dijkstra-based variant; shortest-path ties are detected with a relative
// tolerance of 1e-12.
std::vector<double> brandes_weighted(
    const std::vector<std::vector<std::pair<std::uint32_t, double>>>& adj, bool normalized);

}  // namespace alg

}  // namespace routeval::graph
