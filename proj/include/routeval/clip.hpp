// Clipping a spatial graph to a polygon.  The result keeps the interior
// structure plus explicit "terminating nodes" where edges cross the polygon
// boundary, bucketed by boundary side — the raw material for boundary-to-
// boundary traversability checks.
//
// Conventions: the polygon is closed, so nodes and geometry on the boundary
// count as inside (a node on a shared tessellation edge belongs to both
// neighboring cells).  Crossings that land exactly on a polygon vertex are
// assigned to the lower-indexed adjacent side.

#pragma once

#include <cstdint>
#include <vector>

#include "routeval/geom.hpp"
#include "routeval/graph.hpp"

namespace routeval::clip {

struct TerminatingNode {
    geom::Point2D position;
    std::uint32_t boundary_index = 0;   // polygon side the crossing lies on
    graph::EdgeId source_edge = 0;      // parent edge that produced it
};

enum class PieceKind {
    Interior,     // whole parent polyline inside; both ends are real nodes
    Cut,          // one end a real node, the other a terminating node
    PassThrough,  // both ends terminating nodes (entered and left the polygon)
};

// The clipped graph: local node ids cover interior nodes first, then
// terminating nodes.  Pieces are undirected edges between local ids and keep
// their parent edge id and clipped geometry.
struct PolygonGraph {
    struct InteriorNode {
        graph::NodeId parent = 0;
        geom::Point2D position;
    };
    struct Piece {
        std::uint32_t a = 0;
        std::uint32_t b = 0;
        PieceKind kind = PieceKind::Interior;
        graph::EdgeId source_edge = 0;
        std::vector<geom::Point2D> polyline;
        double length = 0.0;
    };

    std::vector<InteriorNode> interior_nodes;
    std::vector<TerminatingNode> terminators;
    std::vector<Piece> pieces;
    std::uint32_t side_count = 0;

    std::size_t node_count() const { return interior_nodes.size() + terminators.size(); }
    bool empty() const { return node_count() == 0; }
    std::uint32_t terminator_id(std::size_t i) const {
        return static_cast<std::uint32_t>(interior_nodes.size() + i);
    }

    // Sorted, deduplicated neighbor lists over all local nodes.
    std::vector<std::vector<std::uint32_t>> adjacency() const;
    // terminator local ids per polygon side.
    std::vector<std::vector<std::uint32_t>> terminators_by_boundary() const;
};

struct ClipOptions {
    // Keep pieces that enter and leave the polygon without touching an
    // interior node.  On by default: a polyline passing through a cell still
    // connects the boundary sides it crosses.
    bool keep_pass_through = true;
    // Restrict to the narrower cut-edge model: edges fully inside stay,
    // edges with exactly one endpoint inside are cut at the first boundary
    // crossing walking from the inside endpoint, everything else is dropped.
    bool strict = false;
    // Boundary-to-boundary pieces shorter than this are numerical slivers
    // (a polyline grazing the boundary) and are discarded.  Meters.
    double sliver_min_length = 0.01;
};

// Clips g to poly.  `edge_candidates` / `node_candidates`, when given, must
// be supersets of the ids whose geometry can touch the polygon (callers use
// a spatial index); null means all.  Edge order in the result follows parent
// edge id order, so output is deterministic.
PolygonGraph clip_graph(const graph::SpatialGraph& g, const geom::Polygon& poly,
                        const ClipOptions& opts = {},
                        const std::vector<graph::EdgeId>* edge_candidates = nullptr,
                        const std::vector<graph::NodeId>* node_candidates = nullptr);

}  // namespace routeval::clip
