// Partitioning a test area into intersection-centered polygons: road
// intersections become Voronoi seeds, and each seed's cell is the local
// evaluation unit for the downstream metrics.

#pragma once

#include <cstddef>
#include <vector>

#include "routeval/geom.hpp"
#include "routeval/graph.hpp"

namespace routeval::partition {

struct SeedExtraction {
    std::vector<geom::Point2D> seeds;
    // Set when no node met min_degree and the extraction fell back to
    // degree >= 2.
    bool used_degree2_fallback = false;
    // Nodes absorbed into cluster centroids by the merge radius.
    std::size_t merged_nodes = 0;
};

// Seed positions at road nodes with degree >= min_degree.  Clusters of
// candidates closer than merge_radius (e.g. the two halves of a divided
// carriageway) are replaced by their centroid.  Falls back to degree >= 2
// when the degree filter leaves nothing; an empty road graph is an error.
// Seed order follows node order and is deterministic.
SeedExtraction extract_intersection_seeds(const graph::SpatialGraph& road,
                                          int min_degree = 3,
                                          double merge_radius = 10.0);

// An ordered tessellation of `region`: cells[i] is the Voronoi cell of
// seeds[i], cells are interior-disjoint, and their areas sum to the region
// area.
struct TIPartition {
    geom::Polygon region;
    std::vector<geom::Polygon> cells;
    std::vector<geom::Point2D> seeds;
    std::size_t seeds_outside_region = 0;
    std::size_t duplicate_seeds_merged = 0;
};

// Clipped Voronoi tessellation of the region around the given seeds.  Seeds
// outside the region are discarded (counted in the result); if none remain,
// or the seed list is empty, throws std::invalid_argument.  Cell order
// follows the surviving seeds' input order, and repeated runs on identical
// input produce identical geometry.
TIPartition tessellate(const geom::Polygon& region, const std::vector<geom::Point2D>& seeds);

}  // namespace routeval::partition
