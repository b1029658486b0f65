// Synthetic test-bed: a grid city with a road network and a matching
// pedestrian network (sidewalk loops inside each block, crossing spokes at
// shared street corners), plus seeded perturbations for degrading a network
// in controlled ways.  Everything is deterministic given the same inputs.

#pragma once

#include <cstdint>
#include <optional>

#include "routeval/graph.hpp"

namespace routeval::perturb {

// ============================================================================
// Grid city
// ============================================================================

struct GridCitySpec {
    std::size_t rows = 4;          // intersections along y
    std::size_t cols = 4;          // intersections along x
    double block = 100.0;          // street spacing, meters
    double sidewalk_offset = 6.0;  // sidewalk inset from the block edge
};

struct GridCity {
    graph::SpatialGraph roads;     // intersections and street segments
    graph::SpatialGraph walkways;  // sidewalk rectangles + crossing spokes
};

// Intersection (r, c) sits at (c * block, r * block).  Each of the
// (rows-1) x (cols-1) blocks carries a rectangular sidewalk loop inset by
// sidewalk_offset.  Each intersection touching at least two blocks gets a
// center node with one crossing spoke from the nearest sidewalk corner of
// every adjacent block, so corner intersections have no crossings, edge
// intersections two, and interior intersections four.  Throws
// std::invalid_argument unless rows, cols >= 2 and 0 < 2*sidewalk_offset <
// block.
GridCity generate_grid_city(const GridCitySpec& spec);

// ============================================================================
// Seeded randomness
// ============================================================================

// Small deterministic generator (splitmix64) so perturbations reproduce
// bit-for-bit across platforms.  uniform() draws from [0, 1); gaussian()
// is standard normal via Box-Muller.
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E37'79B9'7F4A'7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58'476D'1CE4'E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D0'49BB'1331'11EBull;
        return z ^ (z >> 31);
    }

    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double gaussian();

  private:
    std::uint64_t state_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

// ============================================================================
// Perturbations
// ============================================================================

// Removes each edge independently with probability p (one uniform draw per
// edge, in edge id order).  When `only` is set, edges of other classes are
// never dropped but still consume their draw, so results for the same seed
// stay aligned across filters.  Nodes are kept even if isolated.
graph::SpatialGraph drop_edges(const graph::SpatialGraph& g, double p, std::uint64_t seed,
                               std::optional<graph::EdgeClass> only = std::nullopt);

// Displaces every node by independent N(0, sigma^2) offsets per axis
// (two gaussian draws per node, in node id order), each component clamped
// to +-3 sigma.  Edge endpoints follow their nodes; interior polyline
// vertices are left untouched.
graph::SpatialGraph jitter_nodes(const graph::SpatialGraph& g, double sigma, std::uint64_t seed);

// Breaks each selected edge (probability p, one draw per edge in id order)
// by removing a centered stretch of gap_fraction of its length, producing
// two shorter edges with fresh endpoint nodes.  Edges too short to leave
// two pieces of at least min_piece meters are removed outright.
graph::SpatialGraph fragment_edges(const graph::SpatialGraph& g, double p, double gap_fraction,
                                   std::uint64_t seed, double min_piece = 0.5);

}  // namespace routeval::perturb
