#include "routeval/partition.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

namespace routeval::partition {

using geom::Point2D;

namespace {

// Union-find over candidate indices.
struct DisjointSet {
    std::vector<std::uint32_t> parent;
    explicit DisjointSet(std::size_t n) : parent(n) {
        std::iota(parent.begin(), parent.end(), 0u);
    }
    std::uint32_t find(std::uint32_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(std::uint32_t a, std::uint32_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};

std::uint64_t cell_key(std::int64_t cx, std::int64_t cy) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(cx)) << 32) |
           static_cast<std::uint32_t>(cy);
}

// Merge candidate positions closer than radius into cluster centroids,
// preserving first-seen order.
std::vector<Point2D> merge_clusters(const std::vector<Point2D>& pts, double radius,
                                    std::size_t& merged_nodes) {
    if (radius <= 0.0 || pts.size() < 2) return pts;
    DisjointSet ds(pts.size());
    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> grid;
    for (std::uint32_t i = 0; i < pts.size(); ++i) {
        auto cx = static_cast<std::int64_t>(std::floor(pts[i].x / radius));
        auto cy = static_cast<std::int64_t>(std::floor(pts[i].y / radius));
        for (std::int64_t dx = -1; dx <= 1; ++dx) {
            for (std::int64_t dy = -1; dy <= 1; ++dy) {
                auto it = grid.find(cell_key(cx + dx, cy + dy));
                if (it == grid.end()) continue;
                for (std::uint32_t j : it->second) {
                    if (geom::distance2(pts[i], pts[j]) < radius * radius) ds.unite(i, j);
                }
            }
        }
        grid[cell_key(cx, cy)].push_back(i);
    }

    std::unordered_map<std::uint32_t, std::pair<Point2D, std::size_t>> clusters;
    std::vector<std::uint32_t> roots;  // first-seen order
    for (std::uint32_t i = 0; i < pts.size(); ++i) {
        std::uint32_t r = ds.find(i);
        auto [it, inserted] = clusters.try_emplace(r, std::make_pair(Point2D{}, 0));
        if (inserted) roots.push_back(r);
        it->second.first = it->second.first + pts[i];
        ++it->second.second;
    }
    std::vector<Point2D> out;
    out.reserve(roots.size());
    for (std::uint32_t r : roots) {
        auto& [sum, n] = clusters[r];
        out.push_back(sum * (1.0 / static_cast<double>(n)));
        if (n > 1) merged_nodes += n - 1;
    }
    return out;
}

}  // namespace

SeedExtraction extract_intersection_seeds(const graph::SpatialGraph& road, int min_degree,
                                          double merge_radius) {
    if (road.node_count() == 0)
        throw std::invalid_argument("extract_intersection_seeds: empty road network");
    if (min_degree < 1)
        throw std::invalid_argument("extract_intersection_seeds: min_degree must be >= 1");

    auto deg = road.degrees();
    auto collect = [&](std::size_t threshold) {
        std::vector<Point2D> out;
        for (std::size_t i = 0; i < deg.size(); ++i) {
            if (deg[i] >= threshold) out.push_back(road.nodes[i]);
        }
        return out;
    };

    SeedExtraction result;
    auto candidates = collect(static_cast<std::size_t>(min_degree));
    if (candidates.empty() && min_degree > 2) {
        candidates = collect(2);
        result.used_degree2_fallback = true;
    }
    result.seeds = merge_clusters(candidates, merge_radius, result.merged_nodes);
    return result;
}

TIPartition tessellate(const geom::Polygon& region, const std::vector<Point2D>& seeds) {
    if (seeds.empty()) throw std::invalid_argument("tessellate: no seeds");

    std::vector<Point2D> inside;
    inside.reserve(seeds.size());
    std::size_t outside = 0;
    for (const Point2D& s : seeds) {
        if (geom::locate_point(s, region) == geom::PointLocation::Outside)
            ++outside;
        else
            inside.push_back(s);
    }
    if (inside.empty())
        throw std::invalid_argument("tessellate: no seeds inside the region");

    geom::VoronoiResult vr = geom::voronoi_cells(inside, region);

    TIPartition part{region, {}, {}, outside, vr.duplicates_merged};
    part.cells = std::move(vr.cells);
    part.seeds.reserve(part.cells.size());
    for (std::size_t idx : vr.seed_index) part.seeds.push_back(inside[idx]);
    return part;
}

}  // namespace routeval::partition
