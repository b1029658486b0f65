#include "routeval/perturb.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

namespace routeval::perturb {

// ============================================================================
// Grid city
// ============================================================================

GridCity generate_grid_city(const GridCitySpec& spec) {
    if (spec.rows < 2 || spec.cols < 2)
        throw std::invalid_argument("grid city needs at least 2x2 intersections");
    if (!(spec.block > 0.0) || !(spec.sidewalk_offset > 0.0) ||
        2.0 * spec.sidewalk_offset >= spec.block)
        throw std::invalid_argument("grid city needs 0 < 2*sidewalk_offset < block");

    const double b = spec.block;
    const double off = spec.sidewalk_offset;
    GridCity city;

    // Roads: row-major intersections, east edge then north edge.
    {
        graph::GraphBuilder rb(1e-9);
        for (std::size_t r = 0; r < spec.rows; ++r)
            for (std::size_t c = 0; c < spec.cols; ++c)
                rb.add_node({static_cast<double>(c) * b, static_cast<double>(r) * b});
        auto node = [&](std::size_t r, std::size_t c) {
            return static_cast<graph::NodeId>(r * spec.cols + c);
        };
        for (std::size_t r = 0; r < spec.rows; ++r) {
            for (std::size_t c = 0; c < spec.cols; ++c) {
                if (c + 1 < spec.cols)
                    rb.add_edge(node(r, c), node(r, c + 1), {}, graph::EdgeClass::Other);
                if (r + 1 < spec.rows)
                    rb.add_edge(node(r, c), node(r + 1, c), {}, graph::EdgeClass::Other);
            }
        }
        city.roads = rb.take();
    }

    // Walkways: one sidewalk rectangle per block, then crossing spokes.
    graph::GraphBuilder wb(1e-9);
    const std::size_t block_rows = spec.rows - 1;
    const std::size_t block_cols = spec.cols - 1;
    // corner ids per block: [sw, se, ne, nw]
    std::vector<std::array<graph::NodeId, 4>> corners(block_rows * block_cols);
    for (std::size_t br = 0; br < block_rows; ++br) {
        for (std::size_t bc = 0; bc < block_cols; ++bc) {
            const double x0 = static_cast<double>(bc) * b + off;
            const double x1 = static_cast<double>(bc + 1) * b - off;
            const double y0 = static_cast<double>(br) * b + off;
            const double y1 = static_cast<double>(br + 1) * b - off;
            auto& quad = corners[br * block_cols + bc];
            quad[0] = wb.add_node({x0, y0});
            quad[1] = wb.add_node({x1, y0});
            quad[2] = wb.add_node({x1, y1});
            quad[3] = wb.add_node({x0, y1});
            for (int k = 0; k < 4; ++k)
                wb.add_edge(quad[k], quad[(k + 1) % 4], {}, graph::EdgeClass::Sidewalk);
        }
    }
    for (std::size_t r = 0; r < spec.rows; ++r) {
        for (std::size_t c = 0; c < spec.cols; ++c) {
            // Blocks sharing intersection (r, c), scanned south-west first.
            std::vector<std::pair<std::size_t, std::size_t>> adjacent;
            for (std::size_t br : {r - 1, r})
                for (std::size_t bc : {c - 1, c})
                    if (br < block_rows && bc < block_cols) adjacent.emplace_back(br, bc);
            if (adjacent.size() < 2) continue;

            const geom::Point2D center_pos{static_cast<double>(c) * b, static_cast<double>(r) * b};
            const graph::NodeId center = wb.add_node(center_pos);
            for (const auto& [br, bc] : adjacent) {
                // The block corner closest to this intersection.
                const bool east = bc == c;  // block extends east of the intersection
                const bool north = br == r;
                const int k = north ? (east ? 0 : 1) : (east ? 3 : 2);
                wb.add_edge(corners[br * block_cols + bc][k], center, {},
                            graph::EdgeClass::Crossing);
            }
        }
    }
    city.walkways = wb.take();
    return city;
}

// ============================================================================
// Seeded randomness
// ============================================================================

double SplitMix64::gaussian() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    // Box-Muller; 1 - uniform() keeps the log argument in (0, 1].
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
}

// ============================================================================
// Perturbations
// ============================================================================

namespace {

void check_probability(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("probability must be in [0, 1]");
}

}  // namespace

graph::SpatialGraph drop_edges(const graph::SpatialGraph& g, double p, std::uint64_t seed,
                               std::optional<graph::EdgeClass> only) {
    check_probability(p);
    SplitMix64 rng(seed);
    graph::SpatialGraph out;
    out.nodes = g.nodes;
    for (const auto& e : g.edges) {
        const double draw = rng.uniform();
        const bool eligible = !only || e.cls == *only;
        if (eligible && draw < p) continue;
        out.edges.push_back(e);
    }
    return out;
}

graph::SpatialGraph jitter_nodes(const graph::SpatialGraph& g, double sigma, std::uint64_t seed) {
    if (!(sigma >= 0.0)) throw std::invalid_argument("sigma must be >= 0");
    SplitMix64 rng(seed);
    graph::SpatialGraph out = g;
    const double clamp = 3.0 * sigma;
    for (auto& p : out.nodes) {
        const double dx = std::clamp(rng.gaussian() * sigma, -clamp, clamp);
        const double dy = std::clamp(rng.gaussian() * sigma, -clamp, clamp);
        p.x += dx;
        p.y += dy;
    }
    for (auto& e : out.edges) {
        e.polyline.front() = out.nodes[e.u];
        e.polyline.back() = out.nodes[e.v];
    }
    return out;
}

namespace {

// First `length` meters of pts as a polyline (forward == true), or the last
// `length` meters (forward == false).
std::vector<geom::Point2D> polyline_slice(const std::vector<geom::Point2D>& pts, double length,
                                          bool forward) {
    std::vector<geom::Point2D> src = pts;
    if (!forward) std::reverse(src.begin(), src.end());
    std::vector<geom::Point2D> out{src.front()};
    double walked = 0.0;
    for (std::size_t i = 0; i + 1 < src.size(); ++i) {
        const double seg = geom::distance(src[i], src[i + 1]);
        if (walked + seg >= length) {
            const double t = seg > 0.0 ? (length - walked) / seg : 0.0;
            out.push_back(src[i] + (src[i + 1] - src[i]) * t);
            break;
        }
        walked += seg;
        out.push_back(src[i + 1]);
    }
    if (!forward) std::reverse(out.begin(), out.end());
    return out;
}

}  // namespace

graph::SpatialGraph fragment_edges(const graph::SpatialGraph& g, double p, double gap_fraction,
                                   std::uint64_t seed, double min_piece) {
    check_probability(p);
    if (!(gap_fraction > 0.0 && gap_fraction < 1.0))
        throw std::invalid_argument("gap_fraction must be in (0, 1)");
    if (!(min_piece > 0.0)) throw std::invalid_argument("min_piece must be > 0");

    SplitMix64 rng(seed);
    graph::SpatialGraph out;
    out.nodes = g.nodes;
    for (const auto& e : g.edges) {
        const double draw = rng.uniform();
        if (draw >= p) {
            out.edges.push_back(e);
            continue;
        }
        const double total = graph::SpatialGraph::polyline_length(e.polyline);
        const double piece = total * (1.0 - gap_fraction) / 2.0;
        if (piece < min_piece) continue;  // too short to break: remove it

        auto head = polyline_slice(e.polyline, piece, true);
        auto tail = polyline_slice(e.polyline, piece, false);
        const auto head_end = static_cast<graph::NodeId>(out.nodes.size());
        out.nodes.push_back(head.back());
        const auto tail_start = static_cast<graph::NodeId>(out.nodes.size());
        out.nodes.push_back(tail.front());
        out.edges.push_back({e.u, head_end, std::move(head), e.cls});
        out.edges.push_back({tail_start, e.v, std::move(tail), e.cls});
    }
    return out;
}

}  // namespace routeval::perturb
