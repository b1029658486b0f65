#include "routeval/clip.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace routeval::clip {

namespace {

// Positions along a polyline are measured in "segment units": position
// k + t is the point at parameter t of segment k.  Welding of nearby
// crossing events, however, happens in meters of arc length, matching the
// meter-scale boundary band of locate_point — a crossing is only folded
// into a neighbor when the two contacts are geometrically the same point,
// never just because it falls early in a long segment.
constexpr double kWeldEps = 1e-9;   // meters of arc length
constexpr double kPosEps = 1e-12;   // segment-unit float-noise guard

struct Breakpoint {
    double pos = 0.0;  // segment units
    double arc = 0.0;  // meters from the polyline start
    geom::Point2D point;
};

geom::Point2D point_at(const std::vector<geom::Point2D>& pts, double pos) {
    const auto last = static_cast<double>(pts.size() - 1);
    if (pos <= 0.0) return pts.front();
    if (pos >= last) return pts.back();
    auto k = static_cast<std::size_t>(pos);
    if (k + 1 >= pts.size()) k = pts.size() - 2;
    const double t = pos - static_cast<double>(k);
    return pts[k] + (pts[k + 1] - pts[k]) * t;
}

// Collects boundary-crossing breakpoints of the polyline, sorted and welded.
std::vector<Breakpoint> crossing_breakpoints(const std::vector<geom::Point2D>& pts,
                                             const geom::Polygon& poly) {
    std::vector<Breakpoint> events;
    double arc = 0.0;
    for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
        const geom::Point2D a = pts[k];
        const geom::Point2D b = pts[k + 1];
        const geom::Point2D dir = b - a;
        const double len2 = geom::norm2(dir);
        const double len = std::sqrt(len2);
        if (len2 <= 0.0) continue;
        geom::Segment seg(a, b);
        for (std::size_t s = 0; s < poly.size(); ++s) {
            for (const geom::Point2D& p : geom::segment_intersections(seg, poly.side(s))) {
                double t = geom::dot(p - a, dir) / len2;
                t = std::clamp(t, 0.0, 1.0);
                events.push_back({static_cast<double>(k) + t, arc + t * len, p});
            }
        }
        arc += len;
    }
    std::sort(events.begin(), events.end(),
              [](const Breakpoint& l, const Breakpoint& r) { return l.pos < r.pos; });

    const double last = static_cast<double>(pts.size() - 1);
    std::vector<Breakpoint> out;
    out.push_back({0.0, 0.0, pts.front()});
    for (const Breakpoint& e : events) {
        if (e.arc - out.back().arc <= kWeldEps) continue;  // same physical contact
        if (arc - e.arc <= kWeldEps) continue;             // welds with the far end
        out.push_back(e);
    }
    out.push_back({last, arc, pts.back()});
    return out;
}

struct Run {
    double a = 0.0;  // start position
    double b = 0.0;  // end position
};

bool inside(const geom::Polygon& poly, const geom::Point2D& p) {
    return geom::locate_point(p, poly) != geom::PointLocation::Outside;
}

// Maximal runs of the polyline lying inside the polygon, in order.
std::vector<Run> inside_runs(const std::vector<geom::Point2D>& pts, const geom::Polygon& poly) {
    const std::vector<Breakpoint> bps = crossing_breakpoints(pts, poly);
    std::vector<Run> runs;
    for (std::size_t i = 0; i + 1 < bps.size(); ++i) {
        const double mid = 0.5 * (bps[i].pos + bps[i + 1].pos);
        if (!inside(poly, point_at(pts, mid))) continue;
        if (!runs.empty() && runs.back().b == bps[i].pos) {
            runs.back().b = bps[i + 1].pos;  // tangential touch: merge through it
        } else {
            runs.push_back({bps[i].pos, bps[i + 1].pos});
        }
    }
    return runs;
}

std::vector<geom::Point2D> run_polyline(const std::vector<geom::Point2D>& pts, const Run& run) {
    std::vector<geom::Point2D> out;
    out.push_back(point_at(pts, run.a));
    const auto first = static_cast<std::size_t>(std::ceil(std::max(run.a - kPosEps, 0.0)));
    for (std::size_t i = first; static_cast<double>(i) < run.b - kPosEps && i < pts.size(); ++i) {
        if (static_cast<double>(i) <= run.a + kPosEps) continue;
        if (geom::distance(pts[i], out.back()) > 1e-12) out.push_back(pts[i]);
    }
    const geom::Point2D end = point_at(pts, run.b);
    if (geom::distance(end, out.back()) > 1e-12) out.push_back(end);
    if (out.size() < 2) out.push_back(out.back());  // degenerate: keep 2 points
    return out;
}

class Builder {
  public:
    explicit Builder(const geom::Polygon& poly) : poly_(poly) {}

    std::uint32_t interior_local(graph::NodeId parent, const geom::Point2D& pos) {
        auto [it, fresh] = interior_ids_.try_emplace(parent, 0);
        if (fresh) {
            it->second = static_cast<std::uint32_t>(pg_.interior_nodes.size());
            pg_.interior_nodes.push_back({parent, pos});
        }
        return it->second;
    }

    std::uint32_t terminator(const geom::Point2D& p, graph::EdgeId parent_edge) {
        const auto side = static_cast<std::uint32_t>(geom::nearest_side(p, poly_));
        terminators_.push_back({p, side, parent_edge});
        return kTerminatorFlag | static_cast<std::uint32_t>(terminators_.size() - 1);
    }

    void piece(std::uint32_t a, std::uint32_t b, graph::EdgeId parent,
               std::vector<geom::Point2D> polyline) {
        PolygonGraph::Piece pc;
        pc.a = a;
        pc.b = b;
        pc.kind = kind_of(a, b);
        pc.source_edge = parent;
        pc.length = graph::SpatialGraph::polyline_length(polyline);
        pc.polyline = std::move(polyline);
        pieces_.push_back(std::move(pc));
    }

    // Local ids were provisional while interior nodes were still being
    // discovered; fix terminator ids to come after all interior nodes.
    PolygonGraph finish() {
        const auto base = static_cast<std::uint32_t>(pg_.interior_nodes.size());
        pg_.terminators = std::move(terminators_);
        pg_.pieces = std::move(pieces_);
        for (auto& pc : pg_.pieces) {
            if (pc.a & kTerminatorFlag) pc.a = base + (pc.a & ~kTerminatorFlag);
            if (pc.b & kTerminatorFlag) pc.b = base + (pc.b & ~kTerminatorFlag);
        }
        pg_.side_count = static_cast<std::uint32_t>(poly_.size());
        return std::move(pg_);
    }

  private:
    static constexpr std::uint32_t kTerminatorFlag = 0x8000'0000u;

    static PieceKind kind_of(std::uint32_t a, std::uint32_t b) {
        const int terms = ((a & kTerminatorFlag) ? 1 : 0) + ((b & kTerminatorFlag) ? 1 : 0);
        if (terms == 0) return PieceKind::Interior;
        if (terms == 1) return PieceKind::Cut;
        return PieceKind::PassThrough;
    }

    const geom::Polygon& poly_;
    PolygonGraph pg_;
    std::vector<TerminatingNode> terminators_;
    std::vector<PolygonGraph::Piece> pieces_;
    std::map<graph::NodeId, std::uint32_t> interior_ids_;
};

}  // namespace

std::vector<std::vector<std::uint32_t>> PolygonGraph::adjacency() const {
    std::vector<std::vector<std::uint32_t>> adj(node_count());
    for (const Piece& p : pieces) {
        adj[p.a].push_back(p.b);
        adj[p.b].push_back(p.a);
    }
    for (auto& list : adj) {
        std::sort(list.begin(), list.end());
        list.erase(std::unique(list.begin(), list.end()), list.end());
    }
    return adj;
}

std::vector<std::vector<std::uint32_t>> PolygonGraph::terminators_by_boundary() const {
    std::vector<std::vector<std::uint32_t>> by_side(side_count);
    for (std::size_t i = 0; i < terminators.size(); ++i) {
        const std::uint32_t side = terminators[i].boundary_index;
        if (side >= side_count) throw std::logic_error("terminator boundary index out of range");
        by_side[side].push_back(terminator_id(i));
    }
    return by_side;
}

PolygonGraph clip_graph(const graph::SpatialGraph& g, const geom::Polygon& poly,
                        const ClipOptions& opts,
                        const std::vector<graph::EdgeId>* edge_candidates,
                        const std::vector<graph::NodeId>* node_candidates) {
    if (opts.sliver_min_length < 0.0) throw std::invalid_argument("sliver_min_length must be >= 0");
    Builder builder(poly);
    const geom::BBox poly_box = poly.bbox();

    // Register every inside node up front (covers isolated nodes) so interior
    // node order is node-id order regardless of which edges touch them.
    auto consider_node = [&](graph::NodeId id) {
        const geom::Point2D p = g.nodes[id];
        if (poly_box.contains(p) && inside(poly, p)) builder.interior_local(id, p);
    };
    if (node_candidates) {
        for (graph::NodeId id : *node_candidates) consider_node(id);
    } else {
        for (graph::NodeId id = 0; id < g.nodes.size(); ++id) consider_node(id);
    }

    auto clip_edge = [&](graph::EdgeId eid) {
        const auto& e = g.edges[eid];
        const auto& pts = e.polyline;
        geom::BBox box;
        for (const auto& p : pts) box.expand(p);
        if (!box.intersects(poly_box)) return;

        const bool u_in = inside(poly, g.nodes[e.u]);
        const bool v_in = inside(poly, g.nodes[e.v]);
        if (opts.strict && !u_in && !v_in) return;

        const double last = static_cast<double>(pts.size() - 1);
        bool start_anchored = false;  // some kept piece begins at node u
        bool end_anchored = false;

        for (const Run& run : inside_runs(pts, poly)) {
            // Welding guarantees the first/last breakpoints carry these
            // exact position values.
            const bool at_start = run.a == 0.0;
            const bool at_end = run.b == last;
            if (opts.strict) {
                // Keep the full polyline, or the piece hanging off the single
                // inside endpoint, cut at the first crossing; drop the rest.
                const bool whole = at_start && at_end && u_in && v_in;
                const bool cut_from_u = at_start && u_in && !v_in;
                const bool cut_from_v = at_end && v_in && !u_in;
                if (!(whole || cut_from_u || cut_from_v)) continue;
            }
            std::vector<geom::Point2D> poly_pts = run_polyline(pts, run);
            const bool boundary_both = !at_start && !at_end;
            if (boundary_both) {
                if (!opts.keep_pass_through || opts.strict) continue;
                if (graph::SpatialGraph::polyline_length(poly_pts) < opts.sliver_min_length)
                    continue;  // grazing contact, numerically inside
            }
            const std::uint32_t a = at_start ? builder.interior_local(e.u, g.nodes[e.u])
                                             : builder.terminator(poly_pts.front(), eid);
            const std::uint32_t b = at_end ? builder.interior_local(e.v, g.nodes[e.v])
                                           : builder.terminator(poly_pts.back(), eid);
            builder.piece(a, b, eid, std::move(poly_pts));
            start_anchored = start_anchored || at_start;
            end_anchored = end_anchored || at_end;
        }

        // An endpoint sitting on the boundary whose edge immediately leaves
        // the polygon still reaches the boundary: synthesize a zero-length
        // cut piece to its own terminating node.
        auto synthesize = [&](bool node_in, graph::NodeId node, bool anchored, bool other_in) {
            if (!node_in || anchored) return;
            if (opts.strict && other_in) return;  // strict keeps only one-in/one-out cuts
            const geom::Point2D p = g.nodes[node];
            if (geom::locate_point(p, poly) != geom::PointLocation::OnBoundary) return;
            const std::uint32_t a = builder.interior_local(node, p);
            const std::uint32_t b = builder.terminator(p, eid);
            builder.piece(a, b, eid, {p, p});
        };
        synthesize(u_in, e.u, start_anchored, v_in);
        synthesize(v_in, e.v, end_anchored, u_in);
    };

    if (edge_candidates) {
        for (graph::EdgeId eid : *edge_candidates) clip_edge(eid);
    } else {
        for (graph::EdgeId eid = 0; eid < g.edges.size(); ++eid) clip_edge(eid);
    }
    return builder.finish();
}

}  // namespace routeval::clip
