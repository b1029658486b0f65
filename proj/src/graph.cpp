#include "routeval/graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <queue>
#include <stdexcept>

#include <json.hpp>

namespace routeval::graph {

using geom::Point2D;
using nlohmann::json;

const char* to_string(EdgeClass c) {
    switch (c) {
        case EdgeClass::Sidewalk: return "sidewalk";
        case EdgeClass::Crossing: return "crossing";
        default: return "other";
    }
}

// ============================================================================
// SpatialGraph
// ============================================================================

std::vector<std::vector<NodeId>> SpatialGraph::adjacency() const {
    std::vector<std::vector<NodeId>> adj(nodes.size());
    for (const Edge& e : edges) {
        adj[e.u].push_back(e.v);
        adj[e.v].push_back(e.u);
    }
    for (auto& nbrs : adj) std::sort(nbrs.begin(), nbrs.end());
    return adj;
}

std::vector<std::size_t> SpatialGraph::degrees() const {
    std::vector<std::size_t> deg(nodes.size(), 0);
    for (const Edge& e : edges) {
        ++deg[e.u];
        ++deg[e.v];
    }
    return deg;
}

geom::BBox SpatialGraph::bbox() const {
    geom::BBox b;
    for (const Point2D& p : nodes) b.expand(p);
    for (const Edge& e : edges)
        for (const Point2D& p : e.polyline) b.expand(p);
    return b;
}

double SpatialGraph::polyline_length(const std::vector<Point2D>& pts) {
    double len = 0.0;
    for (std::size_t i = 1; i < pts.size(); ++i) len += geom::distance(pts[i - 1], pts[i]);
    return len;
}

// ============================================================================
// GraphBuilder
// ============================================================================

namespace {

std::uint64_t cell_key(std::int64_t cx, std::int64_t cy) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(cx)) << 32) |
           static_cast<std::uint32_t>(cy);
}

std::uint64_t pair_key(NodeId a, NodeId b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | b;
}

}  // namespace

GraphBuilder::GraphBuilder(double snap) : snap_(std::max(snap, 1e-12)) {}

NodeId GraphBuilder::snap_node(const Point2D& p) {
    auto cx = static_cast<std::int64_t>(std::floor(p.x / snap_));
    auto cy = static_cast<std::int64_t>(std::floor(p.y / snap_));
    NodeId best = 0;
    double best_d2 = snap_ * snap_;
    bool found = false;
    for (std::int64_t dx = -1; dx <= 1; ++dx) {
        for (std::int64_t dy = -1; dy <= 1; ++dy) {
            auto it = grid_.find(cell_key(cx + dx, cy + dy));
            if (it == grid_.end()) continue;
            for (NodeId id : it->second) {
                double d2 = geom::distance2(p, g_.nodes[id]);
                if (d2 < best_d2 || (d2 == best_d2 && found && id < best)) {
                    best_d2 = d2;
                    best = id;
                    found = true;
                }
            }
        }
    }
    if (found) return best;
    return add_node(p);
}

NodeId GraphBuilder::add_node(const Point2D& p) {
    auto id = static_cast<NodeId>(g_.nodes.size());
    g_.nodes.push_back(p);
    auto cx = static_cast<std::int64_t>(std::floor(p.x / snap_));
    auto cy = static_cast<std::int64_t>(std::floor(p.y / snap_));
    grid_[cell_key(cx, cy)].push_back(id);
    return id;
}

bool GraphBuilder::add_edge(NodeId u, NodeId v, std::vector<Point2D> polyline, EdgeClass cls) {
    if (u >= g_.nodes.size() || v >= g_.nodes.size())
        throw std::invalid_argument("GraphBuilder::add_edge: unknown node id");
    if (u == v) {
        ++dropped_self_loops_;
        return false;
    }
    if (polyline.empty()) polyline = {g_.nodes[u], g_.nodes[v]};
    polyline.front() = g_.nodes[u];
    polyline.back() = g_.nodes[v];
    std::vector<Point2D> clean;
    clean.reserve(polyline.size());
    for (const Point2D& p : polyline) {
        if (clean.empty() || !geom::almost_equal(clean.back(), p)) clean.push_back(p);
    }
    if (clean.size() < 2) {
        ++dropped_zero_length_;
        return false;
    }
    if (!edge_keys_.emplace(pair_key(u, v), 1).second) {
        ++dropped_duplicates_;
        return false;
    }
    g_.edges.push_back({u, v, std::move(clean), cls});
    return true;
}

SpatialGraph GraphBuilder::take() { return std::move(g_); }

// ============================================================================
// GeoJSON
// ============================================================================

namespace {

json parse_document(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError("malformed GeoJSON at byte " + std::to_string(e.byte) + ": " +
                         e.what());
    }
}

void check_crs(const json& doc) {
    if (!doc.contains("crs") || doc["crs"].is_null()) return;
    std::string name;
    const json& crs = doc["crs"];
    if (crs.is_object() && crs.contains("properties") && crs["properties"].is_object() &&
        crs["properties"].contains("name") && crs["properties"]["name"].is_string())
        name = crs["properties"]["name"].get<std::string>();
    if (name.find("CRS84") != std::string::npos || name.find("4326") != std::string::npos)
        return;
    throw std::invalid_argument(
        "GeoJSON declares an unsupported CRS (\"" + name +
        "\"); only WGS84 longitude/latitude (RFC 7946) is accepted");
}

geom::LonLat read_position(const json& pos) {
    if (!pos.is_array() || pos.size() < 2 || !pos[0].is_number() || !pos[1].is_number())
        throw std::invalid_argument("GeoJSON position is not an array of two numbers");
    geom::LonLat ll{pos[0].get<double>(), pos[1].get<double>()};
    if (!(std::abs(ll.lon) <= 180.0) || !(std::abs(ll.lat) <= 90.0))
        throw std::invalid_argument(
            "coordinate (" + std::to_string(ll.lon) + ", " + std::to_string(ll.lat) +
            ") is outside WGS84 longitude/latitude range; the document does not appear "
            "to use the required geographic CRS");
    return ll;
}

EdgeClass classify(const json& feature, const ClassTagConfig& classes) {
    if (!feature.contains("properties") || !feature["properties"].is_object())
        return EdgeClass::Other;
    const json& props = feature["properties"];
    for (const auto& rule : classes.rules) {
        auto it = props.find(rule.key);
        if (it != props.end() && it->is_string() && it->get<std::string>() == rule.value)
            return rule.cls;
    }
    return EdgeClass::Other;
}

}  // namespace

ClassTagConfig ClassTagConfig::defaults() {
    return {{
        {"footway", "sidewalk", EdgeClass::Sidewalk},
        {"footway", "crossing", EdgeClass::Crossing},
        {"highway", "footway", EdgeClass::Sidewalk},
        {"highway", "pedestrian", EdgeClass::Sidewalk},
        {"highway", "crossing", EdgeClass::Crossing},
        {"class", "sidewalk", EdgeClass::Sidewalk},
        {"class", "crossing", EdgeClass::Crossing},
    }};
}

LoadResult load_geojson(const std::string& text, const geom::LocalProjection& proj,
                        double snap, const ClassTagConfig& classes) {
    json doc = parse_document(text);
    if (!doc.is_object() || doc.value("type", std::string{}) != "FeatureCollection")
        throw std::invalid_argument("GeoJSON document is not a FeatureCollection");
    check_crs(doc);

    GraphBuilder builder(snap);
    LoadResult result;

    auto add_line = [&](const json& coords, EdgeClass cls) {
        if (!coords.is_array())
            throw std::invalid_argument("LineString coordinates are not an array");
        if (coords.size() < 2) {
            ++result.dropped_zero_length;
            return;
        }
        std::vector<Point2D> poly;
        poly.reserve(coords.size());
        for (const json& pos : coords) poly.push_back(proj.project(read_position(pos)));
        NodeId u = builder.snap_node(poly.front());
        NodeId v = builder.snap_node(poly.back());
        builder.add_edge(u, v, std::move(poly), cls);
    };

    if (doc.contains("features")) {
        if (!doc["features"].is_array())
            throw std::invalid_argument("FeatureCollection \"features\" is not an array");
        for (const json& f : doc["features"]) {
            if (!f.is_object() || !f.contains("geometry") || f["geometry"].is_null()) {
                ++result.skipped_features;
                continue;
            }
            const json& geometry = f["geometry"];
            std::string type = geometry.value("type", std::string{});
            EdgeClass cls = classify(f, classes);
            if (type == "LineString") {
                add_line(geometry["coordinates"], cls);
            } else if (type == "MultiLineString") {
                if (!geometry["coordinates"].is_array())
                    throw std::invalid_argument("MultiLineString coordinates are not an array");
                for (const json& part : geometry["coordinates"]) add_line(part, cls);
            } else {
                ++result.skipped_features;
            }
        }
    }

    result.dropped_zero_length += builder.dropped_zero_length();
    result.dropped_self_loops = builder.dropped_self_loops();
    result.dropped_duplicates = builder.dropped_duplicates();
    result.graph = builder.take();
    return result;
}

std::string export_geojson(const SpatialGraph& g, const geom::LocalProjection& proj) {
    json features = json::array();
    for (const SpatialGraph::Edge& e : g.edges) {
        json coords = json::array();
        for (const Point2D& p : e.polyline) {
            geom::LonLat ll = proj.unproject(p);
            coords.push_back(json::array({ll.lon, ll.lat}));
        }
        json props = json::object();
        if (e.cls != EdgeClass::Other) props["footway"] = to_string(e.cls);
        features.push_back({{"type", "Feature"},
                            {"geometry", {{"type", "LineString"}, {"coordinates", coords}}},
                            {"properties", props}});
    }
    json doc = {{"type", "FeatureCollection"}, {"features", features}};
    return doc.dump();
}

bool lonlat_bounds(const std::string& text, geom::LonLat& lo, geom::LonLat& hi) {
    json doc = parse_document(text);
    bool any = false;
    lo = {1e300, 1e300};
    hi = {-1e300, -1e300};
    // Walk every array shaped like a position; covers all geometry types.
    auto walk = [&](const json& node, auto&& self) -> void {
        if (!node.is_structured()) return;
        if (node.is_array() && node.size() >= 2 && node[0].is_number() && node[1].is_number()) {
            double lon = node[0].get<double>();
            double lat = node[1].get<double>();
            lo.lon = std::min(lo.lon, lon);
            lo.lat = std::min(lo.lat, lat);
            hi.lon = std::max(hi.lon, lon);
            hi.lat = std::max(hi.lat, lat);
            any = true;
            return;
        }
        if (node.is_array()) {
            for (const json& child : node) self(child, self);
        } else if (node.is_object() && node.contains("coordinates")) {
            self(node["coordinates"], self);
        } else if (node.is_object()) {
            for (const char* key : {"features", "geometry", "geometries"}) {
                if (node.contains(key)) self(node[key], self);
            }
        }
    };
    walk(doc, walk);
    return any;
}

// ============================================================================
// Statistics
// ============================================================================

GraphCounts counts(const SpatialGraph& g) {
    GraphCounts c;
    c.n_nodes = g.node_count();
    c.n_edges = g.edge_count();
    c.avg_degree = c.n_nodes == 0 ? 0.0 : 2.0 * static_cast<double>(c.n_edges) /
                                              static_cast<double>(c.n_nodes);
    return c;
}

ComponentsResult connected_components(const SpatialGraph& g) {
    auto [count, labels] = alg::components(g.adjacency());
    return {count, std::move(labels)};
}

std::vector<double> betweenness_centrality(const SpatialGraph& g, bool normalized,
                                           BcWeight weight) {
    if (weight == BcWeight::Hops) return alg::brandes(g.adjacency(), normalized);
    std::vector<std::vector<std::pair<std::uint32_t, double>>> adj(g.node_count());
    for (const SpatialGraph::Edge& e : g.edges) {
        double w = SpatialGraph::polyline_length(e.polyline);
        adj[e.u].push_back({e.v, w});
        adj[e.v].push_back({e.u, w});
    }
    for (auto& nbrs : adj) std::sort(nbrs.begin(), nbrs.end());
    return alg::brandes_weighted(adj, normalized);
}

// ============================================================================
// Algorithm cores
// ============================================================================

namespace alg {

std::pair<std::size_t, std::vector<std::uint32_t>> components(
    const std::vector<std::vector<std::uint32_t>>& adj) {
    const std::size_t n = adj.size();
    std::vector<std::uint32_t> labels(n, 0);
    std::vector<char> seen(n, 0);
    std::uint32_t next = 0;
    std::deque<std::uint32_t> q;
    for (std::uint32_t s = 0; s < n; ++s) {
        if (seen[s]) continue;
        seen[s] = 1;
        labels[s] = next;
        q.push_back(s);
        while (!q.empty()) {
            std::uint32_t v = q.front();
            q.pop_front();
            for (std::uint32_t w : adj[v]) {
                if (!seen[w]) {
                    seen[w] = 1;
                    labels[w] = next;
                    q.push_back(w);
                }
            }
        }
        ++next;
    }
    return {next, std::move(labels)};
}

namespace {

void normalize_bc(std::vector<double>& bc, bool normalized) {
    const std::size_t n = bc.size();
    // Unordered-pair convention: each (s, t) pair counted once.
    for (double& v : bc) v /= 2.0;
    if (!normalized) return;
    if (n <= 2) {
        std::fill(bc.begin(), bc.end(), 0.0);
        return;
    }
    double denom = static_cast<double>(n - 1) * static_cast<double>(n - 2) / 2.0;
    for (double& v : bc) v /= denom;
}

}  // namespace

std::vector<double> brandes(const std::vector<std::vector<std::uint32_t>>& adj,
                            bool normalized) {
    const std::size_t n = adj.size();
    std::vector<double> bc(n, 0.0);
    std::vector<std::int32_t> dist(n);
    std::vector<double> sigma(n), delta(n);
    std::vector<std::vector<std::uint32_t>> pred(n);
    std::vector<std::uint32_t> order;
    order.reserve(n);
    std::deque<std::uint32_t> q;

    for (std::uint32_t s = 0; s < n; ++s) {
        std::fill(dist.begin(), dist.end(), -1);
        std::fill(sigma.begin(), sigma.end(), 0.0);
        std::fill(delta.begin(), delta.end(), 0.0);
        for (auto& p : pred) p.clear();
        order.clear();

        dist[s] = 0;
        sigma[s] = 1.0;
        q.push_back(s);
        while (!q.empty()) {
            std::uint32_t v = q.front();
            q.pop_front();
            order.push_back(v);
            for (std::uint32_t w : adj[v]) {
                if (dist[w] < 0) {
                    dist[w] = dist[v] + 1;
                    q.push_back(w);
                }
                if (dist[w] == dist[v] + 1) {
                    sigma[w] += sigma[v];
                    pred[w].push_back(v);
                }
            }
        }
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            std::uint32_t w = *it;
            for (std::uint32_t v : pred[w])
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
            if (w != s) bc[w] += delta[w];
        }
    }
    normalize_bc(bc, normalized);
    return bc;
}

std::vector<double> brandes_weighted(
    const std::vector<std::vector<std::pair<std::uint32_t, double>>>& adj, bool normalized) {
    const std::size_t n = adj.size();
    constexpr double kInf = 1e300;
    std::vector<double> bc(n, 0.0);
    std::vector<double> dist(n), sigma(n), delta(n);
    std::vector<std::vector<std::uint32_t>> pred(n);

    using Item = std::pair<double, std::uint32_t>;
    for (std::uint32_t s = 0; s < n; ++s) {
        std::fill(dist.begin(), dist.end(), kInf);
        std::fill(sigma.begin(), sigma.end(), 0.0);
        std::fill(delta.begin(), delta.end(), 0.0);
        for (auto& p : pred) p.clear();

        std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
        std::vector<std::uint32_t> order;
        std::vector<char> settled(n, 0);
        dist[s] = 0.0;
        sigma[s] = 1.0;
        pq.push({0.0, s});
        while (!pq.empty()) {
            auto [d, v] = pq.top();
            pq.pop();
            if (settled[v]) continue;
            settled[v] = 1;
            order.push_back(v);
            for (auto [w, len] : adj[v]) {
                double nd = dist[v] + len;
                double tol = 1e-12 * (1.0 + std::abs(nd));
                if (nd < dist[w] - tol) {
                    dist[w] = nd;
                    sigma[w] = sigma[v];
                    pred[w].assign(1, v);
                    pq.push({nd, w});
                } else if (!settled[w] && std::abs(nd - dist[w]) <= tol) {
                    sigma[w] += sigma[v];
                    pred[w].push_back(v);
                }
            }
        }
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            std::uint32_t w = *it;
            for (std::uint32_t v : pred[w])
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
            if (w != s) bc[w] += delta[w];
        }
    }
    normalize_bc(bc, normalized);
    return bc;
}

}  // namespace alg

}  // namespace routeval::graph
