#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <vector>

#include "routeval/perturb.hpp"

using namespace routeval;
using graph::EdgeClass;
using perturb::GridCity;
using perturb::GridCitySpec;

namespace {

std::size_t count_class(const graph::SpatialGraph& g, EdgeClass cls) {
    return static_cast<std::size_t>(
        std::count_if(g.edges.begin(), g.edges.end(),
                      [&](const auto& e) { return e.cls == cls; }));
}

bool same_graph(const graph::SpatialGraph& a, const graph::SpatialGraph& b) {
    if (a.node_count() != b.node_count() || a.edge_count() != b.edge_count())
        return false;
    for (std::size_t i = 0; i < a.nodes.size(); ++i)
        if (a.nodes[i].x != b.nodes[i].x || a.nodes[i].y != b.nodes[i].y) return false;
    for (std::size_t e = 0; e < a.edges.size(); ++e) {
        if (a.edges[e].u != b.edges[e].u || a.edges[e].v != b.edges[e].v) return false;
        if (a.edges[e].polyline.size() != b.edges[e].polyline.size()) return false;
        for (std::size_t k = 0; k < a.edges[e].polyline.size(); ++k)
            if (a.edges[e].polyline[k].x != b.edges[e].polyline[k].x ||
                a.edges[e].polyline[k].y != b.edges[e].polyline[k].y)
                return false;
    }
    return true;
}

}  // namespace

// ============================================================================
// Grid city generator
// ============================================================================

TEST_CASE("grid city node and edge counts follow the layout formulas") {
    SUBCASE("2x2: one block, no crossings") {
        GridCity city = perturb::generate_grid_city({2, 2, 100.0, 6.0});
        CHECK(city.roads.node_count() == 4);
        CHECK(city.roads.edge_count() == 4);
        CHECK(city.walkways.node_count() == 4);   // one sidewalk rectangle
        CHECK(city.walkways.edge_count() == 4);
        CHECK(count_class(city.walkways, EdgeClass::Crossing) == 0);
        CHECK(count_class(city.walkways, EdgeClass::Sidewalk) == 4);
    }
    SUBCASE("3x3: first interior intersection") {
        GridCity city = perturb::generate_grid_city({3, 3, 100.0, 6.0});
        CHECK(city.roads.node_count() == 9);
        CHECK(city.roads.edge_count() == 12);
        // 4 blocks x 4 corners + 5 crossing centers (corner intersections
        // touch only one block and get none).
        CHECK(city.walkways.node_count() == 21);
        CHECK(count_class(city.walkways, EdgeClass::Sidewalk) == 16);
        // 1 interior intersection x 4 spokes + 4 edge intersections x 2.
        CHECK(count_class(city.walkways, EdgeClass::Crossing) == 12);
        CHECK(city.walkways.edge_count() == 28);
    }
    SUBCASE("6x6: the evaluation workhorse") {
        GridCity city = perturb::generate_grid_city({6, 6, 100.0, 6.0});
        CHECK(city.roads.node_count() == 36);
        CHECK(city.roads.edge_count() == 60);
        CHECK(city.walkways.node_count() == 132);  // 25*4 rect + 32 centers
        CHECK(count_class(city.walkways, EdgeClass::Sidewalk) == 100);
        CHECK(count_class(city.walkways, EdgeClass::Crossing) == 96);
        CHECK(city.walkways.edge_count() == 196);
    }
    SUBCASE("rectangular grids work too") {
        GridCity city = perturb::generate_grid_city({2, 5, 80.0, 5.0});
        CHECK(city.roads.node_count() == 10);
        CHECK(city.roads.edge_count() == 13);  // 5 verticals + 2x4 horizontals
        // 4 blocks; the 6 non-corner intersections each touch two blocks.
        CHECK(city.walkways.node_count() == 16 + 6);
        CHECK(count_class(city.walkways, EdgeClass::Crossing) == 12);
    }
}

TEST_CASE("grid city geometry respects block and offset") {
    GridCity city = perturb::generate_grid_city({2, 2, 100.0, 6.0});
    // The single sidewalk rectangle is inset 6 m from the street square.
    geom::BBox box = city.walkways.bbox();
    CHECK(box.lo.x == doctest::Approx(6.0));
    CHECK(box.lo.y == doctest::Approx(6.0));
    CHECK(box.hi.x == doctest::Approx(94.0));
    CHECK(box.hi.y == doctest::Approx(94.0));

    GridCity big = perturb::generate_grid_city({3, 3, 100.0, 6.0});
    // Crossing spokes run from a rectangle corner to the street corner.
    for (const auto& e : big.walkways.edges) {
        if (e.cls != EdgeClass::Crossing) continue;
        double len = graph::SpatialGraph::polyline_length(e.polyline);
        CHECK(len == doctest::Approx(6.0 * std::sqrt(2.0)));
    }
}

TEST_CASE("grid city rejects invalid specs") {
    CHECK_THROWS_AS(perturb::generate_grid_city({1, 3, 100.0, 6.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(perturb::generate_grid_city({3, 1, 100.0, 6.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(perturb::generate_grid_city({3, 3, 100.0, 0.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(perturb::generate_grid_city({3, 3, 100.0, 50.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(perturb::generate_grid_city({3, 3, -5.0, 1.0}),
                    std::invalid_argument);
}

// ============================================================================
// Random source
// ============================================================================

TEST_CASE("splitmix64 streams are deterministic and roughly standard") {
    perturb::SplitMix64 a(123);
    perturb::SplitMix64 b(123);
    perturb::SplitMix64 c(124);
    bool all_equal = true;
    bool any_diff = false;
    for (int i = 0; i < 64; ++i) {
        std::uint64_t x = a.next();
        all_equal = all_equal && (x == b.next());
        any_diff = any_diff || (x != c.next());
    }
    CHECK(all_equal);
    CHECK(any_diff);

    perturb::SplitMix64 u(987);
    double mean = 0.0;
    for (int i = 0; i < 20000; ++i) {
        double x = u.uniform();
        CHECK(x >= 0.0);
        CHECK(x < 1.0);
        mean += x;
    }
    CHECK(mean / 20000 == doctest::Approx(0.5).epsilon(0.02));

    perturb::SplitMix64 gsrc(555);
    double gm = 0.0, gv = 0.0;
    const int n = 20000;
    std::vector<double> xs(n);
    for (int i = 0; i < n; ++i) {
        xs[i] = gsrc.gaussian();
        gm += xs[i];
    }
    gm /= n;
    for (double x : xs) gv += (x - gm) * (x - gm);
    gv /= n;
    CHECK(gm == doctest::Approx(0.0).scale(1).epsilon(0.05));
    CHECK(gv == doctest::Approx(1.0).epsilon(0.1));
}

// ============================================================================
// Edge dropping
// ============================================================================

TEST_CASE("drop_edges removes the right edges deterministically") {
    GridCity city = perturb::generate_grid_city({6, 6, 100.0, 6.0});
    const std::size_t crossings = count_class(city.walkways, EdgeClass::Crossing);
    const std::size_t sidewalks = count_class(city.walkways, EdgeClass::Sidewalk);

    SUBCASE("p = 0 is the identity") {
        graph::SpatialGraph g = perturb::drop_edges(city.walkways, 0.0, 99);
        CHECK(same_graph(g, city.walkways));
    }
    SUBCASE("p = 1 with a class filter removes exactly that class") {
        graph::SpatialGraph g =
            perturb::drop_edges(city.walkways, 1.0, 99, EdgeClass::Crossing);
        CHECK(g.node_count() == city.walkways.node_count());  // nodes retained
        CHECK(count_class(g, EdgeClass::Crossing) == 0);
        CHECK(count_class(g, EdgeClass::Sidewalk) == sidewalks);
    }
    SUBCASE("same seed, same result; different seed, different result") {
        auto g1 = perturb::drop_edges(city.walkways, 0.5, 1234, EdgeClass::Crossing);
        auto g2 = perturb::drop_edges(city.walkways, 0.5, 1234, EdgeClass::Crossing);
        auto g3 = perturb::drop_edges(city.walkways, 0.5, 4321, EdgeClass::Crossing);
        CHECK(same_graph(g1, g2));
        CHECK_FALSE(same_graph(g1, g3));
    }
    SUBCASE("drop count is plausible for the probability") {
        // Bin(96, 0.5): five sigma is ~24.5 either way.
        auto g = perturb::drop_edges(city.walkways, 0.5, 77, EdgeClass::Crossing);
        std::size_t left = count_class(g, EdgeClass::Crossing);
        CHECK(left > crossings / 2 - 25);
        CHECK(left < crossings / 2 + 25);
    }
    SUBCASE("invalid probability is rejected") {
        CHECK_THROWS_AS(perturb::drop_edges(city.walkways, -0.1, 1),
                        std::invalid_argument);
        CHECK_THROWS_AS(perturb::drop_edges(city.walkways, 1.5, 1),
                        std::invalid_argument);
    }
}

// ============================================================================
// Node jitter
// ============================================================================

TEST_CASE("jitter_nodes displaces nodes boundedly and keeps structure") {
    GridCity city = perturb::generate_grid_city({4, 4, 100.0, 6.0});
    const double sigma = 2.0;
    graph::SpatialGraph g = perturb::jitter_nodes(city.walkways, sigma, 31337);

    REQUIRE(g.node_count() == city.walkways.node_count());
    REQUIRE(g.edge_count() == city.walkways.edge_count());

    double max_d = 0.0;
    bool moved = false;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        double dx = std::abs(g.nodes[i].x - city.walkways.nodes[i].x);
        double dy = std::abs(g.nodes[i].y - city.walkways.nodes[i].y);
        max_d = std::max({max_d, dx, dy});
        moved = moved || dx > 0 || dy > 0;
    }
    CHECK(moved);
    CHECK(max_d <= 3.0 * sigma + 1e-12);  // per-axis clamp

    // Edge endpoints follow their nodes.
    for (const auto& e : g.edges) {
        CHECK(geom::distance(e.polyline.front(), g.nodes[e.u]) < 1e-12);
        CHECK(geom::distance(e.polyline.back(), g.nodes[e.v]) < 1e-12);
    }

    SUBCASE("sigma = 0 is the identity") {
        CHECK(same_graph(perturb::jitter_nodes(city.walkways, 0.0, 5),
                         city.walkways));
    }
    SUBCASE("negative sigma is rejected") {
        CHECK_THROWS_AS(perturb::jitter_nodes(city.walkways, -1.0, 5),
                        std::invalid_argument);
    }
}

// ============================================================================
// Edge fragmentation
// ============================================================================

TEST_CASE("fragment_edges splits selected edges around a centered gap") {
    GridCity city = perturb::generate_grid_city({3, 3, 100.0, 6.0});
    const std::size_t n0 = city.walkways.node_count();
    const std::size_t e0 = city.walkways.edge_count();

    SUBCASE("p = 1 splits every splittable edge in two") {
        graph::SpatialGraph g =
            perturb::fragment_edges(city.walkways, 1.0, 0.2, 42);
        // Every edge is long enough here (>= 8.49 m): each gains one edge
        // and two nodes.
        CHECK(g.edge_count() == 2 * e0);
        CHECK(g.node_count() == n0 + 2 * e0);
        // Total length shrinks to 80% of the original.
        double before = 0.0, after = 0.0;
        for (const auto& e : city.walkways.edges)
            before += graph::SpatialGraph::polyline_length(e.polyline);
        for (const auto& e : g.edges)
            after += graph::SpatialGraph::polyline_length(e.polyline);
        CHECK(after == doctest::Approx(0.8 * before).epsilon(1e-9));
    }
    SUBCASE("p = 0 is the identity") {
        CHECK(same_graph(perturb::fragment_edges(city.walkways, 0.0, 0.2, 42),
                         city.walkways));
    }
    SUBCASE("edges too short to split are removed outright") {
        graph::GraphBuilder b(1e-9);
        auto u = b.add_node({0, 0});
        auto v = b.add_node({1, 0});  // pieces would be 0.4 m < 0.5 m floor
        auto w = b.add_node({21, 0});
        b.add_edge(u, v, {}, EdgeClass::Other);
        b.add_edge(v, w, {}, EdgeClass::Other);
        graph::SpatialGraph g = perturb::fragment_edges(b.take(), 1.0, 0.2, 7);
        CHECK(g.edge_count() == 2);  // long edge split, short edge gone
        double total = 0.0;
        for (const auto& e : g.edges)
            total += graph::SpatialGraph::polyline_length(e.polyline);
        CHECK(total == doctest::Approx(16.0));  // 80% of the 20 m edge
    }
    SUBCASE("parameters are validated") {
        CHECK_THROWS_AS(perturb::fragment_edges(city.walkways, 0.5, 1.5, 1),
                        std::invalid_argument);
        CHECK_THROWS_AS(perturb::fragment_edges(city.walkways, -1.0, 0.2, 1),
                        std::invalid_argument);
    }
}
