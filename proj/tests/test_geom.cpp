#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "routeval/geom.hpp"
#include "routeval/spatial_index.hpp"

using namespace routeval;
using geom::Point2D;

namespace {

geom::Polygon unit_square() {
    return geom::Polygon({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
}

geom::Polygon square10() {
    return geom::Polygon({{0, 0}, {10, 0}, {10, 10}, {0, 10}});
}

}  // namespace

// ============================================================================
// Projection
// ============================================================================

TEST_CASE("equirectangular projection matches spherical arc lengths") {
    geom::LocalProjection proj(10.0, 45.0);

    SUBCASE("origin maps to the plane origin and back") {
        Point2D p = proj.project({10.0, 45.0});
        CHECK(p.x == 0.0);
        CHECK(p.y == 0.0);
        geom::LonLat ll = proj.unproject({1234.5, -987.25});
        Point2D back = proj.project(ll);
        CHECK(back.x == doctest::Approx(1234.5).epsilon(1e-12));
        CHECK(back.y == doctest::Approx(-987.25).epsilon(1e-12));
    }

    SUBCASE("one degree of latitude is ~111.195 km everywhere") {
        Point2D p = proj.project({10.0, 46.0});
        CHECK(p.x == doctest::Approx(0.0).scale(1));
        CHECK(p.y == doctest::Approx(111194.9266).epsilon(1e-8));
    }

    SUBCASE("one degree of longitude shrinks with cos(latitude)") {
        geom::LocalProjection at60(0.0, 60.0);
        Point2D p = at60.project({1.0, 60.0});
        CHECK(p.x == doctest::Approx(111194.9266 * 0.5).epsilon(1e-6));
        CHECK(p.y == doctest::Approx(0.0).scale(1));
    }

    SUBCASE("poles and bad values are rejected") {
        CHECK_THROWS_AS(geom::LocalProjection(0.0, 90.0), std::invalid_argument);
        CHECK_THROWS_AS(geom::LocalProjection(0.0, -95.0), std::invalid_argument);
        double nan = std::nan("");
        CHECK_THROWS_AS(proj.project({nan, 0.0}), std::invalid_argument);
    }
}

// ============================================================================
// Segments
// ============================================================================

TEST_CASE("segment construction validates endpoints") {
    CHECK_THROWS_AS(geom::Segment({1, 1}, {1, 1}), std::invalid_argument);
    double inf = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(geom::Segment({0, 0}, {inf, 1}), std::invalid_argument);
    geom::Segment s({0, 0}, {3, 4});
    CHECK(s.length() == doctest::Approx(5.0));
}

TEST_CASE("segment intersection cases") {
    SUBCASE("proper crossing") {
        auto pts = geom::segment_intersections({{0, 0}, {2, 2}}, {{0, 2}, {2, 0}});
        REQUIRE(pts.size() == 1);
        CHECK(pts[0].x == doctest::Approx(1.0));
        CHECK(pts[0].y == doctest::Approx(1.0));
    }
    SUBCASE("disjoint parallel segments") {
        auto pts = geom::segment_intersections({{0, 0}, {1, 0}}, {{0, 1}, {1, 1}});
        CHECK(pts.empty());
    }
    SUBCASE("near miss past an endpoint") {
        auto pts = geom::segment_intersections({{0, 0}, {1, 0}}, {{2, -1}, {2, 1}});
        CHECK(pts.empty());
    }
    SUBCASE("endpoint touching counts once") {
        auto pts = geom::segment_intersections({{0, 0}, {1, 1}}, {{1, 1}, {2, 0}});
        REQUIRE(pts.size() == 1);
        CHECK(pts[0].x == doctest::Approx(1.0));
        CHECK(pts[0].y == doctest::Approx(1.0));
    }
    SUBCASE("collinear overlap returns the shared interval") {
        auto pts = geom::segment_intersections({{0, 0}, {4, 0}}, {{2, 0}, {6, 0}});
        REQUIRE(pts.size() == 2);
        CHECK(pts[0].x == doctest::Approx(2.0));
        CHECK(pts[1].x == doctest::Approx(4.0));
    }
    SUBCASE("collinear containment returns the inner endpoints") {
        auto pts = geom::segment_intersections({{0, 0}, {10, 0}}, {{3, 0}, {7, 0}});
        REQUIRE(pts.size() == 2);
        CHECK(pts[0].x == doctest::Approx(3.0));
        CHECK(pts[1].x == doctest::Approx(7.0));
    }
    SUBCASE("collinear but disjoint") {
        auto pts = geom::segment_intersections({{0, 0}, {1, 0}}, {{2, 0}, {3, 0}});
        CHECK(pts.empty());
    }
    SUBCASE("symmetric in argument order") {
        auto a = geom::segment_intersections({{0, 0}, {2, 2}}, {{0, 2}, {2, 0}});
        auto b = geom::segment_intersections({{0, 2}, {2, 0}}, {{0, 0}, {2, 2}});
        REQUIRE(a.size() == b.size());
        CHECK(geom::distance(a[0], b[0]) < 1e-12);
    }
}

TEST_CASE("point and segment distances against hand values") {
    CHECK(geom::distance_point_segment({0, 1}, {-1, 0}, {1, 0}) == doctest::Approx(1.0));
    CHECK(geom::distance_point_segment({5, 1}, {-1, 0}, {1, 0}) ==
          doctest::Approx(std::sqrt(17.0)));
    CHECK(geom::distance_segment_segment({0, 0}, {1, 0}, {0, 1}, {1, 1}) ==
          doctest::Approx(1.0));
    // Crossing segments touch.
    CHECK(geom::distance_segment_segment({0, 0}, {2, 2}, {0, 2}, {2, 0}) ==
          doctest::Approx(0.0));
    // Closest approach between endpoint and interior.
    CHECK(geom::distance_segment_segment({0, 0}, {4, 0}, {2, 3}, {2, 5}) ==
          doctest::Approx(3.0));
}

// ============================================================================
// Polygon
// ============================================================================

TEST_CASE("polygon normalization and measures") {
    SUBCASE("clockwise input is reoriented, area is positive") {
        geom::Polygon g({{0, 0}, {0, 1}, {1, 1}, {1, 0}});  // CW ring
        CHECK(g.area() == doctest::Approx(1.0));
        Point2D c = g.centroid();
        CHECK(c.x == doctest::Approx(0.5));
        CHECK(c.y == doctest::Approx(0.5));
    }
    SUBCASE("repeated closing vertex is stripped") {
        geom::Polygon g({{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0, 0}});
        CHECK(g.size() == 4);
    }
    SUBCASE("degenerate rings are rejected") {
        CHECK_THROWS_AS(geom::Polygon({{0, 0}, {1, 0}}), std::invalid_argument);
        CHECK_THROWS_AS(geom::Polygon({{0, 0}, {1, 0}, {2, 0}}), std::invalid_argument);
        CHECK_THROWS_AS(geom::Polygon({{0, 0}, {0, 0}, {0, 0}, {1, 1}}),
                        std::invalid_argument);
    }
    SUBCASE("triangle area") {
        geom::Polygon t({{0, 0}, {4, 0}, {0, 3}});
        CHECK(t.area() == doctest::Approx(6.0));
    }
}

TEST_CASE("point location against a square") {
    geom::Polygon g = unit_square();
    CHECK(geom::locate_point({0.5, 0.5}, g) == geom::PointLocation::Inside);
    CHECK(geom::locate_point({2.0, 0.5}, g) == geom::PointLocation::Outside);
    CHECK(geom::locate_point({-0.1, 0.5}, g) == geom::PointLocation::Outside);
    CHECK(geom::locate_point({0.5, 0.0}, g) == geom::PointLocation::OnBoundary);
    CHECK(geom::locate_point({1.0, 1.0}, g) == geom::PointLocation::OnBoundary);
    // Just outside the boundary band.
    CHECK(geom::locate_point({0.5, -1e-3}, g) == geom::PointLocation::Outside);
}

TEST_CASE("nearest side resolves vertices to the lower adjacent side") {
    geom::Polygon g = unit_square();
    // Interior of each side.
    CHECK(geom::nearest_side({0.5, 0.0}, g) == 0);
    CHECK(geom::nearest_side({1.0, 0.5}, g) == 1);
    CHECK(geom::nearest_side({0.5, 1.0}, g) == 2);
    CHECK(geom::nearest_side({0.0, 0.5}, g) == 3);
    // Vertex i belongs to side i-1 (vertex 0 to side 0).
    CHECK(geom::nearest_side({0.0, 0.0}, g) == 0);
    CHECK(geom::nearest_side({1.0, 0.0}, g) == 0);
    CHECK(geom::nearest_side({1.0, 1.0}, g) == 1);
    CHECK(geom::nearest_side({0.0, 1.0}, g) == 2);
}

// ============================================================================
// Hulls
// ============================================================================

TEST_CASE("convex hull of small point sets") {
    SUBCASE("square cloud with interior points") {
        auto hull = geom::convex_hull(
            {{0, 0}, {2, 0}, {2, 2}, {0, 2}, {1, 1}, {0.5, 0.7}});
        CHECK(hull.size() == 4);
        geom::Polygon g(hull);
        CHECK(g.area() == doctest::Approx(4.0));
    }
    SUBCASE("collinear points collapse to the two extremes") {
        auto hull = geom::convex_hull({{0, 0}, {1, 0}, {2, 0}, {3, 0}});
        CHECK(hull.size() == 2);
    }
}

TEST_CASE("dilated hull keeps clearance around every input point") {
    std::vector<Point2D> pts = {{0, 0}, {100, 0}, {100, 80}, {0, 80}, {50, 40}};
    double r = 50.0;
    geom::Polygon g = geom::dilated_hull(pts, r);

    for (const Point2D& p : pts) {
        CHECK(geom::locate_point(p, g) == geom::PointLocation::Inside);
        double closest = 1e300;
        for (std::size_t i = 0; i < g.size(); ++i) {
            geom::Segment s = g.side(i);
            closest = std::min(closest, geom::distance_point_segment(p, s.a, s.b));
        }
        CHECK(closest >= r - 1e-6);
    }

    SUBCASE("single point dilates to a polygon containing its disc") {
        geom::Polygon disc = geom::dilated_hull({{5, 5}}, 10.0);
        CHECK(disc.area() > 3.14159 * 100.0 * 0.99);
        for (int k = 0; k < 16; ++k) {
            double a = 2.0 * 3.14159265358979 * k / 16;
            Point2D q{5 + 9.999 * std::cos(a), 5 + 9.999 * std::sin(a)};
            CHECK(geom::locate_point(q, disc) != geom::PointLocation::Outside);
        }
    }
}

// ============================================================================
// Voronoi
// ============================================================================

TEST_CASE("voronoi cells partition the region") {
    geom::Polygon region = square10();

    SUBCASE("two seeds split the square at the bisector") {
        geom::VoronoiResult vr = geom::voronoi_cells({{2.5, 5}, {7.5, 5}}, region);
        REQUIRE(vr.cells.size() == 2);
        CHECK(vr.cells[0].area() + vr.cells[1].area() == doctest::Approx(100.0));
        CHECK(vr.cells[0].area() == doctest::Approx(50.0));
        // Each cell contains its own seed.
        CHECK(geom::locate_point({2.5, 5}, vr.cells[0]) == geom::PointLocation::Inside);
        CHECK(geom::locate_point({7.5, 5}, vr.cells[1]) == geom::PointLocation::Inside);
    }

    SUBCASE("single seed owns the whole region") {
        geom::VoronoiResult vr = geom::voronoi_cells({{3, 3}}, region);
        REQUIRE(vr.cells.size() == 1);
        CHECK(vr.cells[0].area() == doctest::Approx(100.0));
    }

    SUBCASE("duplicate seeds are merged and counted") {
        geom::VoronoiResult vr =
            geom::voronoi_cells({{2, 2}, {2, 2}, {8, 8}}, region);
        CHECK(vr.cells.size() == 2);
        CHECK(vr.duplicates_merged == 1);
    }

    SUBCASE("seed far outside the region produces no cell") {
        geom::VoronoiResult vr = geom::voronoi_cells({{5, 5}, {500, 500}}, region);
        REQUIRE(vr.cells.size() == 1);
        CHECK(vr.seed_index[0] == 0);
        CHECK(vr.cells[0].area() == doctest::Approx(100.0));
    }

    SUBCASE("empty seed list is rejected") {
        CHECK_THROWS_AS(geom::voronoi_cells({}, region), std::invalid_argument);
    }

    SUBCASE("random seeds: areas add up and sampled points are closest to their seed") {
        std::mt19937 rng(7);
        std::uniform_real_distribution<double> u(0.5, 9.5);
        std::vector<Point2D> seeds;
        for (int i = 0; i < 12; ++i) seeds.push_back({u(rng), u(rng)});
        geom::VoronoiResult vr = geom::voronoi_cells(seeds, region);
        double total = 0.0;
        for (const auto& c : vr.cells) total += c.area();
        CHECK(total == doctest::Approx(100.0).epsilon(1e-9));
        for (std::size_t k = 0; k < vr.cells.size(); ++k) {
            Point2D c = vr.cells[k].centroid();
            double own = geom::distance2(c, seeds[vr.seed_index[k]]);
            for (std::size_t j = 0; j < seeds.size(); ++j)
                CHECK(own <= geom::distance2(c, seeds[j]) + 1e-9);
        }
    }
}

// ============================================================================
// Spatial index
// ============================================================================

TEST_CASE("grid index returns every overlapping box") {
    geom::GridIndex index(10.0);
    std::vector<geom::BBox> boxes;
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> u(-50.0, 50.0);
    for (std::uint32_t i = 0; i < 200; ++i) {
        Point2D a{u(rng), u(rng)};
        Point2D b{a.x + std::abs(u(rng)) * 0.2, a.y + std::abs(u(rng)) * 0.2};
        geom::BBox box{a, b};
        boxes.push_back(box);
        index.insert(i, box);
    }
    for (int q = 0; q < 50; ++q) {
        Point2D a{u(rng), u(rng)};
        Point2D b{a.x + 8.0, a.y + 8.0};
        geom::BBox query{a, b};
        auto got = index.query(query);
        CHECK(std::is_sorted(got.begin(), got.end()));
        CHECK(std::adjacent_find(got.begin(), got.end()) == got.end());
        for (std::uint32_t i = 0; i < boxes.size(); ++i) {
            bool overlaps = boxes[i].intersects(query);
            bool reported = std::binary_search(got.begin(), got.end(), i);
            if (overlaps) CHECK(reported);  // may over-report, must never miss
        }
    }
}
