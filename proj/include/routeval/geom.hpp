// Planar geometry primitives used across the library: points, segments,
// simple polygons, a local equirectangular projection, and the Voronoi
// tessellation that underlies intersection-polygon partitioning.
//
// All coordinates are metric (meters in a local tangent frame) unless a
// function explicitly deals in longitude/latitude degrees.

#pragma once

#include <cstddef>
#include <vector>

namespace routeval::geom {

// Tolerance for coincidence tests on metric coordinates, in meters.
inline constexpr double kGeomEps = 1e-9;

// Two seed points closer than this are considered duplicates, in meters.
inline constexpr double kSeedEps = 0.5;

// Mean Earth radius used by the local projection, in meters.
inline constexpr double kEarthRadiusM = 6'371'000.0;

// ============================================================================
// Point2D
// ============================================================================

struct Point2D {
    double x = 0.0;
    double y = 0.0;

    Point2D operator+(const Point2D& o) const { return {x + o.x, y + o.y}; }
    Point2D operator-(const Point2D& o) const { return {x - o.x, y - o.y}; }
    Point2D operator*(double s) const { return {x * s, y * s}; }

    bool operator==(const Point2D& o) const { return x == o.x && y == o.y; }
};

double dot(const Point2D& a, const Point2D& b);
double cross(const Point2D& a, const Point2D& b);
double norm(const Point2D& a);
double norm2(const Point2D& a);
double distance(const Point2D& a, const Point2D& b);
double distance2(const Point2D& a, const Point2D& b);

bool almost_equal(const Point2D& a, const Point2D& b, double eps = kGeomEps);

// ============================================================================
// BBox
// ============================================================================

struct BBox {
    Point2D lo{1e300, 1e300};
    Point2D hi{-1e300, -1e300};

    void expand(const Point2D& p);
    void expand(const BBox& b);
    void dilate(double r);
    bool valid() const { return lo.x <= hi.x && lo.y <= hi.y; }
    bool contains(const Point2D& p) const;
    bool intersects(const BBox& b) const;
    // Squared distance between the two boxes (0 if they intersect).
    double distance2(const BBox& b) const;
};

// ============================================================================
// Segment
// ============================================================================

// A directed segment with distinct, finite endpoints.  Construction throws
/// std::invalid_argument when the endpoints coincide (within kGeomEps) or are
// not finite.
struct Segment {
    Point2D a;
    Point2D b;

    Segment(const Point2D& a_, const Point2D& b_);

    double length() const { return distance(a, b); }
};

// Distance from point p to the closed segment [a, b].
double distance_point_segment(const Point2D& p, const Point2D& a, const Point2D& b);

// Minimum distance between two closed segments.
double distance_segment_segment(const Point2D& a, const Point2D& b,
                                const Point2D& c, const Point2D& d);

// Intersection points of two segments.  Returns 0, 1, or 2 points; two points
// are returned only when the segments are collinear and overlap in more than
// a single point, in which case the endpoints of the shared interval are
// returned (ordered along the first segment).  Endpoint touching counts as an
// intersection.  The result is symmetric in the argument order.
std::vector<Point2D> segment_intersections(const Segment& s, const Segment& t,
                                           double eps = kGeomEps);

// ============================================================================
// Polygon
// ============================================================================

enum class PointLocation { Inside, OnBoundary, Outside };

// A simple polygon stored as a counterclockwise ring without a repeated
// closing vertex.  Boundary side i runs from vertex i to vertex (i+1) mod n.
//
// Construction normalizes orientation, strips consecutive duplicate vertices
// (and a repeated closing vertex), and throws std::invalid_argument for rings
// with fewer than three distinct vertices, non-finite coordinates, vanishing
// area, or properly self-intersecting sides.
class Polygon {
  public:
    explicit Polygon(std::vector<Point2D> ring);

    const std::vector<Point2D>& ring() const { return ring_; }
    std::size_t size() const { return ring_.size(); }
    const Point2D& vertex(std::size_t i) const { return ring_[i]; }

    // Side i = vertex i -> vertex (i+1) mod n.
    Segment side(std::size_t i) const;

    double area() const { return area_; }
    Point2D centroid() const;
    const BBox& bbox() const { return bbox_; }

  private:
    std::vector<Point2D> ring_;
    double area_ = 0.0;
    BBox bbox_;
};

// Even-odd point location with an explicit boundary band of width eps.
// Points on the boundary are reported as OnBoundary; callers that follow the
// closed-polygon convention treat that as inside.
PointLocation locate_point(const Point2D& p, const Polygon& g, double eps = kGeomEps);

// Index of the polygon side nearest to p, with ties resolved toward the
// lower index.  Points within eps of a polygon vertex are assigned the
// lower-indexed of the two adjacent sides (with the wrap pair {n-1, 0}
// resolving to 0).  Used to bucket boundary crossings deterministically.
std::size_t nearest_side(const Point2D& p, const Polygon& g, double eps = kGeomEps);

// ============================================================================
// LocalProjection
// ============================================================================

struct LonLat {
    double lon = 0.0;
    double lat = 0.0;
};

// Equirectangular projection around a fixed origin: exact enough over
// city-scale extents, exactly invertible, and cheap.  x grows east, y grows
// north, both in meters.  Throws std::invalid_argument for non-finite input
// or |origin latitude| >= 90.
class LocalProjection {
  public:
    LocalProjection(double origin_lon, double origin_lat);

    Point2D project(const LonLat& ll) const;
    LonLat unproject(const Point2D& p) const;

    double origin_lon() const { return origin_lon_; }
    double origin_lat() const { return origin_lat_; }

  private:
    double origin_lon_;
    double origin_lat_;
    double cos_lat0_;
};

// ============================================================================
// Voronoi tessellation
// ============================================================================

struct VoronoiResult {
    // cells[k] is the Voronoi cell of seeds[seed_index[k]] clipped to the
    // region; kept in input seed order.
    std::vector<Polygon> cells;
    std::vector<std::size_t> seed_index;
    // Number of input seeds discarded as duplicates (closer than kSeedEps to
    // an earlier seed).
    std::size_t duplicates_merged = 0;
};

// Clipped Voronoi diagram by per-seed half-plane intersection.  Each seed's
// cell starts from the region ring and is cut by the perpendicular bisector
// against every other seed; candidate seeds are visited in order of distance
// so the loop can stop as soon as no remaining bisector can reach the cell.
// Worst case O(n^2 log n) overall, near linear for evenly spread seeds; a
// sweep-line construction could replace this without changing the interface.
//
// Throws std::invalid_argument when seeds is empty.  Seeds whose clipped cell
// is empty (for example seeds outside the region) are dropped.
VoronoiResult voronoi_cells(const std::vector<Point2D>& seeds, const Polygon& region);

// ============================================================================
// Convex hull helpers
// ============================================================================

// Monotone-chain convex hull; returns a CCW ring without the closing vertex.
// Collinear input yields a degenerate (possibly empty) ring.
std::vector<Point2D> convex_hull(std::vector<Point2D> points);

// Convex region containing every input point with clearance at least r:
// the hull of the points' circumscribed octagons.  Throws
// std::invalid_argument when points is empty or r <= 0.
Polygon dilated_hull(const std::vector<Point2D>& points, double r);

}  // namespace routeval::geom
