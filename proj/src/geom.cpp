#include "routeval/geom.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>

namespace routeval::geom {

namespace {

bool finite(const Point2D& p) { return std::isfinite(p.x) && std::isfinite(p.y); }

}  // namespace

// ============================================================================
// Point2D / BBox
// ============================================================================

double dot(const Point2D& a, const Point2D& b) { return a.x * b.x + a.y * b.y; }
double cross(const Point2D& a, const Point2D& b) { return a.x * b.y - a.y * b.x; }
double norm2(const Point2D& a) { return a.x * a.x + a.y * a.y; }
double norm(const Point2D& a) { return std::sqrt(norm2(a)); }
double distance2(const Point2D& a, const Point2D& b) { return norm2(b - a); }
double distance(const Point2D& a, const Point2D& b) { return std::sqrt(distance2(a, b)); }

bool almost_equal(const Point2D& a, const Point2D& b, double eps) {
    return distance2(a, b) <= eps * eps;
}

void BBox::expand(const Point2D& p) {
    lo.x = std::min(lo.x, p.x);
    lo.y = std::min(lo.y, p.y);
    hi.x = std::max(hi.x, p.x);
    hi.y = std::max(hi.y, p.y);
}

void BBox::expand(const BBox& b) {
    expand(b.lo);
    expand(b.hi);
}

void BBox::dilate(double r) {
    lo.x -= r;
    lo.y -= r;
    hi.x += r;
    hi.y += r;
}

bool BBox::contains(const Point2D& p) const {
    return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y;
}

bool BBox::intersects(const BBox& b) const {
    return lo.x <= b.hi.x && b.lo.x <= hi.x && lo.y <= b.hi.y && b.lo.y <= hi.y;
}

double BBox::distance2(const BBox& b) const {
    double dx = std::max({0.0, b.lo.x - hi.x, lo.x - b.hi.x});
    double dy = std::max({0.0, b.lo.y - hi.y, lo.y - b.hi.y});
    return dx * dx + dy * dy;
}

// ============================================================================
// Segment
// ============================================================================

Segment::Segment(const Point2D& a_, const Point2D& b_) : a(a_), b(b_) {
    if (!finite(a) || !finite(b))
        throw std::invalid_argument("Segment: non-finite endpoint");
    if (almost_equal(a, b))
        throw std::invalid_argument("Segment: endpoints coincide");
}

double distance_point_segment(const Point2D& p, const Point2D& a, const Point2D& b) {
    Point2D ab = b - a;
    double len2 = norm2(ab);
    if (len2 <= 0.0) return distance(p, a);
    double t = dot(p - a, ab) / len2;
    t = std::clamp(t, 0.0, 1.0);
    return distance(p, a + ab * t);
}

double distance_segment_segment(const Point2D& a, const Point2D& b,
                                const Point2D& c, const Point2D& d) {
    // Proper crossing => distance zero.
    double d1 = cross(b - a, c - a);
    double d2 = cross(b - a, d - a);
    double d3 = cross(d - c, a - c);
    double d4 = cross(d - c, b - c);
    if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
        ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
        return 0.0;
    return std::min(std::min(distance_point_segment(c, a, b), distance_point_segment(d, a, b)),
                    std::min(distance_point_segment(a, c, d), distance_point_segment(b, c, d)));
}

namespace {

// Snap a computed intersection point onto a nearby segment endpoint so that
// crossings through shared vertices come out exact.
Point2D snap_to_endpoints(Point2D p, const Segment& s, const Segment& t, double eps) {
    for (const Point2D* q : {&s.a, &s.b, &t.a, &t.b}) {
        if (almost_equal(p, *q, eps)) return *q;
    }
    return p;
}

bool point_less(const Point2D& a, const Point2D& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
}

// Canonical key so that the result is independent of argument order.
std::pair<Point2D, Point2D> segment_key(const Segment& s) {
    return point_less(s.a, s.b) ? std::make_pair(s.a, s.b) : std::make_pair(s.b, s.a);
}

}  // namespace

std::vector<Point2D> segment_intersections(const Segment& s, const Segment& t, double eps) {
    // Order the two segments canonically: makes the computation (and its
    // floating-point noise) symmetric in the arguments.
    auto ks = segment_key(s);
    auto kt = segment_key(t);
    const bool swap = point_less(kt.first, ks.first) ||
                      (ks.first == kt.first && point_less(kt.second, ks.second));
    const Segment& u = swap ? t : s;
    const Segment& v = swap ? s : t;

    Point2D r = u.b - u.a;
    Point2D q = v.b - v.a;
    double rlen = norm(r);
    double qlen = norm(q);

    // Collinear case: both endpoints of v within eps of the line through u.
    double da = std::abs(cross(r, v.a - u.a)) / rlen;
    double db = std::abs(cross(r, v.b - u.a)) / rlen;
    if (da <= eps && db <= eps) {
        double t0 = dot(v.a - u.a, r) / (rlen * rlen);
        double t1 = dot(v.b - u.a, r) / (rlen * rlen);
        if (t0 > t1) std::swap(t0, t1);
        double lo = std::max(0.0, t0);
        double hi = std::min(1.0, t1);
        double eps_t = eps / rlen;
        if (hi < lo - eps_t) return {};
        Point2D pa = snap_to_endpoints(u.a + r * std::clamp(lo, 0.0, 1.0), u, v, eps);
        Point2D pb = snap_to_endpoints(u.a + r * std::clamp(hi, 0.0, 1.0), u, v, eps);
        if (almost_equal(pa, pb, eps)) return {pa};
        return {pa, pb};
    }

    double denom = cross(r, q);
    if (denom == 0.0) return {};  // parallel, not collinear

    Point2D w = v.a - u.a;
    double tu = cross(w, q) / denom;  // parameter along u
    double tv = cross(w, r) / denom;  // parameter along v
    double eps_u = eps / rlen;
    double eps_v = eps / qlen;
    if (!(tu >= -eps_u && tu <= 1.0 + eps_u)) return {};
    if (!(tv >= -eps_v && tv <= 1.0 + eps_v)) return {};
    Point2D p = u.a + r * std::clamp(tu, 0.0, 1.0);
    return {snap_to_endpoints(p, u, v, eps)};
}

// ============================================================================
// Polygon
// ============================================================================

namespace {

std::vector<Point2D> cleaned_ring(std::vector<Point2D> ring) {
    // Drop a repeated closing vertex and consecutive near-duplicates.
    std::vector<Point2D> out;
    out.reserve(ring.size());
    for (const Point2D& p : ring) {
        if (out.empty() || !almost_equal(out.back(), p)) out.push_back(p);
    }
    while (out.size() >= 2 && almost_equal(out.front(), out.back())) out.pop_back();
    return out;
}

double signed_area(const std::vector<Point2D>& ring) {
    double a = 0.0;
    for (std::size_t i = 0, n = ring.size(); i < n; ++i) {
        const Point2D& p = ring[i];
        const Point2D& q = ring[(i + 1) % n];
        a += cross(p, q);
    }
    return a / 2.0;
}

// Proper crossing test used for the simplicity check: interiors intersect
// transversally.  Touching (shared endpoints, collinear contact) is allowed.
bool properly_cross(const Point2D& a, const Point2D& b, const Point2D& c, const Point2D& d) {
    double d1 = cross(b - a, c - a);
    double d2 = cross(b - a, d - a);
    double d3 = cross(d - c, a - c);
    double d4 = cross(d - c, b - c);
    double sab = norm(b - a) * kGeomEps;
    double scd = norm(d - c) * kGeomEps;
    return ((d1 > sab && d2 < -sab) || (d1 < -sab && d2 > sab)) &&
           ((d3 > scd && d4 < -scd) || (d3 < -scd && d4 > scd));
}

}  // namespace

Polygon::Polygon(std::vector<Point2D> ring) : ring_(cleaned_ring(std::move(ring))) {
    if (ring_.size() < 3)
        throw std::invalid_argument("Polygon: fewer than 3 distinct vertices");
    for (const Point2D& p : ring_) {
        if (!finite(p)) throw std::invalid_argument("Polygon: non-finite vertex");
    }
    double a = signed_area(ring_);
    if (a == 0.0) throw std::invalid_argument("Polygon: zero area");
    if (a < 0.0) {
        std::reverse(ring_.begin(), ring_.end());
        a = -a;
    }
    area_ = a;
    const std::size_t n = ring_.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            // Skip side pairs sharing a vertex.
            if (j == i + 1 || (i == 0 && j == n - 1)) continue;
            if (properly_cross(ring_[i], ring_[(i + 1) % n], ring_[j], ring_[(j + 1) % n]))
                throw std::invalid_argument("Polygon: self-intersecting ring");
        }
    }
    for (const Point2D& p : ring_) bbox_.expand(p);
}

Segment Polygon::side(std::size_t i) const {
    return Segment(ring_[i], ring_[(i + 1) % ring_.size()]);
}

Point2D Polygon::centroid() const {
    double cx = 0.0, cy = 0.0;
    const std::size_t n = ring_.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point2D& p = ring_[i];
        const Point2D& q = ring_[(i + 1) % n];
        double w = cross(p, q);
        cx += (p.x + q.x) * w;
        cy += (p.y + q.y) * w;
    }
    return {cx / (6.0 * area_), cy / (6.0 * area_)};
}

PointLocation locate_point(const Point2D& p, const Polygon& g, double eps) {
    const auto& ring = g.ring();
    const std::size_t n = ring.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (distance_point_segment(p, ring[i], ring[(i + 1) % n]) <= eps)
            return PointLocation::OnBoundary;
    }
    // Even-odd crossing count; the half-open vertex rule keeps vertices from
    // being counted twice, and the boundary band above has already absorbed
    // the ambiguous cases.
    bool inside = false;
    for (std::size_t i = 0; i < n; ++i) {
        const Point2D& a = ring[i];
        const Point2D& b = ring[(i + 1) % n];
        if ((a.y > p.y) != (b.y > p.y)) {
            double xint = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if (p.x < xint) inside = !inside;
        }
    }
    return inside ? PointLocation::Inside : PointLocation::Outside;
}

std::size_t nearest_side(const Point2D& p, const Polygon& g, double eps) {
    const auto& ring = g.ring();
    const std::size_t n = ring.size();
    // Crossing at a vertex: assign the lower-indexed adjacent side; the wrap
    // pair {n-1, 0} resolves to 0.
    for (std::size_t i = 0; i < n; ++i) {
        if (almost_equal(p, ring[i], eps)) return i == 0 ? 0 : i - 1;
    }
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        double d = distance_point_segment(p, ring[i], ring[(i + 1) % n]);
        if (d < best_d - kGeomEps) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

// ============================================================================
// LocalProjection
// ============================================================================

namespace {
constexpr double kDegToRad = std::numbers::pi / 180.0;
}

LocalProjection::LocalProjection(double origin_lon, double origin_lat)
    : origin_lon_(origin_lon), origin_lat_(origin_lat) {
    if (!std::isfinite(origin_lon) || !std::isfinite(origin_lat))
        throw std::invalid_argument("LocalProjection: non-finite origin");
    if (std::abs(origin_lat) >= 90.0)
        throw std::invalid_argument("LocalProjection: |origin latitude| must be < 90");
    cos_lat0_ = std::cos(origin_lat * kDegToRad);
}

Point2D LocalProjection::project(const LonLat& ll) const {
    if (!std::isfinite(ll.lon) || !std::isfinite(ll.lat))
        throw std::invalid_argument("LocalProjection::project: non-finite coordinate");
    return {kEarthRadiusM * (ll.lon - origin_lon_) * kDegToRad * cos_lat0_,
            kEarthRadiusM * (ll.lat - origin_lat_) * kDegToRad};
}

LonLat LocalProjection::unproject(const Point2D& p) const {
    return {origin_lon_ + p.x / (kEarthRadiusM * kDegToRad * cos_lat0_),
            origin_lat_ + p.y / (kEarthRadiusM * kDegToRad)};
}

// ============================================================================
// Voronoi tessellation
// ============================================================================

namespace {

// Sutherland-Hodgman step against the half plane {p : (p - m) . d <= 0}.
std::vector<Point2D> clip_half_plane(const std::vector<Point2D>& ring,
                                     const Point2D& m, const Point2D& d) {
    std::vector<Point2D> out;
    out.reserve(ring.size() + 2);
    const std::size_t n = ring.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point2D& cur = ring[i];
        const Point2D& nxt = ring[(i + 1) % n];
        double fc = dot(cur - m, d);
        double fn = dot(nxt - m, d);
        bool cin = fc <= 0.0;
        bool nin = fn <= 0.0;
        if (cin) out.push_back(cur);
        if (cin != nin) {
            double t = fc / (fc - fn);
            out.push_back(cur + (nxt - cur) * t);
        }
    }
    // Remove duplicates introduced by vertices lying exactly on the line.
    std::vector<Point2D> dedup;
    dedup.reserve(out.size());
    for (const Point2D& p : out) {
        if (dedup.empty() || !almost_equal(dedup.back(), p, 1e-12)) dedup.push_back(p);
    }
    while (dedup.size() >= 2 && almost_equal(dedup.front(), dedup.back(), 1e-12))
        dedup.pop_back();
    return dedup;
}

double max_dist2_to(const std::vector<Point2D>& ring, const Point2D& s) {
    double m = 0.0;
    for (const Point2D& p : ring) m = std::max(m, distance2(p, s));
    return m;
}

}  // namespace

VoronoiResult voronoi_cells(const std::vector<Point2D>& seeds, const Polygon& region) {
    if (seeds.empty()) throw std::invalid_argument("voronoi_cells: no seeds");
    for (const Point2D& s : seeds) {
        if (!finite(s)) throw std::invalid_argument("voronoi_cells: non-finite seed");
    }

    // Deduplicate seeds closer than kSeedEps, keeping the earliest.
    std::vector<std::size_t> kept;
    kept.reserve(seeds.size());
    std::size_t merged = 0;
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        bool dup = false;
        for (std::size_t k : kept) {
            if (almost_equal(seeds[i], seeds[k], kSeedEps)) {
                dup = true;
                break;
            }
        }
        if (dup)
            ++merged;
        else
            kept.push_back(i);
    }

    VoronoiResult result;
    result.duplicates_merged = merged;

    // Distance-sorted candidate order, shared scratch across cells.
    std::vector<std::pair<double, std::size_t>> order(kept.size());

    for (std::size_t ci = 0; ci < kept.size(); ++ci) {
        const Point2D& site = seeds[kept[ci]];
        for (std::size_t j = 0; j < kept.size(); ++j)
            order[j] = {distance2(site, seeds[kept[j]]), j};
        std::sort(order.begin(), order.end());

        std::vector<Point2D> ring = region.ring();
        double reach2 = max_dist2_to(ring, site);
        for (const auto& [d2, j] : order) {
            if (j == ci || d2 == 0.0) continue;
            // A bisector at distance d/2 cannot cut a cell that already lies
            // within d/2 of the site; candidates are sorted, so stop.
            if (d2 >= 4.0 * reach2) break;
            const Point2D& other = seeds[kept[j]];
            ring = clip_half_plane(ring, (site + other) * 0.5, other - site);
            if (ring.size() < 3) break;
            reach2 = max_dist2_to(ring, site);
        }
        ring = cleaned_ring(std::move(ring));
        if (ring.size() < 3) continue;
        double a = std::abs(signed_area(ring));
        if (a <= 1e-12) continue;
        result.cells.emplace_back(std::move(ring));
        result.seed_index.push_back(kept[ci]);
    }
    return result;
}

// ============================================================================
// Convex hull helpers
// ============================================================================

std::vector<Point2D> convex_hull(std::vector<Point2D> points) {
    std::sort(points.begin(), points.end(), point_less);
    points.erase(std::unique(points.begin(), points.end()), points.end());
    const std::size_t n = points.size();
    if (n < 3) return points;
    std::vector<Point2D> h(2 * n);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {
        while (k >= 2 && cross(h[k - 1] - h[k - 2], points[i] - h[k - 2]) <= 0) --k;
        h[k++] = points[i];
    }
    for (std::size_t i = n - 1, t = k + 1; i-- > 0;) {
        while (k >= t && cross(h[k - 1] - h[k - 2], points[i] - h[k - 2]) <= 0) --k;
        h[k++] = points[i];
    }
    h.resize(k - 1);
    return h;
}

Polygon dilated_hull(const std::vector<Point2D>& points, double r) {
    if (points.empty()) throw std::invalid_argument("dilated_hull: no points");
    if (!(r > 0.0)) throw std::invalid_argument("dilated_hull: dilation must be positive");
    // Hull of each point's circumscribed octagon: convex, covers every input
    // point with clearance >= r, and tolerates collinear/single-point input.
    const double rr = r / std::cos(std::numbers::pi / 8.0);
    std::vector<Point2D> cloud;
    cloud.reserve(points.size() * 8);
    for (const Point2D& p : points) {
        for (int k = 0; k < 8; ++k) {
            double ang = (2.0 * k + 1.0) * std::numbers::pi / 8.0;
            cloud.push_back({p.x + rr * std::cos(ang), p.y + rr * std::sin(ang)});
        }
    }
    return Polygon(convex_hull(std::move(cloud)));
}

}  // namespace routeval::geom
