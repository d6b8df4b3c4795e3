#include "sharpcontour/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sharpcontour {

namespace {

constexpr double kVertexEps = 1e-9;

Point2 rotate_neg90(const Point2& v) { return Point2(v.y(), -v.x()); }

}  // namespace

double BBox::diagonal() const { return std::hypot(width(), height()); }

bool BBox::contains(const Point2& q) const {
    return q.x() >= min.x() && q.x() <= max.x() && q.y() >= min.y() && q.y() <= max.y();
}

void validate_polygon(const Polygon& p) {
    const int n = p.size();
    if (n < 3) {
        throw std::invalid_argument("polygon must have at least 3 vertices");
    }
    if (!p.vertices.allFinite()) {
        throw std::invalid_argument("polygon vertices must be finite");
    }
    for (int i = 0; i < n; ++i) {
        const Point2 a = p.vertex(i);
        const Point2 b = p.vertex((i + 1) % n);
        if ((b - a).norm() < kVertexEps) {
            throw std::invalid_argument("polygon has coincident consecutive vertices");
        }
    }
}

Polygon make_polygon(VertexList vertices) {
    Polygon p{std::move(vertices)};
    validate_polygon(p);
    return p;
}

double signed_area(const Polygon& p) {
    const int n = p.size();
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
        const Point2 a = p.vertex(i);
        const Point2 b = p.vertex((i + 1) % n);
        s += a.x() * b.y() - b.x() * a.y();
    }
    return 0.5 * s;
}

Orientation orientation(const Polygon& p) {
    return signed_area(p) >= 0.0 ? Orientation::CCW : Orientation::CW;
}

double perimeter(const Polygon& p) {
    const int n = p.size();
    double len = 0.0;
    for (int i = 0; i < n; ++i) {
        len += (p.vertex((i + 1) % n) - p.vertex(i)).norm();
    }
    return len;
}

Point2 centroid(const Polygon& p) {
    // Area-weighted centroid; falls back to the vertex mean for
    // near-zero-area rings.
    const int n = p.size();
    double a = 0.0;
    Point2 c(0.0, 0.0);
    for (int i = 0; i < n; ++i) {
        const Point2 v0 = p.vertex(i);
        const Point2 v1 = p.vertex((i + 1) % n);
        const double cross = v0.x() * v1.y() - v1.x() * v0.y();
        a += cross;
        c += (v0 + v1) * cross;
    }
    if (std::abs(a) < 1e-12) {
        return p.vertices.rowwise().mean();
    }
    return c / (3.0 * a);
}

Polygon reversed(const Polygon& p) {
    Polygon out;
    out.vertices = p.vertices.rowwise().reverse();
    return out;
}

Polygon resample(const Polygon& p, int n) {
    if (n < 3) {
        throw std::invalid_argument("resample: n must be >= 3");
    }
    validate_polygon(p);
    const int v = p.size();
    std::vector<double> cum(static_cast<size_t>(v) + 1, 0.0);
    for (int i = 0; i < v; ++i) {
        cum[i + 1] = cum[i] + (p.vertex((i + 1) % v) - p.vertex(i)).norm();
    }
    const double total = cum[v];
    if (total < 1e-6) {
        throw std::invalid_argument("degenerate polygon");
    }

    Polygon out;
    out.vertices.resize(2, n);
    int edge = 0;
    for (int k = 0; k < n; ++k) {
        const double target = total * static_cast<double>(k) / static_cast<double>(n);
        while (edge + 1 < v && cum[edge + 1] <= target) {
            ++edge;
        }
        const double seg = cum[edge + 1] - cum[edge];
        const double u = seg > 0.0 ? (target - cum[edge]) / seg : 0.0;
        const Point2 a = p.vertex(edge);
        const Point2 b = p.vertex((edge + 1) % v);
        out.vertices.col(k) = a + u * (b - a);
    }
    return out;
}

Point2 vertex_normal(const Polygon& p, int i) {
    const int n = p.size();
    if (i < 0 || i >= n) {
        throw std::invalid_argument("vertex_normal: index out of range");
    }
    const Point2 x = p.vertex(i);

    // Nearest non-degenerate neighbours on either side.
    Point2 prev = x;
    bool have_prev = false;
    for (int k = 1; k < n; ++k) {
        const Point2 c = p.vertex(((i - k) % n + n) % n);
        if ((x - c).norm() >= kVertexEps) {
            prev = c;
            have_prev = true;
            break;
        }
    }
    Point2 next = x;
    bool have_next = false;
    for (int k = 1; k < n; ++k) {
        const Point2 c = p.vertex((i + k) % n);
        if ((c - x).norm() >= kVertexEps) {
            next = c;
            have_next = true;
            break;
        }
    }
    if (!have_prev || !have_next) {
        throw std::runtime_error("undefined normal");
    }

    const Point2 e1 = x - prev;
    const Point2 e2 = next - x;
    const Point2 tangent = next - prev;  // central difference
    Point2 normal = rotate_neg90(tangent);
    const double len = normal.norm();
    if (len < 1e-12 * (e1.norm() + e2.norm())) {
        // Spike vertex: the two edges fold back on each other. Point along
        // the incoming edge, i.e. out of the spike.
        normal = e1.normalized() - e2.normalized();
        const double l2 = normal.norm();
        if (l2 < 1e-12) {
            throw std::runtime_error("undefined normal");
        }
        return normal / l2;
    }
    return normal / len;
}

namespace {

// Shared strict crossing rule so containment, rasterization and signed
// distance always agree on the same parity.
bool edge_crosses_ray(const Point2& a, const Point2& b, const Point2& q) {
    if ((a.y() > q.y()) == (b.y() > q.y())) {
        return false;
    }
    const double x_int = a.x() + (q.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
    return q.x() < x_int;
}

double segment_distance(const Point2& a, const Point2& b, const Point2& q) {
    const Point2 ab = b - a;
    const double len2 = ab.squaredNorm();
    if (len2 <= 0.0) {
        return (q - a).norm();
    }
    const double t = std::clamp((q - a).dot(ab) / len2, 0.0, 1.0);
    return (q - (a + t * ab)).norm();
}

Point2 segment_closest(const Point2& a, const Point2& b, const Point2& q) {
    const Point2 ab = b - a;
    const double len2 = ab.squaredNorm();
    if (len2 <= 0.0) {
        return a;
    }
    const double t = std::clamp((q - a).dot(ab) / len2, 0.0, 1.0);
    return a + t * ab;
}

}  // namespace

bool point_in_polygon(const Polygon& p, const Point2& q) {
    const int n = p.size();
    bool inside = false;
    for (int i = 0; i < n; ++i) {
        if (edge_crosses_ray(p.vertex(i), p.vertex((i + 1) % n), q)) {
            inside = !inside;
        }
    }
    return inside;
}

bool point_in_rings(std::span<const Polygon> rings, const Point2& q) {
    bool inside = false;
    for (const Polygon& ring : rings) {
        if (point_in_polygon(ring, q)) {
            inside = !inside;
        }
    }
    return inside;
}

double distance_to_polyline(const Polygon& p, const Point2& q) {
    const int n = p.size();
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        best = std::min(best, segment_distance(p.vertex(i), p.vertex((i + 1) % n), q));
    }
    return best;
}

double distance_to_polyline(std::span<const Polygon> rings, const Point2& q) {
    double best = std::numeric_limits<double>::infinity();
    for (const Polygon& ring : rings) {
        best = std::min(best, distance_to_polyline(ring, q));
    }
    return best;
}

Point2 closest_point_on_polyline(const Polygon& p, const Point2& q) {
    const int n = p.size();
    double best = std::numeric_limits<double>::infinity();
    Point2 best_point = p.vertex(0);
    for (int i = 0; i < n; ++i) {
        const Point2 c = segment_closest(p.vertex(i), p.vertex((i + 1) % n), q);
        const double d = (q - c).norm();
        if (d < best) {
            best = d;
            best_point = c;
        }
    }
    return best_point;
}

Point2 closest_point_on_polyline(std::span<const Polygon> rings, const Point2& q) {
    double best = std::numeric_limits<double>::infinity();
    Point2 best_point = rings.front().vertex(0);
    for (const Polygon& ring : rings) {
        const Point2 c = closest_point_on_polyline(ring, q);
        const double d = (q - c).norm();
        if (d < best) {
            best = d;
            best_point = c;
        }
    }
    return best_point;
}

double signed_distance(const Polygon& p, const Point2& q) {
    const double d = distance_to_polyline(p, q);
    return point_in_polygon(p, q) ? -d : d;
}

double signed_distance(std::span<const Polygon> rings, const Point2& q) {
    const double d = distance_to_polyline(rings, q);
    return point_in_rings(rings, q) ? -d : d;
}

BBox bbox(const Polygon& p) {
    BBox b;
    b.min = p.vertices.rowwise().minCoeff();
    b.max = p.vertices.rowwise().maxCoeff();
    return b;
}

BBox bbox(std::span<const Polygon> rings) {
    BBox b = bbox(rings.front());
    for (size_t i = 1; i < rings.size(); ++i) {
        const BBox r = bbox(rings[i]);
        b.min = b.min.cwiseMin(r.min);
        b.max = b.max.cwiseMax(r.max);
    }
    return b;
}

namespace {

bool segments_cross(const Point2& a, const Point2& b, const Point2& c, const Point2& d) {
    auto orient2d = [](const Point2& p0, const Point2& p1, const Point2& p2) {
        return (p1.x() - p0.x()) * (p2.y() - p0.y()) - (p1.y() - p0.y()) * (p2.x() - p0.x());
    };
    const double o1 = orient2d(a, b, c);
    const double o2 = orient2d(a, b, d);
    const double o3 = orient2d(c, d, a);
    const double o4 = orient2d(c, d, b);
    return ((o1 > 0.0) != (o2 > 0.0)) && ((o3 > 0.0) != (o4 > 0.0)) && o1 != 0.0 && o2 != 0.0 &&
           o3 != 0.0 && o4 != 0.0;
}

}  // namespace

int count_self_intersections(const Polygon& p) {
    const int n = p.size();
    int count = 0;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            // Skip adjacent edges (sharing a vertex), including the wrap pair.
            if (j == i + 1 || (i == 0 && j == n - 1)) {
                continue;
            }
            if (segments_cross(p.vertex(i), p.vertex((i + 1) % n), p.vertex(j),
                               p.vertex((j + 1) % n))) {
                ++count;
            }
        }
    }
    return count;
}

}  // namespace sharpcontour
