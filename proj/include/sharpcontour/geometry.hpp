#pragma once

#include <Eigen/Core>

#include <span>
#include <vector>

namespace sharpcontour {

using Point2 = Eigen::Vector2d;

/// Vertices stored as columns; the ring is implicitly closed (the last
/// vertex connects back to the first). Math coordinates, y up.
using VertexList = Eigen::Matrix2Xd;

enum class Orientation { CCW, CW };

/// Closed oriented vertex loop in continuous pixel coordinates.
/// Valid polygons have >= 3 vertices, all finite, and no two consecutive
/// vertices closer than 1e-9 px. Orientation is derived from the sign of
/// the shoelace area (CCW <=> positive area).
struct Polygon {
    VertexList vertices;

    int size() const { return static_cast<int>(vertices.cols()); }
    Point2 vertex(int i) const { return vertices.col(i); }
};

struct BBox {
    Point2 min{0.0, 0.0};
    Point2 max{0.0, 0.0};

    double width() const { return max.x() - min.x(); }
    double height() const { return max.y() - min.y(); }
    double area() const { return width() * height(); }
    double diagonal() const;
    bool contains(const Point2& q) const;
};

/// Throws std::invalid_argument if the vertex list violates the Polygon
/// invariants.
void validate_polygon(const Polygon& p);
Polygon make_polygon(VertexList vertices);

double signed_area(const Polygon& p);
Orientation orientation(const Polygon& p);
double perimeter(const Polygon& p);
Point2 centroid(const Polygon& p);
Polygon reversed(const Polygon& p);

/// Uniform arc-length resampling to exactly n vertices. Vertex 0 of the
/// output coincides with vertex 0 of the input; orientation is preserved.
/// Throws on degenerate input (perimeter < 1e-6 px).
Polygon resample(const Polygon& p, int n);

/// Unit normal at vertex i: the normalized perpendicular of the
/// central-difference tangent (equivalently the bisector of the two
/// adjacent edge normals), rotated -90 degrees. Points away from the
/// enclosed region for CCW rings; for CW hole rings this points into the
/// hole. Zero-length edges are skipped in favour of the nearest
/// non-degenerate neighbours; throws "undefined normal" when the whole
/// ring is degenerate.
Point2 vertex_normal(const Polygon& p, int i);

/// Even-odd containment test.
bool point_in_polygon(const Polygon& p, const Point2& q);
bool point_in_rings(std::span<const Polygon> rings, const Point2& q);

double distance_to_polyline(const Polygon& p, const Point2& q);
double distance_to_polyline(std::span<const Polygon> rings, const Point2& q);
Point2 closest_point_on_polyline(const Polygon& p, const Point2& q);
Point2 closest_point_on_polyline(std::span<const Polygon> rings, const Point2& q);

/// Distance to the polyline, positive outside and negative inside
/// (even-odd rule). Ring-set overload treats the rings jointly, so holes
/// count as outside.
double signed_distance(const Polygon& p, const Point2& q);
double signed_distance(std::span<const Polygon> rings, const Point2& q);

BBox bbox(const Polygon& p);
BBox bbox(std::span<const Polygon> rings);

/// Number of properly crossing non-adjacent segment pairs.
int count_self_intersections(const Polygon& p);

}  // namespace sharpcontour
