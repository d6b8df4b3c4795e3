#pragma once

#include "sharpcontour/geometry.hpp"
#include "sharpcontour/raster.hpp"

#include <limits>
#include <span>
#include <string>

namespace sharpcontour {

struct DistanceStats {
    double mean = 0.0;
    double median = 0.0;
    double max = 0.0;
    double hausdorff = 0.0;
};

struct CornerStats {
    double mean = 0.0;
    double max = 0.0;
    std::vector<double> per_corner;
};

struct MetricsReport {
    double mask_iou = 0.0;
    double boundary_iou = 0.0;
    DistanceStats boundary;
    double corner_mean = std::numeric_limits<double>::quiet_NaN();
    double corner_max = std::numeric_limits<double>::quiet_NaN();
    double frozen_fraction = 0.0;
    double runtime_ms = 0.0;
    int self_intersection_count = 0;
};

/// |A n B| / |A u B| over cells >= 0.5; 1.0 when both masks are empty.
double mask_iou(const MaskGrid& a, const MaskGrid& b);

/// IoU of the two masks restricted to the d-wide bands of their own
/// boundaries. Bands use Chebyshev distance (square structuring element,
/// the image border counts as background).
double boundary_iou(const MaskGrid& a, const MaskGrid& b, int band_px);
int default_boundary_band(int width, int height);  // 2% of diagonal, floor 1

/// Per-pred-vertex |signed distance to gt| summarized as mean/median/max,
/// plus the symmetric Hausdorff distance estimated from 1024 arc-length
/// samples per ring.
DistanceStats boundary_distance_stats(std::span<const Polygon> pred,
                                      std::span<const Polygon> gt);
DistanceStats boundary_distance_stats(const Polygon& pred, const Polygon& gt);

/// Distance from each ground-truth corner to the nearest point of the
/// predicted polyline.
CornerStats corner_error(std::span<const Polygon> pred, std::span<const Point2> gt_corners);
CornerStats corner_error(const Polygon& pred, std::span<const Point2> gt_corners);

/// CSV row helpers; the volatile runtime_ms field is deliberately not a
/// column so identical runs emit identical bytes.
std::string metrics_csv_header();
std::string metrics_csv_row(const std::string& instance, const std::string& method,
                            const std::string& config_hash, const MetricsReport& report);

}  // namespace sharpcontour
