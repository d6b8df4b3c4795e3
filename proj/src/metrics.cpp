#include "sharpcontour/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace sharpcontour {

namespace {

void check_dims(const MaskGrid& a, const MaskGrid& b, const char* what) {
    if (a.width != b.width || a.height != b.height) {
        throw std::invalid_argument(std::string(what) + ": mask dimensions differ");
    }
}

using BinaryMask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

BinaryMask binarize(const MaskGrid& m) { return m.values >= 0.5; }

// One erosion pass with a 3x3 square element; out-of-image is background.
BinaryMask erode(const BinaryMask& m) {
    const Eigen::Index h = m.rows();
    const Eigen::Index w = m.cols();
    BinaryMask out(h, w);
    for (Eigen::Index r = 0; r < h; ++r) {
        for (Eigen::Index c = 0; c < w; ++c) {
            bool keep = m(r, c);
            for (Eigen::Index dr = -1; dr <= 1 && keep; ++dr) {
                for (Eigen::Index dc = -1; dc <= 1 && keep; ++dc) {
                    const Eigen::Index rr = r + dr;
                    const Eigen::Index cc = c + dc;
                    if (rr < 0 || rr >= h || cc < 0 || cc >= w || !m(rr, cc)) {
                        keep = false;
                    }
                }
            }
            out(r, c) = keep;
        }
    }
    return out;
}

// Cells of the mask within Chebyshev distance d of the background.
BinaryMask boundary_band(const BinaryMask& m, int d) {
    BinaryMask eroded = m;
    for (int i = 0; i < d; ++i) {
        eroded = erode(eroded);
    }
    return m && !eroded;
}

}  // namespace

double mask_iou(const MaskGrid& a, const MaskGrid& b) {
    check_dims(a, b, "mask_iou");
    const BinaryMask ba = binarize(a);
    const BinaryMask bb = binarize(b);
    const long inter = (ba && bb).count();
    const long uni = (ba || bb).count();
    return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

int default_boundary_band(int width, int height) {
    const double diag = std::hypot(static_cast<double>(width), static_cast<double>(height));
    return std::max(1, static_cast<int>(std::lround(0.02 * diag)));
}

double boundary_iou(const MaskGrid& a, const MaskGrid& b, int band_px) {
    check_dims(a, b, "boundary_iou");
    if (band_px < 1) {
        throw std::invalid_argument("boundary_iou: band must be >= 1");
    }
    const BinaryMask ba = binarize(a);
    const BinaryMask bb = binarize(b);
    const BinaryMask banded_a = ba && boundary_band(ba, band_px);
    const BinaryMask banded_b = bb && boundary_band(bb, band_px);
    const long inter = (banded_a && banded_b).count();
    const long uni = (banded_a || banded_b).count();
    return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

DistanceStats boundary_distance_stats(std::span<const Polygon> pred,
                                      std::span<const Polygon> gt) {
    std::vector<double> dists;
    for (const Polygon& ring : pred) {
        for (int i = 0; i < ring.size(); ++i) {
            dists.push_back(std::abs(signed_distance(gt, ring.vertex(i))));
        }
    }
    DistanceStats stats;
    if (dists.empty()) {
        return stats;
    }
    double sum = 0.0;
    for (double d : dists) {
        sum += d;
        stats.max = std::max(stats.max, d);
    }
    stats.mean = sum / static_cast<double>(dists.size());
    std::vector<double> sorted = dists;
    std::sort(sorted.begin(), sorted.end());
    const size_t n = sorted.size();
    stats.median = n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);

    // Symmetric Hausdorff from dense arc-length samples against the exact
    // opposing polyline.
    auto directed = [](std::span<const Polygon> from, std::span<const Polygon> to) {
        double worst = 0.0;
        for (const Polygon& ring : from) {
            const Polygon dense = resample(ring, 1024);
            for (int i = 0; i < dense.size(); ++i) {
                worst = std::max(worst, distance_to_polyline(to, dense.vertex(i)));
            }
        }
        return worst;
    };
    stats.hausdorff = std::max(directed(pred, gt), directed(gt, pred));
    return stats;
}

DistanceStats boundary_distance_stats(const Polygon& pred, const Polygon& gt) {
    return boundary_distance_stats(std::span<const Polygon>(&pred, 1),
                                   std::span<const Polygon>(&gt, 1));
}

CornerStats corner_error(std::span<const Polygon> pred, std::span<const Point2> gt_corners) {
    if (gt_corners.empty()) {
        throw std::invalid_argument("corner_error: no corners given");
    }
    CornerStats stats;
    double sum = 0.0;
    for (const Point2& corner : gt_corners) {
        const double d = distance_to_polyline(pred, corner);
        stats.per_corner.push_back(d);
        sum += d;
        stats.max = std::max(stats.max, d);
    }
    stats.mean = sum / static_cast<double>(gt_corners.size());
    return stats;
}

CornerStats corner_error(const Polygon& pred, std::span<const Point2> gt_corners) {
    return corner_error(std::span<const Polygon>(&pred, 1), gt_corners);
}

std::string metrics_csv_header() {
    return "instance,method,config_hash,mask_iou,boundary_iou,mean_dist,median_dist,max_dist,"
           "hausdorff,corner_mean,corner_max,frozen_fraction,self_intersections\n";
}

std::string metrics_csv_row(const std::string& instance, const std::string& method,
                            const std::string& config_hash, const MetricsReport& report) {
    char buf[512];
    std::snprintf(buf, sizeof(buf), "%s,%s,%s,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%d\n",
                  instance.c_str(), method.c_str(), config_hash.c_str(), report.mask_iou,
                  report.boundary_iou, report.boundary.mean, report.boundary.median,
                  report.boundary.max, report.boundary.hausdorff, report.corner_mean,
                  report.corner_max, report.frozen_fraction, report.self_intersection_count);
    return buf;
}

}  // namespace sharpcontour
