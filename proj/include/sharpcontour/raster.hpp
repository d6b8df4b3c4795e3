#pragma once

#include "sharpcontour/geometry.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace sharpcontour {

/// Discrete raster of per-cell scalars in [0,1]. Storage follows image
/// convention: row 0 is the top row. Everything else in the library works
/// in math coordinates (y up); `cell_center` is the bridge between the
/// two, mapping cell (r, c) to (c + 0.5, height - r - 0.5).
struct MaskGrid {
    int width = 0;
    int height = 0;
    Eigen::ArrayXXd values;  // height rows x width cols

    static MaskGrid zeros(int width, int height);

    double at(int row, int col) const { return values(row, col); }
    double& at(int row, int col) { return values(row, col); }
    bool empty() const { return width <= 0 || height <= 0; }
};

Point2 cell_center(const MaskGrid& m, int row, int col);

/// Marching-squares isocontour extraction at `threshold` with linear
/// interpolation along cell edges; saddle cells are disambiguated by the
/// cell-centre average. Returns sub-pixel closed rings in math
/// coordinates: outer rings CCW, hole rings CW. Rings with fewer than 8
/// vertices or a bbox diagonal under 4 px are discarded.
std::vector<Polygon> mask_to_contours(const MaskGrid& m, double threshold = 0.5);

/// Even-odd scanline fill; a cell is 1 iff its centre is inside the ring
/// set. Rings are in math coordinates.
MaskGrid rasterize(std::span<const Polygon> rings, int width, int height);
MaskGrid rasterize(const Polygon& p, int width, int height);

enum class PgmFormat { Plain, Binary };  // P2, P5

/// PGM (P2/P5, maxval 255) codec; cell value = gray / 255. Parse errors
/// carry the offending byte offset.
MaskGrid parse_pgm(const std::string& bytes);
std::string encode_pgm(const MaskGrid& m, PgmFormat format = PgmFormat::Binary);

MaskGrid read_pgm(const std::string& path);
void write_pgm(const std::string& path, const MaskGrid& m,
               PgmFormat format = PgmFormat::Binary);

/// Separable Gaussian blur with replicated borders.
MaskGrid gaussian_blur(const MaskGrid& m, double sigma);

}  // namespace sharpcontour
