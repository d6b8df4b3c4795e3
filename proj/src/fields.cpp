#include "sharpcontour/fields.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace sharpcontour {

AnalyticOracleField::AnalyticOracleField(Polygon shape, double sharpness)
    : AnalyticOracleField(std::vector<Polygon>{std::move(shape)}, sharpness) {}

AnalyticOracleField::AnalyticOracleField(std::vector<Polygon> rings, double sharpness)
    : rings_(std::move(rings)), sharpness_(sharpness) {
    if (sharpness_ < 0.0) {
        throw std::invalid_argument("analytic oracle: sharpness must be >= 0");
    }
    if (rings_.empty()) {
        throw std::invalid_argument("analytic oracle: no rings");
    }
    for (const Polygon& r : rings_) {
        validate_polygon(r);
    }
}

double AnalyticOracleField::evaluate(const Point2& q) const {
    const double sd = signed_distance(std::span<const Polygon>(rings_), q);
    if (sharpness_ == 0.0) {
        if (sd > 0.0) return 1.0;
        if (sd < 0.0) return 0.0;
        return 0.5;
    }
    return 1.0 / (1.0 + std::exp(-sd / sharpness_));
}

GridField::GridField(MaskGrid grid) : grid_(std::move(grid)) {
    if (grid_.empty()) {
        throw std::invalid_argument("grid field: empty grid");
    }
    if ((grid_.values < 0.0).any() || (grid_.values > 1.0).any()) {
        throw std::invalid_argument("grid field: values must be in [0,1]");
    }
}

namespace {

struct BilinearWeights {
    int r0, r1, c0, c1;
    double fr, fc;
};

BilinearWeights bilinear_weights(int width, int height, const Point2& q) {
    // Continuous cell coordinates with (0,0) at the centre of the
    // bottom-left... top row is row 0, so convert math y to row space.
    double u = q.x() - 0.5;
    double v = height - q.y() - 0.5;
    u = std::clamp(u, 0.0, static_cast<double>(width - 1));
    v = std::clamp(v, 0.0, static_cast<double>(height - 1));
    BilinearWeights w;
    w.c0 = std::min(static_cast<int>(std::floor(u)), width - 1);
    w.r0 = std::min(static_cast<int>(std::floor(v)), height - 1);
    w.c1 = std::min(w.c0 + 1, width - 1);
    w.r1 = std::min(w.r0 + 1, height - 1);
    w.fc = u - w.c0;
    w.fr = v - w.r0;
    return w;
}

}  // namespace

double GridField::evaluate(const Point2& q) const {
    const BilinearWeights w = bilinear_weights(grid_.width, grid_.height, q);
    const double top = (1.0 - w.fc) * grid_.at(w.r0, w.c0) + w.fc * grid_.at(w.r0, w.c1);
    const double bottom = (1.0 - w.fc) * grid_.at(w.r1, w.c0) + w.fc * grid_.at(w.r1, w.c1);
    return (1.0 - w.fr) * top + w.fr * bottom;
}

Eigen::VectorXd bilinear_feature(const FeatureGrid& grid, const Point2& q) {
    if (grid.width < 1 || grid.height < 1) {
        throw std::invalid_argument("bilinear_feature: empty grid");
    }
    const BilinearWeights w = bilinear_weights(grid.width, grid.height, q);
    const auto cell = [&](int r, int c) { return grid.data.col(r * grid.width + c); };
    return (1.0 - w.fr) * ((1.0 - w.fc) * cell(w.r0, w.c0) + w.fc * cell(w.r0, w.c1)) +
           w.fr * ((1.0 - w.fc) * cell(w.r1, w.c0) + w.fc * cell(w.r1, w.c1));
}

std::vector<int> ipc_dims(int feature_channels, int hidden_width) {
    return {feature_channels + 2, hidden_width, hidden_width, hidden_width, 1};
}

Eigen::Vector2d relative_coords(const Point2& q, const BBox& box) {
    return Eigen::Vector2d((q.x() - box.min.x()) / box.width(),
                           (q.y() - box.min.y()) / box.height());
}

double ipc_forward(const IpcParams& params, const Eigen::VectorXd& feature,
                   const Eigen::Vector2d& coords) {
    Eigen::VectorXd input(feature.size() + 2);
    input << feature, coords;
    return mlp_forward(params, input, OutputActivation::Sigmoid)(0);
}

InstanceField::InstanceField(std::shared_ptr<const FeatureGrid> grid, InstanceContext ctx)
    : grid_(std::move(grid)), ctx_(std::move(ctx)) {
    if (!grid_) {
        throw std::invalid_argument("instance field: null feature grid");
    }
    if (!(ctx_.box.area() > 0.0)) {
        throw std::invalid_argument("instance field: box area must be > 0");
    }
}

double InstanceField::evaluate(const Point2& q) const {
    return ipc_forward(ctx_.params, bilinear_feature(*grid_, q), relative_coords(q, ctx_.box));
}

FeatureGrid make_synthetic_features(const MaskGrid& foreground, int channels,
                                    std::uint64_t seed) {
    if (channels < 6) {
        throw std::invalid_argument("make_synthetic_features: need at least 6 channels");
    }
    const int w = foreground.width;
    const int h = foreground.height;
    FeatureGrid grid;
    grid.width = w;
    grid.height = h;
    grid.channels = channels;
    grid.data.resize(channels, static_cast<Eigen::Index>(w) * h);

    const MaskGrid fine = gaussian_blur(foreground, 2.0);
    const MaskGrid coarse = gaussian_blur(foreground, 6.0);
    const double diag = std::hypot(static_cast<double>(w), static_cast<double>(h));

    auto clampi = [](int v, int lo, int hi) { return std::min(std::max(v, lo), hi); };
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> noise(0.0, 1.0);

    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            const Eigen::Index col = static_cast<Eigen::Index>(r) * w + c;
            const double gx =
                0.5 * (fine.at(r, clampi(c + 1, 0, w - 1)) - fine.at(r, clampi(c - 1, 0, w - 1)));
            const double gy =
                0.5 * (fine.at(clampi(r + 1, 0, h - 1), c) - fine.at(clampi(r - 1, 0, h - 1), c));
            grid.data(0, col) = fine.at(r, c);
            grid.data(1, col) = coarse.at(r, c);
            grid.data(2, col) = std::abs(gx);
            grid.data(3, col) = std::abs(gy);
            grid.data(4, col) = (c + 0.5) / diag;
            grid.data(5, col) = (h - r - 0.5) / diag;
        }
    }
    // Noise channels are filled per channel so their content does not
    // depend on how many channels precede them.
    for (int ch = 6; ch < channels; ++ch) {
        for (Eigen::Index col = 0; col < grid.data.cols(); ++col) {
            grid.data(ch, col) = noise(rng);
        }
    }
    return grid;
}

}  // namespace sharpcontour
