#pragma once

#include "sharpcontour/geometry.hpp"
#include "sharpcontour/mlp.hpp"
#include "sharpcontour/raster.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace sharpcontour {

/// Read-only map from a 2D point to an outside-probability in [0,1].
/// A value above 0.5 classifies the point outside the object, below 0.5
/// inside; 0.5 sits on the boundary. Fields are immutable once built and
/// safe to evaluate from any thread.
class ProbabilityField {
public:
    virtual ~ProbabilityField() = default;
    virtual double evaluate(const Point2& q) const = 0;
    double operator()(const Point2& q) const { return evaluate(q); }
};

/// Idealized field: logistic(signed_distance / sharpness). With
/// sharpness 0 it degenerates to the hard indicator (1 outside, 0 inside,
/// 0.5 exactly on the polyline).
class AnalyticOracleField final : public ProbabilityField {
public:
    AnalyticOracleField(Polygon shape, double sharpness);
    AnalyticOracleField(std::vector<Polygon> rings, double sharpness);

    double evaluate(const Point2& q) const override;
    const std::vector<Polygon>& rings() const { return rings_; }

private:
    std::vector<Polygon> rings_;
    double sharpness_;
};

/// Bilinear interpolation of a probability raster at cell centres;
/// queries outside the grid clamp to the nearest border cell.
class GridField final : public ProbabilityField {
public:
    explicit GridField(MaskGrid grid);

    double evaluate(const Point2& q) const override;
    const MaskGrid& grid() const { return grid_; }

private:
    MaskGrid grid_;
};

/// Dense per-cell feature vectors over the same lattice as MaskGrid;
/// column index = row * width + col.
struct FeatureGrid {
    int width = 0;
    int height = 0;
    int channels = 0;
    Eigen::MatrixXd data;  // channels x (width*height)

    Eigen::VectorXd cell(int row, int col) const { return data.col(row * width + col); }
};

/// Bilinear feature lookup in math coordinates, clamped at the borders.
Eigen::VectorXd bilinear_feature(const FeatureGrid& grid, const Point2& q);

// Classifier defaults: feature channels F and hidden width H.
inline constexpr int kFeatureChannels = 16;
inline constexpr int kHiddenWidth = 16;

/// Point-classifier parameter shape: [F+2, H, H, H, 1].
std::vector<int> ipc_dims(int feature_channels = kFeatureChannels,
                          int hidden_width = kHiddenWidth);

/// Per-instance classifier weights; an MLP with three ReLU hidden layers
/// and a sigmoid output.
using IpcParams = MlpParams;

/// Instance bounding box plus the classifier weights fitted or predicted
/// for that instance.
struct InstanceContext {
    BBox box;
    IpcParams params;
};

/// Maps box corners to (0,0)-(1,1); points outside the box yield
/// coordinates outside [0,1] (left unclipped on purpose).
Eigen::Vector2d relative_coords(const Point2& q, const BBox& box);

/// Outside-probability of the location-aware feature [feature; coords].
double ipc_forward(const IpcParams& params, const Eigen::VectorXd& feature,
                   const Eigen::Vector2d& coords);

/// Composes bilinear feature lookup, box-relative coordinates and
/// ipc_forward into a ProbabilityField.
class InstanceField final : public ProbabilityField {
public:
    InstanceField(std::shared_ptr<const FeatureGrid> grid, InstanceContext ctx);

    double evaluate(const Point2& q) const override;
    const InstanceContext& context() const { return ctx_; }

private:
    std::shared_ptr<const FeatureGrid> grid_;
    InstanceContext ctx_;
};

/// Synthetic stand-in for backbone features: the foreground mask blurred
/// at two scales, gradient magnitudes of the finer blur, normalized pixel
/// coordinates, and seeded noise in the remaining channels.
FeatureGrid make_synthetic_features(const MaskGrid& foreground, int channels, std::uint64_t seed);

}  // namespace sharpcontour
