#pragma once

#include "sharpcontour/evolution.hpp"
#include "sharpcontour/fields.hpp"
#include "sharpcontour/geometry.hpp"
#include "sharpcontour/metrics.hpp"
#include "sharpcontour/training.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace sharpcontour {

enum class ShapeKind { Star, Blob, RoundedRect, Annulus };

/// Deterministic synthetic shape. `scale` is the overall diameter/width
/// in px; generated rings carry >= 64 vertices and are verified simple.
struct ShapeSpec {
    ShapeKind kind = ShapeKind::Blob;
    double scale = 100.0;
    double rotation_deg = 0.0;
    Point2 center{0.0, 0.0};
    std::uint64_t seed = 0;
    int canvas = 0;  // square raster used for mask metrics; 0 = derive from scale

    // star
    int star_points = 5;
    double star_ratio = 0.45;
    // blob
    int blob_harmonics = 4;
    double blob_amplitude = 0.12;
    // rounded rect
    double rect_aspect = 1.5;
    double rect_corner_radius = 0.2;  // fraction of the shorter side
    // annulus
    double annulus_ratio = 0.5;
};

const char* shape_kind_name(ShapeKind kind);
int shape_canvas(const ShapeSpec& spec);

/// Primary (outer) ring of the shape.
Polygon gen_shape(const ShapeSpec& spec);
/// Outer ring plus hole rings (annuli have one CW hole).
std::vector<Polygon> gen_shape_rings(const ShapeSpec& spec);
/// Analytic sharp-corner locations; empty for smooth shapes.
std::vector<Point2> shape_corners(const ShapeSpec& spec);

enum class PerturbMode { VertexJitter, LaplacianSmooth, UniformOffset };

struct PerturbSpec {
    PerturbMode mode = PerturbMode::VertexJitter;
    double sigma = 0.0;   // jitter stddev as a fraction of sqrt(bbox area)
    int passes = 0;       // smoothing passes
    double offset = 0.0;  // px along the outward normal
    std::uint64_t seed = 0;
};

/// Same vertex count in and out; simulates coarse segmentation contours.
Polygon perturb(const Polygon& p, const PerturbSpec& spec);

/// 50 shapes: 20 blobs, 15 stars, 10 rounded rects, 5 annuli; scales
/// 100-300 px; fully determined by the master seed.
std::vector<ShapeSpec> standard_corpus(std::uint64_t master_seed = 20220314);

/// Coarse-contour protocol applied to the ground truth: resample to 128
/// vertices, laplacian-smooth, then jitter.
struct PerturbRecipe {
    int smooth_passes = 3;
    double jitter_sigma = 0.02;
};

struct RefineProblem {
    ShapeSpec spec;
    std::vector<Polygon> gt_rings;
    std::vector<Polygon> initial_rings;
};

RefineProblem make_problem(const ShapeSpec& spec, const PerturbRecipe& recipe);

struct InstanceRefineResult {
    std::vector<Polygon> final_rings;
    double frozen_fraction = 0.0;
    double runtime_ms = 0.0;
    int iterations_run = 0;
    std::vector<EvolutionTrace> traces;
};

/// Evolves every ring of an instance against a shared field.
InstanceRefineResult refine_instance(std::span<const Polygon> initial_rings,
                                     const ProbabilityField& field, const EvolutionConfig& cfg);

/// Rasterizes pred/gt on the shape canvas and fills a full report.
MetricsReport evaluate_refinement(std::span<const Polygon> final_rings,
                                  std::span<const Polygon> gt_rings, int canvas,
                                  std::span<const Point2> corners, double frozen_fraction,
                                  double runtime_ms);

// ---------------------------------------------------------------------------
// Regression baselines: one-shot per-vertex updates with the same features
// and MLP capacity as the point classifier.
// ---------------------------------------------------------------------------

enum class RegressionVariant { Reg1, Reg2 };  // offset vector / normal distance

struct RegressionModel {
    RegressionVariant variant = RegressionVariant::Reg1;
    MlpParams params;
    bool trained = false;
};

/// L1 regression against ground-truth targets: Reg1 fits the offset to
/// the nearest boundary point, Reg2 the signed distance along the normal.
RegressionModel train_regression_model(RegressionVariant variant,
                                       std::span<const TrainingSample> samples,
                                       std::span<const Polygon> gt_rings, const TrainConfig& cfg,
                                       std::mt19937_64& rng);

using RegPredictor =
    std::function<Eigen::VectorXd(const Point2& x, const Point2& normal,
                                  const Eigen::VectorXd& input)>;

Polygon reg_baseline_refine(RegressionVariant variant, const RegPredictor& predict,
                            const Polygon& contour, const FeatureGrid& grid, const BBox& box,
                            const EvolutionConfig& cfg);
Polygon reg_baseline_refine(const RegressionModel& model, const Polygon& contour,
                            const FeatureGrid& grid, const BBox& box,
                            const EvolutionConfig& cfg);

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

/// Values per config parameter (lambda, max_steps, resolution, iterations,
/// adaptive_step); the sweep runs the cartesian product.
struct SweepSpec {
    std::map<std::string, std::vector<double>> values;
};

std::string config_fingerprint(const EvolutionConfig& cfg);
std::vector<EvolutionConfig> expand_sweep(const SweepSpec& sweep, const EvolutionConfig& base);

struct SweepRow {
    std::string shape_id;
    ShapeKind kind = ShapeKind::Blob;
    EvolutionConfig config;
    MetricsReport report;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    std::string csv;
    /// Wall-clock per config fingerprint; intentionally not part of the CSV
    /// so reruns stay byte-identical.
    std::vector<std::pair<std::string, double>> config_runtime_ms;
};

SweepResult run_sweep(std::span<const ShapeSpec> corpus, const SweepSpec& sweep,
                      const EvolutionConfig& base, double oracle_sharpness,
                      const PerturbRecipe& recipe);

std::string sweep_csv_header();

// ---------------------------------------------------------------------------
// Two-instance scene for the instance-awareness experiments
// ---------------------------------------------------------------------------

struct TwoInstanceScene {
    Polygon ring_a;
    Polygon ring_b;
    BBox box_a;
    BBox box_b;
    std::shared_ptr<const FeatureGrid> features;  // backbone stand-in, shared
    int width = 0;
    int height = 0;
};

/// Two overlapping blobs over one shared feature grid (built from the
/// union mask, as a shared backbone would see it).
TwoInstanceScene make_two_blob_scene(std::uint64_t seed);

}  // namespace sharpcontour
