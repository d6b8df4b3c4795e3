#include "sharpcontour/harness.hpp"

#include "sharpcontour/raster.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

namespace sharpcontour {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

Eigen::Matrix2d rotation_matrix(double degrees) {
    const double rad = degrees * std::numbers::pi / 180.0;
    Eigen::Matrix2d rot;
    rot << std::cos(rad), -std::sin(rad), std::sin(rad), std::cos(rad);
    return rot;
}

Polygon place(Polygon p, const ShapeSpec& spec) {
    const Eigen::Matrix2d rot = rotation_matrix(spec.rotation_deg);
    p.vertices = (rot * p.vertices).colwise() + spec.center;
    return p;
}

Polygon star_ring(const ShapeSpec& spec) {
    const int k = spec.star_points;
    if (k < 3) {
        throw std::invalid_argument("gen_shape: star needs >= 3 points");
    }
    const double outer = spec.scale / 2.0;
    const double inner = spec.star_ratio * outer;
    const int corners = 2 * k;
    const int subdiv = std::max(1, (64 + corners - 1) / corners);

    VertexList corner_pts(2, corners);
    for (int j = 0; j < corners; ++j) {
        const double angle = std::numbers::pi / 2.0 + j * std::numbers::pi / k;
        const double radius = j % 2 == 0 ? outer : inner;
        corner_pts.col(j) = radius * Point2(std::cos(angle), std::sin(angle));
    }
    Polygon p;
    p.vertices.resize(2, corners * subdiv);
    int out = 0;
    for (int j = 0; j < corners; ++j) {
        const Point2 a = corner_pts.col(j);
        const Point2 b = corner_pts.col((j + 1) % corners);
        for (int t = 0; t < subdiv; ++t) {
            p.vertices.col(out++) = a + (static_cast<double>(t) / subdiv) * (b - a);
        }
    }
    return place(std::move(p), spec);
}

Polygon blob_ring(const ShapeSpec& spec, std::uint64_t seed) {
    const double radius = spec.scale / 2.0;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> amplitude;
    std::vector<double> phase;
    for (int h = 0; h < spec.blob_harmonics; ++h) {
        amplitude.push_back(spec.blob_amplitude * (0.3 + 0.7 * unit(rng)) / (h + 2));
        phase.push_back(2.0 * std::numbers::pi * unit(rng));
    }
    const int n = 256;
    Polygon p;
    p.vertices.resize(2, n);
    for (int i = 0; i < n; ++i) {
        const double theta = 2.0 * std::numbers::pi * i / n;
        double r = 1.0;
        for (int h = 0; h < spec.blob_harmonics; ++h) {
            r += amplitude[h] * std::cos((h + 2) * theta + phase[h]);
        }
        p.vertices.col(i) = radius * r * Point2(std::cos(theta), std::sin(theta));
    }
    return place(std::move(p), spec);
}

Polygon rounded_rect_ring(const ShapeSpec& spec) {
    const double w = spec.scale;
    const double h = spec.scale / spec.rect_aspect;
    const double rc = std::clamp(spec.rect_corner_radius, 0.01, 0.49) * std::min(w, h);
    const double hw = w / 2.0;
    const double hh = h / 2.0;

    // CCW walk: SE arc, NE arc, NW arc, SW arc, with straight edges between.
    const Point2 centers[4] = {Point2(hw - rc, -(hh - rc)), Point2(hw - rc, hh - rc),
                               Point2(-(hw - rc), hh - rc), Point2(-(hw - rc), -(hh - rc))};
    const double start_deg[4] = {-90.0, 0.0, 90.0, 180.0};
    const int arc_pts = 16;
    const int edge_pts = 8;

    std::vector<Point2> pts;
    for (int corner = 0; corner < 4; ++corner) {
        for (int t = 0; t < arc_pts; ++t) {
            const double a =
                (start_deg[corner] + 90.0 * t / (arc_pts - 1)) * std::numbers::pi / 180.0;
            pts.emplace_back(centers[corner] + rc * Point2(std::cos(a), std::sin(a)));
        }
        const Point2 edge_start = pts.back();
        const double next_start =
            (start_deg[(corner + 1) % 4]) * std::numbers::pi / 180.0;
        const Point2 edge_end = centers[(corner + 1) % 4] +
                                rc * Point2(std::cos(next_start), std::sin(next_start));
        for (int t = 1; t <= edge_pts; ++t) {
            pts.emplace_back(edge_start +
                             (static_cast<double>(t) / (edge_pts + 1)) * (edge_end - edge_start));
        }
    }
    Polygon p;
    p.vertices.resize(2, static_cast<int>(pts.size()));
    for (size_t i = 0; i < pts.size(); ++i) {
        p.vertices.col(static_cast<int>(i)) = pts[i];
    }
    return place(std::move(p), spec);
}

Polygon circle_ring(double radius, int n, const ShapeSpec& spec) {
    Polygon p;
    p.vertices.resize(2, n);
    for (int i = 0; i < n; ++i) {
        const double theta = 2.0 * std::numbers::pi * i / n;
        p.vertices.col(i) = radius * Point2(std::cos(theta), std::sin(theta));
    }
    return place(std::move(p), spec);
}

std::vector<Polygon> build_rings(const ShapeSpec& spec, std::uint64_t seed) {
    switch (spec.kind) {
        case ShapeKind::Star:
            return {star_ring(spec)};
        case ShapeKind::Blob:
            return {blob_ring(spec, seed)};
        case ShapeKind::RoundedRect:
            return {rounded_rect_ring(spec)};
        case ShapeKind::Annulus: {
            const double outer = spec.scale / 2.0;
            std::vector<Polygon> rings;
            rings.push_back(circle_ring(outer, 128, spec));
            rings.push_back(reversed(circle_ring(spec.annulus_ratio * outer, 128, spec)));
            return rings;
        }
    }
    throw std::logic_error("unknown shape kind");
}

}  // namespace

const char* shape_kind_name(ShapeKind kind) {
    switch (kind) {
        case ShapeKind::Star:
            return "star";
        case ShapeKind::Blob:
            return "blob";
        case ShapeKind::RoundedRect:
            return "rounded_rect";
        case ShapeKind::Annulus:
            return "annulus";
    }
    return "unknown";
}

int shape_canvas(const ShapeSpec& spec) {
    if (spec.canvas > 0) {
        return spec.canvas;
    }
    return static_cast<int>(std::ceil(spec.scale * 1.4));
}

std::vector<Polygon> gen_shape_rings(const ShapeSpec& spec) {
    for (int attempt = 0; attempt < 10; ++attempt) {
        std::vector<Polygon> rings = build_rings(spec, splitmix64(spec.seed + attempt));
        bool ok = true;
        for (const Polygon& ring : rings) {
            validate_polygon(ring);
            if (ring.size() < 64 || count_self_intersections(ring) != 0) {
                ok = false;
                break;
            }
        }
        if (ok) {
            return rings;
        }
    }
    throw std::runtime_error("gen_shape: self-intersecting shape after 10 reseeds");
}

Polygon gen_shape(const ShapeSpec& spec) { return gen_shape_rings(spec).front(); }

std::vector<Point2> shape_corners(const ShapeSpec& spec) {
    if (spec.kind != ShapeKind::Star) {
        return {};
    }
    const int corners = 2 * spec.star_points;
    const double outer = spec.scale / 2.0;
    const double inner = spec.star_ratio * outer;
    const Eigen::Matrix2d rot = rotation_matrix(spec.rotation_deg);
    std::vector<Point2> pts;
    for (int j = 0; j < corners; ++j) {
        const double angle = std::numbers::pi / 2.0 + j * std::numbers::pi / spec.star_points;
        const double radius = j % 2 == 0 ? outer : inner;
        pts.emplace_back(rot * (radius * Point2(std::cos(angle), std::sin(angle))) +
                         spec.center);
    }
    return pts;
}

Polygon perturb(const Polygon& p, const PerturbSpec& spec) {
    validate_polygon(p);
    switch (spec.mode) {
        case PerturbMode::VertexJitter: {
            if (spec.sigma <= 0.0) {
                return p;
            }
            const double sigma_px = spec.sigma * std::sqrt(bbox(p).area());
            std::mt19937_64 rng(spec.seed);
            std::normal_distribution<double> gauss(0.0, sigma_px);
            Polygon out = p;
            for (int i = 0; i < out.size(); ++i) {
                const double dx = gauss(rng);
                const double dy = gauss(rng);
                out.vertices.col(i) += Point2(dx, dy);
            }
            return out;
        }
        case PerturbMode::LaplacianSmooth: {
            Polygon out = p;
            const int n = out.size();
            for (int pass = 0; pass < spec.passes; ++pass) {
                VertexList next(2, n);
                for (int i = 0; i < n; ++i) {
                    next.col(i) = 0.25 * (out.vertex((i + n - 1) % n) + 2.0 * out.vertex(i) +
                                          out.vertex((i + 1) % n));
                }
                out.vertices = next;
            }
            return out;
        }
        case PerturbMode::UniformOffset: {
            if (spec.offset == 0.0) {
                return p;
            }
            Polygon out = p;
            for (int i = 0; i < out.size(); ++i) {
                out.vertices.col(i) = p.vertex(i) + spec.offset * vertex_normal(p, i);
            }
            return out;
        }
    }
    throw std::logic_error("unknown perturb mode");
}

std::vector<ShapeSpec> standard_corpus(std::uint64_t master_seed) {
    std::vector<ShapeSpec> corpus;
    for (int i = 0; i < 50; ++i) {
        const std::uint64_t derived =
            splitmix64(master_seed ^ (static_cast<std::uint64_t>(i) * 0x9e3779b97f4a7c15ULL +
                                      0x632be59bd9b4e019ULL));
        std::mt19937_64 rng(derived);
        std::uniform_real_distribution<double> unit(0.0, 1.0);

        ShapeSpec spec;
        spec.seed = derived;
        spec.scale = 100.0 + 200.0 * unit(rng);
        spec.rotation_deg = 360.0 * unit(rng);
        if (i < 20) {
            spec.kind = ShapeKind::Blob;
            spec.blob_harmonics = 3 + i % 4;
            spec.blob_amplitude = 0.06 + 0.09 * unit(rng);
        } else if (i < 35) {
            spec.kind = ShapeKind::Star;
            spec.star_points = 5 + i % 5;
            spec.star_ratio = 0.38 + 0.17 * unit(rng);
        } else if (i < 45) {
            spec.kind = ShapeKind::RoundedRect;
            spec.rect_aspect = 1.0 + 1.5 * unit(rng);
            spec.rect_corner_radius = 0.08 + 0.22 * unit(rng);
        } else {
            spec.kind = ShapeKind::Annulus;
            spec.annulus_ratio = 0.35 + 0.25 * unit(rng);
        }
        spec.canvas = static_cast<int>(std::ceil(spec.scale * 1.4));
        spec.center = Point2(spec.canvas / 2.0, spec.canvas / 2.0);
        corpus.push_back(spec);
    }
    return corpus;
}

RefineProblem make_problem(const ShapeSpec& spec, const PerturbRecipe& recipe) {
    RefineProblem problem;
    problem.spec = spec;
    problem.gt_rings = gen_shape_rings(spec);
    for (size_t ri = 0; ri < problem.gt_rings.size(); ++ri) {
        Polygon ring = resample(problem.gt_rings[ri], 128);
        if (recipe.smooth_passes > 0) {
            PerturbSpec smooth;
            smooth.mode = PerturbMode::LaplacianSmooth;
            smooth.passes = recipe.smooth_passes;
            ring = perturb(ring, smooth);
        }
        if (recipe.jitter_sigma > 0.0) {
            PerturbSpec jitter;
            jitter.mode = PerturbMode::VertexJitter;
            jitter.sigma = recipe.jitter_sigma;
            jitter.seed = splitmix64(spec.seed ^ (0xabcdull + ri));
            ring = perturb(ring, jitter);
        }
        problem.initial_rings.push_back(std::move(ring));
    }
    return problem;
}

InstanceRefineResult refine_instance(std::span<const Polygon> initial_rings,
                                     const ProbabilityField& field, const EvolutionConfig& cfg) {
    InstanceRefineResult result;
    const auto t0 = std::chrono::steady_clock::now();
    int frozen = 0;
    int total = 0;
    for (const Polygon& ring : initial_rings) {
        EvolutionTrace trace = evolve(ring, field, cfg);
        result.final_rings.push_back(trace.final_contour());
        result.iterations_run =
            std::max(result.iterations_run, static_cast<int>(trace.contours.size()) - 1);
        for (const VertexState& s : trace.final_states()) {
            frozen += s.status == VertexStatus::Frozen ? 1 : 0;
            ++total;
        }
        result.traces.push_back(std::move(trace));
    }
    const auto t1 = std::chrono::steady_clock::now();
    result.runtime_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    result.frozen_fraction = total > 0 ? static_cast<double>(frozen) / total : 0.0;
    return result;
}

MetricsReport evaluate_refinement(std::span<const Polygon> final_rings,
                                  std::span<const Polygon> gt_rings, int canvas,
                                  std::span<const Point2> corners, double frozen_fraction,
                                  double runtime_ms) {
    MetricsReport report;
    const MaskGrid pred = rasterize(final_rings, canvas, canvas);
    const MaskGrid gt = rasterize(gt_rings, canvas, canvas);
    report.mask_iou = mask_iou(pred, gt);
    report.boundary_iou = boundary_iou(pred, gt, default_boundary_band(canvas, canvas));
    report.boundary = boundary_distance_stats(final_rings, gt_rings);
    if (!corners.empty()) {
        const CornerStats cs = corner_error(final_rings, corners);
        report.corner_mean = cs.mean;
        report.corner_max = cs.max;
    }
    int crossings = 0;
    for (const Polygon& ring : final_rings) {
        crossings += count_self_intersections(ring);
    }
    report.self_intersection_count = crossings;
    report.frozen_fraction = frozen_fraction;
    report.runtime_ms = runtime_ms;
    return report;
}

// ---------------------------------------------------------------------------
// Regression baselines
// ---------------------------------------------------------------------------

RegressionModel train_regression_model(RegressionVariant variant,
                                       std::span<const TrainingSample> samples,
                                       std::span<const Polygon> gt_rings, const TrainConfig& cfg,
                                       std::mt19937_64& rng) {
    validate(cfg);
    if (samples.empty()) {
        throw std::invalid_argument("train_regression_model: no samples");
    }
    const int out_dim = variant == RegressionVariant::Reg1 ? 2 : 1;
    const int feature_dim = static_cast<int>(samples.front().feature.size());
    const std::vector<int> dims = {feature_dim + 2, kHiddenWidth, kHiddenWidth, kHiddenWidth,
                                   out_dim};

    std::vector<Eigen::VectorXd> inputs;
    std::vector<Eigen::VectorXd> targets;
    inputs.reserve(samples.size());
    targets.reserve(samples.size());
    for (const TrainingSample& s : samples) {
        Eigen::VectorXd input(s.feature.size() + 2);
        input << s.feature, s.coords;
        inputs.push_back(std::move(input));
        if (variant == RegressionVariant::Reg1) {
            targets.push_back(closest_point_on_polyline(gt_rings, s.point) - s.point);
        } else {
            Eigen::VectorXd t(1);
            t(0) = -signed_distance(gt_rings, s.point);
            targets.push_back(std::move(t));
        }
    }

    const double inv_n = 1.0 / static_cast<double>(samples.size());
    auto l1_loss = [&](const Eigen::VectorXd& theta) {
        const MlpParams params = MlpParams::from_flat(dims, theta);
        double total = 0.0;
        for (size_t i = 0; i < inputs.size(); ++i) {
            total += (mlp_forward(params, inputs[i], OutputActivation::Identity) - targets[i])
                         .lpNorm<1>();
        }
        return total * inv_n;
    };
    auto l1_gradient = [&](const Eigen::VectorXd& theta) {
        const MlpParams params = MlpParams::from_flat(dims, theta);
        MlpParams grad = MlpParams::zeros(dims);
        for (size_t i = 0; i < inputs.size(); ++i) {
            const MlpTrace trace =
                mlp_forward_trace(params, inputs[i], OutputActivation::Identity);
            const Eigen::VectorXd residual = trace.activations.back() - targets[i];
            const Eigen::VectorXd d_out =
                residual.unaryExpr([](double r) { return r > 0.0 ? 1.0 : (r < 0.0 ? -1.0 : 0.0); }) *
                inv_n;
            mlp_backward(params, trace, d_out, OutputActivation::Identity, grad);
        }
        return grad.flatten();
    };

    MomentumOptimizer opt(MlpParams::random_init(dims, rng).flatten(), cfg.learning_rate);
    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        opt.step(l1_gradient(opt.theta()), l1_loss(opt.theta()), l1_loss);
    }

    RegressionModel model;
    model.variant = variant;
    model.params = MlpParams::from_flat(dims, opt.theta());
    model.trained = true;
    return model;
}

Polygon reg_baseline_refine(RegressionVariant variant, const RegPredictor& predict,
                            const Polygon& contour, const FeatureGrid& grid, const BBox& box,
                            const EvolutionConfig& cfg) {
    validate(cfg);
    validate_polygon(contour);
    const double area = bbox(contour).area();
    const double t_max = 0.5 * cfg.lambda * std::sqrt(area) * cfg.max_steps;

    Polygon out;
    out.vertices.resize(2, contour.size());
    for (int i = 0; i < contour.size(); ++i) {
        const Point2 x = contour.vertex(i);
        Eigen::VectorXd input(grid.channels + 2);
        input << bilinear_feature(grid, x), relative_coords(x, box);
        const Point2 normal = vertex_normal(contour, i);
        const Eigen::VectorXd pred = predict(x, normal, input);
        if (variant == RegressionVariant::Reg1) {
            if (pred.size() != 2) {
                throw std::invalid_argument("reg_baseline_refine: Reg1 expects 2 outputs");
            }
            out.vertices.col(i) = x + Point2(pred(0), pred(1));
        } else {
            if (pred.size() != 1) {
                throw std::invalid_argument("reg_baseline_refine: Reg2 expects 1 output");
            }
            const double t = std::clamp(pred(0), -t_max, t_max);
            out.vertices.col(i) = x + t * normal;
        }
    }
    return out;
}

Polygon reg_baseline_refine(const RegressionModel& model, const Polygon& contour,
                            const FeatureGrid& grid, const BBox& box,
                            const EvolutionConfig& cfg) {
    if (!model.trained) {
        throw std::runtime_error("untrained model");
    }
    const RegPredictor predict = [&](const Point2&, const Point2&,
                                     const Eigen::VectorXd& input) {
        return mlp_forward(model.params, input, OutputActivation::Identity);
    };
    return reg_baseline_refine(model.variant, predict, contour, grid, box, cfg);
}

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

std::string config_fingerprint(const EvolutionConfig& cfg) {
    char canonical[256];
    std::snprintf(canonical, sizeof(canonical),
                  "lambda=%.17g|M=%d|N=%d|n=%d|adaptive=%d|freeze=%.17g|midpoint=%d|seed=%llu",
                  cfg.lambda, cfg.max_steps, cfg.resolution, cfg.iterations,
                  cfg.adaptive_step ? 1 : 0, cfg.freeze_epsilon, cfg.midpoint_refine ? 1 : 0,
                  static_cast<unsigned long long>(cfg.seed));
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (const char* p = canonical; *p; ++p) {
        hash ^= static_cast<unsigned char>(*p);
        hash *= 0x100000001b3ULL;
    }
    char hex[17];
    std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(hash));
    return hex;
}

std::vector<EvolutionConfig> expand_sweep(const SweepSpec& sweep, const EvolutionConfig& base) {
    std::vector<EvolutionConfig> configs{base};
    for (const auto& [key, values] : sweep.values) {
        if (values.empty()) {
            throw std::invalid_argument("sweep parameter '" + key + "' has no values");
        }
        std::vector<EvolutionConfig> next;
        for (const EvolutionConfig& cfg : configs) {
            for (double v : values) {
                EvolutionConfig c = cfg;
                if (key == "lambda") {
                    c.lambda = v;
                } else if (key == "max_steps") {
                    c.max_steps = static_cast<int>(v);
                } else if (key == "resolution") {
                    c.resolution = static_cast<int>(v);
                } else if (key == "iterations") {
                    c.iterations = static_cast<int>(v);
                } else if (key == "adaptive_step") {
                    c.adaptive_step = v != 0.0;
                } else if (key == "freeze_epsilon") {
                    c.freeze_epsilon = v;
                } else {
                    throw std::invalid_argument("unknown sweep parameter: " + key);
                }
                next.push_back(c);
            }
        }
        configs = std::move(next);
    }
    for (const EvolutionConfig& cfg : configs) {
        validate(cfg);
    }
    return configs;
}

std::string sweep_csv_header() {
    return "shape,kind,config_hash,lambda,max_steps,resolution,iterations,adaptive_step,"
           "mask_iou,boundary_iou,mean_dist,median_dist,max_dist,hausdorff,corner_mean,"
           "corner_max,frozen_fraction,self_intersections\n";
}

SweepResult run_sweep(std::span<const ShapeSpec> corpus, const SweepSpec& sweep,
                      const EvolutionConfig& base, double oracle_sharpness,
                      const PerturbRecipe& recipe) {
    if (corpus.empty()) {
        throw std::invalid_argument("run_sweep: empty corpus");
    }
    const std::vector<EvolutionConfig> configs = expand_sweep(sweep, base);

    // Problems are built once so every config sees bit-identical inputs.
    std::vector<RefineProblem> problems;
    problems.reserve(corpus.size());
    for (const ShapeSpec& spec : corpus) {
        problems.push_back(make_problem(spec, recipe));
    }

    SweepResult result;
    result.csv = sweep_csv_header();
    for (const EvolutionConfig& cfg : configs) {
        const std::string hash = config_fingerprint(cfg);
        const auto t0 = std::chrono::steady_clock::now();
        for (size_t si = 0; si < problems.size(); ++si) {
            const RefineProblem& problem = problems[si];
            char row_id[16];
            std::snprintf(row_id, sizeof(row_id), "s%02d", static_cast<int>(si));
            try {
                const AnalyticOracleField field(problem.gt_rings, oracle_sharpness);
                const InstanceRefineResult rr =
                    refine_instance(problem.initial_rings, field, cfg);
                const std::vector<Point2> corners = shape_corners(problem.spec);
                SweepRow row;
                row.shape_id = row_id;
                row.kind = problem.spec.kind;
                row.config = cfg;
                row.report = evaluate_refinement(rr.final_rings, problem.gt_rings,
                                                 shape_canvas(problem.spec), corners,
                                                 rr.frozen_fraction, rr.runtime_ms);
                char buf[512];
                std::snprintf(buf, sizeof(buf),
                              "%s,%s,%s,%.9g,%d,%d,%d,%d,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,"
                              "%.9g,%.9g,%d\n",
                              row.shape_id.c_str(), shape_kind_name(row.kind), hash.c_str(),
                              cfg.lambda, cfg.max_steps, cfg.resolution, cfg.iterations,
                              cfg.adaptive_step ? 1 : 0, row.report.mask_iou,
                              row.report.boundary_iou, row.report.boundary.mean,
                              row.report.boundary.median, row.report.boundary.max,
                              row.report.boundary.hausdorff, row.report.corner_mean,
                              row.report.corner_max, row.report.frozen_fraction,
                              row.report.self_intersection_count);
                result.csv += buf;
                result.rows.push_back(std::move(row));
            } catch (const std::exception& e) {
                throw std::runtime_error("sweep cell failed (shape " + std::string(row_id) +
                                         ", config " + hash + "): " + e.what());
            }
        }
        const auto t1 = std::chrono::steady_clock::now();
        result.config_runtime_ms.emplace_back(
            hash, std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    return result;
}

// ---------------------------------------------------------------------------
// Two-instance scene
// ---------------------------------------------------------------------------

TwoInstanceScene make_two_blob_scene(std::uint64_t seed) {
    TwoInstanceScene scene;
    scene.width = 220;
    scene.height = 220;

    ShapeSpec a;
    a.kind = ShapeKind::Blob;
    a.scale = 110.0;
    a.blob_harmonics = 3;
    a.blob_amplitude = 0.07;
    a.center = Point2(70.0, 110.0);
    a.seed = splitmix64(seed ^ 0x11ULL);
    ShapeSpec b = a;
    b.scale = 115.0;
    b.center = Point2(150.0, 110.0);
    b.seed = splitmix64(seed ^ 0x22ULL);

    scene.ring_a = gen_shape(a);
    scene.ring_b = gen_shape(b);
    scene.box_a = bbox(scene.ring_a);
    scene.box_b = bbox(scene.ring_b);

    // Shared features from the union mask, the way a single backbone
    // would see the scene.
    const MaskGrid mask_a = rasterize(scene.ring_a, scene.width, scene.height);
    const MaskGrid mask_b = rasterize(scene.ring_b, scene.width, scene.height);
    MaskGrid unionmask = MaskGrid::zeros(scene.width, scene.height);
    unionmask.values = mask_a.values.max(mask_b.values);
    scene.features = std::make_shared<FeatureGrid>(
        make_synthetic_features(unionmask, kFeatureChannels, splitmix64(seed ^ 0x33ULL)));
    return scene;
}

}  // namespace sharpcontour
