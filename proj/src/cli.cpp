#include "sharpcontour/cli.hpp"

#include "sharpcontour/evolution.hpp"
#include "sharpcontour/fields.hpp"
#include "sharpcontour/geometry.hpp"
#include "sharpcontour/harness.hpp"
#include "sharpcontour/metrics.hpp"
#include "sharpcontour/raster.hpp"
#include "sharpcontour/serialize.hpp"
#include "sharpcontour/svg.hpp"
#include "sharpcontour/training.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <memory>
#include <numbers>
#include <optional>
#include <sstream>

namespace sharpcontour {

namespace {

// Exit codes: 2 for unreadable/invalid input files, 3 for configuration
// problems, 4 for everything else at runtime.
struct FileParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

MaskGrid load_pgm(const std::string& path) {
    try {
        return read_pgm(path);
    } catch (const std::exception& e) {
        throw FileParseError(e.what());
    }
}

Json load_json(const std::string& path) {
    try {
        return parse_json_file(path);
    } catch (const std::exception& e) {
        throw FileParseError(e.what());
    }
}

PolygonDocument load_polygon_document(const std::string& path) {
    try {
        return polygon_document_from_json(load_json(path));
    } catch (const FileParseError&) {
        throw;
    } catch (const std::exception& e) {
        throw FileParseError(path + ": " + e.what());
    }
}

EvolutionConfig load_evolution_config(const std::string& path) {
    Json j = load_json(path);
    try {
        const EvolutionConfig cfg = evolution_config_from_json(j);
        validate(cfg);
        return cfg;
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
}

TrainConfig load_train_config(const std::string& path) {
    Json j = load_json(path);
    try {
        const TrainConfig cfg = train_config_from_json(j);
        validate(cfg);
        return cfg;
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
}

/// Groups marching-squares rings into instances: one per outer (CCW)
/// ring, holes attached to the smallest containing outer.
PolygonDocument document_from_mask(const MaskGrid& mask, double threshold) {
    const std::vector<Polygon> rings = mask_to_contours(mask, threshold);
    PolygonDocument doc;
    doc.canvas_width = mask.width;
    doc.canvas_height = mask.height;

    std::vector<size_t> outers;
    for (size_t i = 0; i < rings.size(); ++i) {
        if (signed_area(rings[i]) > 0.0) {
            outers.push_back(i);
        }
    }
    for (size_t oi = 0; oi < outers.size(); ++oi) {
        PolygonInstance inst;
        inst.id = std::to_string(oi);
        inst.rings.push_back(rings[outers[oi]]);
        doc.instances.push_back(std::move(inst));
    }
    for (size_t i = 0; i < rings.size(); ++i) {
        if (signed_area(rings[i]) > 0.0) {
            continue;
        }
        const Point2 probe = rings[i].vertex(0);
        double best_area = std::numeric_limits<double>::infinity();
        int best = -1;
        for (size_t oi = 0; oi < outers.size(); ++oi) {
            const Polygon& outer = rings[outers[oi]];
            if (point_in_polygon(outer, probe)) {
                const double area = signed_area(outer);
                if (area < best_area) {
                    best_area = area;
                    best = static_cast<int>(oi);
                }
            }
        }
        if (best >= 0) {
            doc.instances[static_cast<size_t>(best)].rings.push_back(rings[i]);
        }
    }
    return doc;
}

Polygon circle_polygon(const Point2& centre, double radius, int n = 512) {
    Polygon p;
    p.vertices.resize(2, n);
    for (int i = 0; i < n; ++i) {
        const double a = 2.0 * std::numbers::pi * i / n;
        p.vertices.col(i) = centre + radius * Point2(std::cos(a), std::sin(a));
    }
    return p;
}

/// "circle:cx,cy,r[,tau]" (image coordinates) or "poly:FILE[,tau]".
std::unique_ptr<ProbabilityField> parse_oracle_spec(const std::string& spec,
                                                    int canvas_height) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos) {
        throw ConfigError("oracle spec must be circle:cx,cy,r[,tau] or poly:FILE[,tau]");
    }
    const std::string kind = spec.substr(0, colon);
    const std::string rest = spec.substr(colon + 1);
    if (kind == "circle") {
        std::vector<double> vals;
        std::stringstream ss(rest);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            try {
                vals.push_back(std::stod(tok));
            } catch (const std::exception&) {
                throw ConfigError("oracle spec: bad number '" + tok + "'");
            }
        }
        if (vals.size() != 3 && vals.size() != 4) {
            throw ConfigError("oracle spec: circle needs cx,cy,r[,tau]");
        }
        const double tau = vals.size() == 4 ? vals[3] : 0.0;
        const Point2 centre(vals[0], canvas_height - vals[1]);  // flip image y
        return std::make_unique<AnalyticOracleField>(circle_polygon(centre, vals[2]), tau);
    }
    if (kind == "poly") {
        std::string file = rest;
        double tau = 0.0;
        const auto comma = rest.rfind(',');
        if (comma != std::string::npos) {
            try {
                tau = std::stod(rest.substr(comma + 1));
                file = rest.substr(0, comma);
            } catch (const std::exception&) {
                // no trailing tau: the whole rest is the filename
            }
        }
        const PolygonDocument doc = load_polygon_document(file);
        std::vector<Polygon> rings;
        for (const PolygonInstance& inst : doc.instances) {
            rings.insert(rings.end(), inst.rings.begin(), inst.rings.end());
        }
        if (rings.empty()) {
            throw FileParseError(file + ": oracle document has no contours");
        }
        return std::make_unique<AnalyticOracleField>(std::move(rings), tau);
    }
    throw ConfigError("oracle spec: unknown kind '" + kind + "'");
}

std::string lerp_color(double t) {
    // light -> dark blue
    const int r0 = 0x9e, g0 = 0xcb, b0 = 0xff;
    const int r1 = 0x1f, g1 = 0x4e, b1 = 0x9e;
    char buf[8];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x",
                  static_cast<int>(std::lround(r0 + t * (r1 - r0))),
                  static_cast<int>(std::lround(g0 + t * (g1 - g0))),
                  static_cast<int>(std::lround(b0 + t * (b1 - b0))));
    return buf;
}

// ---------------------------------------------------------------------------
// refine
// ---------------------------------------------------------------------------

struct RefineOptions {
    std::string mask_path;
    std::string polygons_path;
    std::string field_path;
    std::string oracle_spec;
    std::string ipc_path;
    std::string features_path;
    std::string config_path;
    std::string out_path;
    std::string svg_path;
    std::string gt_path;
    bool trace = false;
    std::uint64_t seed = 0;
    bool seed_set = false;
};

int cmd_refine(const RefineOptions& opt, std::ostream& out, std::ostream& err) {
    const int contour_sources = (!opt.mask_path.empty()) + (!opt.polygons_path.empty());
    if (contour_sources != 1) {
        throw ConfigError("exactly one contour source (--mask or --polygons) is required");
    }
    const int field_sources =
        (!opt.field_path.empty()) + (!opt.oracle_spec.empty()) + (!opt.ipc_path.empty());
    if (field_sources != 1) {
        throw ConfigError("exactly one field source (--field, --oracle or --ipc) is required");
    }
    if (!opt.ipc_path.empty() && opt.features_path.empty()) {
        throw ConfigError("--ipc requires --features");
    }

    EvolutionConfig cfg;
    if (!opt.config_path.empty()) {
        cfg = load_evolution_config(opt.config_path);
    }
    if (opt.seed_set) {
        cfg.seed = opt.seed;
    }
    try {
        validate(cfg);
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }

    PolygonDocument doc;
    if (!opt.mask_path.empty()) {
        doc = document_from_mask(load_pgm(opt.mask_path), 0.5);
    } else {
        doc = load_polygon_document(opt.polygons_path);
    }

    std::shared_ptr<const FeatureGrid> features;
    IpcParams ipc;
    std::unique_ptr<ProbabilityField> shared_field;
    if (!opt.field_path.empty()) {
        shared_field = std::make_unique<GridField>(load_pgm(opt.field_path));
    } else if (!opt.oracle_spec.empty()) {
        shared_field = parse_oracle_spec(opt.oracle_spec, doc.canvas_height);
    } else {
        try {
            ipc = mlp_params_from_json(load_json(opt.ipc_path));
            features = std::make_shared<FeatureGrid>(
                feature_grid_from_json(load_json(opt.features_path)));
        } catch (const FileParseError&) {
            throw;
        } catch (const std::exception& e) {
            throw FileParseError(e.what());
        }
    }

    // Refine every ring of every instance; keep every intermediate
    // contour for --trace and --svg.
    PolygonDocument refined = doc;
    std::vector<PolygonDocument> snapshots(static_cast<size_t>(cfg.iterations) + 1, doc);
    for (size_t ii = 0; ii < doc.instances.size(); ++ii) {
        const PolygonInstance& inst = doc.instances[ii];
        std::unique_ptr<ProbabilityField> instance_field;
        const ProbabilityField* field = shared_field.get();
        if (!field) {
            InstanceContext ctx;
            ctx.box = bbox(std::span<const Polygon>(inst.rings));
            ctx.params = ipc;
            instance_field = std::make_unique<InstanceField>(features, ctx);
            field = instance_field.get();
        }
        for (size_t ri = 0; ri < inst.rings.size(); ++ri) {
            const EvolutionTrace trace = evolve(inst.rings[ri], *field, cfg);
            refined.instances[ii].rings[ri] = trace.final_contour();
            for (int k = 0; k <= cfg.iterations; ++k) {
                const size_t idx =
                    std::min(static_cast<size_t>(k), trace.contours.size() - 1);
                snapshots[static_cast<size_t>(k)].instances[ii].rings[ri] =
                    trace.contours[idx];
            }
        }
    }

    Json out_json = to_json(refined);
    if (opt.trace) {
        Json trace_json = Json::array();
        for (size_t k = 0; k < snapshots.size(); ++k) {
            Json entry;
            entry["iteration"] = k;
            entry["instances"] = to_json(snapshots[k])["instances"];
            trace_json.push_back(std::move(entry));
        }
        out_json["trace"] = std::move(trace_json);
    }
    write_text_atomic(opt.out_path, dump_json(out_json));

    if (!opt.svg_path.empty()) {
        std::vector<SvgLayer> layers;
        if (!opt.gt_path.empty()) {
            const PolygonDocument gt = load_polygon_document(opt.gt_path);
            SvgLayer layer;
            layer.color = "#2ca02c";
            layer.stroke_width = 1.2;
            layer.label = "gt";
            for (const PolygonInstance& inst : gt.instances) {
                layer.rings.insert(layer.rings.end(), inst.rings.begin(), inst.rings.end());
            }
            layers.push_back(std::move(layer));
        }
        auto snapshot_layer = [&](size_t k, const std::string& color, double width,
                                  const std::string& label) {
            SvgLayer layer;
            layer.color = color;
            layer.stroke_width = width;
            layer.label = label;
            for (const PolygonInstance& inst : snapshots[k].instances) {
                layer.rings.insert(layer.rings.end(), inst.rings.begin(), inst.rings.end());
            }
            layers.push_back(std::move(layer));
        };
        snapshot_layer(0, "#888888", 1.0, "initial");
        for (size_t k = 1; k + 1 < snapshots.size(); ++k) {
            snapshot_layer(k, lerp_color(static_cast<double>(k) / snapshots.size()), 0.8,
                           "iteration_" + std::to_string(k));
        }
        snapshot_layer(snapshots.size() - 1, "#d62728", 1.2, "final");
        write_text_atomic(opt.svg_path,
                          render_svg(doc.canvas_width, doc.canvas_height, layers));
    }

    out << "refined " << refined.instances.size() << " instance(s)\n";
    (void)err;
    return 0;
}

// ---------------------------------------------------------------------------
// train
// ---------------------------------------------------------------------------

struct TrainOptions {
    std::string gt_path;
    std::string features_path;
    std::string config_path;
    std::string out_path;
    std::string log_path;
    std::uint64_t seed = 0;
    bool seed_set = false;
};

int cmd_train(const TrainOptions& opt, std::ostream& out, std::ostream& err) {
    TrainConfig cfg;
    if (!opt.config_path.empty()) {
        cfg = load_train_config(opt.config_path);
    }
    if (opt.seed_set) {
        cfg.seed = opt.seed;
    }
    try {
        validate(cfg);
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }

    const PolygonDocument gt = load_polygon_document(opt.gt_path);
    if (gt.instances.empty()) {
        throw FileParseError(opt.gt_path + ": no instances to train on");
    }

    std::shared_ptr<const FeatureGrid> features;
    if (!opt.features_path.empty()) {
        try {
            features = std::make_shared<FeatureGrid>(
                feature_grid_from_json(load_json(opt.features_path)));
        } catch (const FileParseError&) {
            throw;
        } catch (const std::exception& e) {
            throw FileParseError(e.what());
        }
    } else {
        // Synthesize backbone-like features from the union of the
        // ground-truth instances.
        MaskGrid unionmask = MaskGrid::zeros(gt.canvas_width, gt.canvas_height);
        for (const PolygonInstance& inst : gt.instances) {
            const MaskGrid m =
                rasterize(inst.rings, gt.canvas_width, gt.canvas_height);
            unionmask.values = unionmask.values.max(m.values);
        }
        features = std::make_shared<FeatureGrid>(
            make_synthetic_features(unionmask, kFeatureChannels, cfg.seed ^ 0x5eedULL));
    }

    Json per_instance = Json::array();
    std::string log_csv;
    for (size_t ii = 0; ii < gt.instances.size(); ++ii) {
        const PolygonInstance& inst = gt.instances[ii];
        std::mt19937_64 rng(cfg.seed + 1000003ULL * (ii + 1));
        const BBox box = bbox(std::span<const Polygon>(inst.rings));
        const std::vector<TrainingSample> samples =
            sample_boundary_points(inst.rings, *features, box, cfg, rng,
                                   static_cast<int>(ii));
        const IpcParams initial =
            MlpParams::random_init(ipc_dims(features->channels, kHiddenWidth), rng);
        const FitResult fit = fit_instance(initial, samples, cfg);
        per_instance.push_back(Json{{"id", inst.id}, {"params", to_json(fit.params)}});
        log_csv += train_log_csv(fit.log, static_cast<int>(ii), ii == 0);
        out << "instance " << inst.id << ": loss " << fit.final_loss << ", band accuracy "
            << fit.final_accuracy << "\n";
    }

    if (gt.instances.size() == 1) {
        write_text_atomic(opt.out_path, dump_json(per_instance[0]["params"]));
    } else {
        write_text_atomic(opt.out_path, dump_json(Json{{"per_instance", per_instance}}));
    }
    if (!opt.log_path.empty()) {
        write_text_atomic(opt.log_path, log_csv);
    }
    (void)err;
    return 0;
}

// ---------------------------------------------------------------------------
// bench
// ---------------------------------------------------------------------------

struct BenchOptions {
    std::string suite = "standard";
    int count = 0;
    std::vector<std::string> sweep_specs;
    std::string config_path;
    double tau = 0.0;
    std::string out_path;
    std::uint64_t seed = 20220314;
};

int cmd_bench(const BenchOptions& opt, std::ostream& out, std::ostream& err) {
    if (opt.suite != "standard") {
        throw ConfigError("unknown suite '" + opt.suite + "' (only: standard)");
    }
    EvolutionConfig base;
    if (!opt.config_path.empty()) {
        base = load_evolution_config(opt.config_path);
    }
    SweepSpec sweep;
    for (const std::string& spec : opt.sweep_specs) {
        const auto eq = spec.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("sweep spec must be name=v1,v2,... (got '" + spec + "')");
        }
        const std::string name = spec.substr(0, eq);
        std::vector<double> values;
        std::stringstream ss(spec.substr(eq + 1));
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            try {
                values.push_back(std::stod(tok));
            } catch (const std::exception&) {
                throw ConfigError("sweep spec: bad value '" + tok + "'");
            }
        }
        sweep.values[name] = std::move(values);
    }

    std::vector<ShapeSpec> corpus = standard_corpus(opt.seed);
    if (opt.count > 0 && opt.count < static_cast<int>(corpus.size())) {
        corpus.resize(static_cast<size_t>(opt.count));
    }
    SweepResult result;
    try {
        result = run_sweep(corpus, sweep, base, opt.tau, PerturbRecipe{});
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    write_text_atomic(opt.out_path, result.csv);
    for (const auto& [hash, ms] : result.config_runtime_ms) {
        out << "config " << hash << ": " << ms << " ms\n";
    }
    (void)err;
    return 0;
}

// ---------------------------------------------------------------------------
// eval
// ---------------------------------------------------------------------------

struct EvalOptions {
    std::string pred_path;
    std::string gt_path;
    std::string out_path;
};

int cmd_eval(const EvalOptions& opt, std::ostream& out, std::ostream& err) {
    const PolygonDocument pred = load_polygon_document(opt.pred_path);
    const PolygonDocument gt = load_polygon_document(opt.gt_path);
    if (pred.canvas_width != gt.canvas_width || pred.canvas_height != gt.canvas_height) {
        throw std::runtime_error("eval: pred and gt canvases differ");
    }
    std::string csv = metrics_csv_header();
    for (const PolygonInstance& p : pred.instances) {
        const PolygonInstance* match = nullptr;
        for (const PolygonInstance& g : gt.instances) {
            if (g.id == p.id) {
                match = &g;
                break;
            }
        }
        if (!match) {
            throw std::runtime_error("eval: no gt instance with id '" + p.id + "'");
        }
        MetricsReport report;
        const MaskGrid pm = rasterize(p.rings, pred.canvas_width, pred.canvas_height);
        const MaskGrid gm = rasterize(match->rings, pred.canvas_width, pred.canvas_height);
        report.mask_iou = mask_iou(pm, gm);
        report.boundary_iou =
            boundary_iou(pm, gm, default_boundary_band(pred.canvas_width, pred.canvas_height));
        report.boundary = boundary_distance_stats(p.rings, match->rings);
        for (const Polygon& ring : p.rings) {
            report.self_intersection_count += count_self_intersections(ring);
        }
        csv += metrics_csv_row(p.id, "eval", "-", report);
    }
    write_text_atomic(opt.out_path, csv);
    out << "evaluated " << pred.instances.size() << " instance(s)\n";
    (void)err;
    return 0;
}

// ---------------------------------------------------------------------------
// convert / render
// ---------------------------------------------------------------------------

struct ConvertOptions {
    std::string mask_path;
    std::string polygons_path;
    std::string out_path;
    double threshold = 0.5;
};

int cmd_convert(const ConvertOptions& opt, std::ostream& out, std::ostream& err) {
    const int sources = (!opt.mask_path.empty()) + (!opt.polygons_path.empty());
    if (sources != 1) {
        throw ConfigError("exactly one of --mask or --polygons is required");
    }
    if (!opt.mask_path.empty()) {
        const PolygonDocument doc = document_from_mask(load_pgm(opt.mask_path), opt.threshold);
        write_text_atomic(opt.out_path, dump_json(to_json(doc)));
        out << "extracted " << doc.instances.size() << " instance(s)\n";
    } else {
        const PolygonDocument doc = load_polygon_document(opt.polygons_path);
        MaskGrid mask = MaskGrid::zeros(doc.canvas_width, doc.canvas_height);
        for (const PolygonInstance& inst : doc.instances) {
            const MaskGrid m = rasterize(inst.rings, doc.canvas_width, doc.canvas_height);
            mask.values = mask.values.max(m.values);
        }
        const std::string bytes = encode_pgm(mask, PgmFormat::Binary);
        write_text_atomic(opt.out_path, bytes);
        out << "rasterized " << doc.instances.size() << " instance(s)\n";
    }
    (void)err;
    return 0;
}

struct RenderOptions {
    std::string polygons_path;
    std::string gt_path;
    std::string out_path;
};

int cmd_render(const RenderOptions& opt, std::ostream& out, std::ostream& err) {
    const PolygonDocument doc = load_polygon_document(opt.polygons_path);
    std::vector<SvgLayer> layers;
    if (!opt.gt_path.empty()) {
        const PolygonDocument gt = load_polygon_document(opt.gt_path);
        SvgLayer layer;
        layer.color = "#2ca02c";
        layer.label = "gt";
        for (const PolygonInstance& inst : gt.instances) {
            layer.rings.insert(layer.rings.end(), inst.rings.begin(), inst.rings.end());
        }
        layers.push_back(std::move(layer));
    }
    SvgLayer layer;
    layer.color = "#d62728";
    layer.label = "contours";
    for (const PolygonInstance& inst : doc.instances) {
        layer.rings.insert(layer.rings.end(), inst.rings.begin(), inst.rings.end());
    }
    layers.push_back(std::move(layer));
    write_text_atomic(opt.out_path,
                      render_svg(doc.canvas_width, doc.canvas_height, layers));
    out << "rendered " << doc.instances.size() << " instance(s)\n";
    (void)err;
    return 0;
}

}  // namespace

int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"SharpContour: discrete contour evolution for boundary refinement"};
    app.require_subcommand(1);

    RefineOptions refine_opt;
    auto* refine = app.add_subcommand(
        "refine", "Refine contours against a probability field");
    refine->add_option("--mask", refine_opt.mask_path, "Initial contours from a PGM mask");
    refine->add_option("--polygons", refine_opt.polygons_path,
                       "Initial contours from a polygon JSON document");
    refine->add_option("--field", refine_opt.field_path, "Probability field as a PGM raster");
    refine->add_option("--oracle", refine_opt.oracle_spec,
                       "Analytic field: circle:cx,cy,r[,tau] or poly:FILE[,tau]");
    refine->add_option("--ipc", refine_opt.ipc_path, "Classifier parameters JSON");
    refine->add_option("--features", refine_opt.features_path,
                       "Feature grid JSON (required with --ipc)");
    refine->add_option("--config", refine_opt.config_path, "Evolution config JSON");
    refine->add_option("--out", refine_opt.out_path, "Output polygon JSON")->required();
    refine->add_option("--svg", refine_opt.svg_path, "Layered SVG rendering");
    refine->add_option("--gt", refine_opt.gt_path, "Ground-truth polygons for the SVG overlay");
    refine->add_flag("--trace", refine_opt.trace, "Record every intermediate contour");
    auto* refine_seed = refine->add_option("--seed", refine_opt.seed, "Override config seed");

    TrainOptions train_opt;
    auto* train = app.add_subcommand("train", "Fit per-instance classifier parameters");
    train->add_option("--gt", train_opt.gt_path, "Ground-truth polygon JSON")->required();
    train->add_option("--features", train_opt.features_path,
                      "Feature grid JSON (synthesized from the gt when omitted)");
    train->add_option("--train-config", train_opt.config_path, "Training config JSON");
    train->add_option("--out", train_opt.out_path, "Output classifier params JSON")->required();
    train->add_option("--log", train_opt.log_path, "Training log CSV");
    auto* train_seed = train->add_option("--seed", train_opt.seed, "Override config seed");

    BenchOptions bench_opt;
    auto* bench = app.add_subcommand("bench", "Run sweeps over the synthetic corpus");
    bench->add_option("--suite", bench_opt.suite, "Corpus name (standard)");
    bench->add_option("--count", bench_opt.count, "Limit to the first N shapes");
    bench->add_option("--sweep", bench_opt.sweep_specs,
                      "Sweep spec name=v1,v2,... (repeatable)");
    bench->add_option("--config", bench_opt.config_path, "Base evolution config JSON");
    bench->add_option("--tau", bench_opt.tau, "Oracle sharpness (0 = hard indicator)");
    bench->add_option("--out", bench_opt.out_path, "Report CSV")->required();
    bench->add_option("--seed", bench_opt.seed, "Corpus master seed");

    EvalOptions eval_opt;
    auto* eval = app.add_subcommand("eval", "Compute boundary metrics for pred/gt pairs");
    eval->add_option("--pred", eval_opt.pred_path, "Predicted polygon JSON")->required();
    eval->add_option("--gt", eval_opt.gt_path, "Ground-truth polygon JSON")->required();
    eval->add_option("--out", eval_opt.out_path, "Metrics CSV")->required();

    ConvertOptions convert_opt;
    auto* convert = app.add_subcommand("convert", "Convert between masks and polygons");
    convert->add_option("--mask", convert_opt.mask_path, "PGM mask to vectorize");
    convert->add_option("--polygons", convert_opt.polygons_path, "Polygon JSON to rasterize");
    convert->add_option("--threshold", convert_opt.threshold, "Isocontour threshold");
    convert->add_option("--out", convert_opt.out_path, "Output file")->required();

    RenderOptions render_opt;
    auto* render = app.add_subcommand("render", "Render polygon JSON to SVG");
    render->add_option("--polygons", render_opt.polygons_path, "Polygon JSON")->required();
    render->add_option("--gt", render_opt.gt_path, "Ground-truth overlay");
    render->add_option("--out", render_opt.out_path, "Output SVG")->required();

    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::CallForHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    refine_opt.seed_set = refine_seed->count() > 0;
    train_opt.seed_set = train_seed->count() > 0;

    try {
        if (refine->parsed()) {
            return cmd_refine(refine_opt, out, err);
        }
        if (train->parsed()) {
            return cmd_train(train_opt, out, err);
        }
        if (bench->parsed()) {
            return cmd_bench(bench_opt, out, err);
        }
        if (eval->parsed()) {
            return cmd_eval(eval_opt, out, err);
        }
        if (convert->parsed()) {
            return cmd_convert(convert_opt, out, err);
        }
        if (render->parsed()) {
            return cmd_render(render_opt, out, err);
        }
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    } catch (const FileParseError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 4;
    }
    return 0;
}

}  // namespace sharpcontour
