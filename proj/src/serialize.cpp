#include "sharpcontour/serialize.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace sharpcontour {

namespace {

void check_keys(const Json& j, const std::set<std::string>& allowed, const char* context) {
    if (!j.is_object()) {
        throw std::runtime_error(std::string(context) + ": expected a JSON object");
    }
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!allowed.count(it.key())) {
            throw std::runtime_error(std::string(context) + ": unknown field '" + it.key() +
                                     "'");
        }
    }
}

template <typename T>
T get_or(const Json& j, const char* key, T fallback) {
    if (!j.contains(key)) {
        return fallback;
    }
    return j.at(key).get<T>();
}

}  // namespace

Json to_json(const EvolutionConfig& cfg) {
    Json j{{"lambda", cfg.lambda},
           {"max_steps", cfg.max_steps},
           {"resolution", cfg.resolution},
           {"iterations", cfg.iterations},
           {"adaptive_step", cfg.adaptive_step},
           {"freeze_epsilon", cfg.freeze_epsilon},
           {"seed", cfg.seed}};
    if (cfg.midpoint_refine) {
        j["midpoint_refine"] = true;
    }
    return j;
}

EvolutionConfig evolution_config_from_json(const Json& j) {
    check_keys(j,
               {"lambda", "max_steps", "resolution", "iterations", "adaptive_step",
                "freeze_epsilon", "seed", "midpoint_refine"},
               "evolution config");
    EvolutionConfig cfg;
    cfg.lambda = get_or(j, "lambda", cfg.lambda);
    cfg.max_steps = get_or(j, "max_steps", cfg.max_steps);
    cfg.resolution = get_or(j, "resolution", cfg.resolution);
    cfg.iterations = get_or(j, "iterations", cfg.iterations);
    cfg.adaptive_step = get_or(j, "adaptive_step", cfg.adaptive_step);
    cfg.freeze_epsilon = get_or(j, "freeze_epsilon", cfg.freeze_epsilon);
    cfg.seed = get_or(j, "seed", cfg.seed);
    cfg.midpoint_refine = get_or(j, "midpoint_refine", cfg.midpoint_refine);
    return cfg;
}

Json to_json(const TrainConfig& cfg) {
    return Json{{"gamma", cfg.gamma},
                {"band_fraction", cfg.band_fraction},
                {"samples_per_instance", cfg.samples_per_instance},
                {"learning_rate", cfg.learning_rate},
                {"epochs", cfg.epochs},
                {"batch_size", cfg.batch_size},
                {"prob_clamp", cfg.prob_clamp},
                {"seed", cfg.seed},
                {"alpha_mode", cfg.alpha_mode == AlphaMode::NegativeFraction ? "neg_fraction"
                                                                             : "pos_fraction"}};
}

TrainConfig train_config_from_json(const Json& j) {
    check_keys(j,
               {"gamma", "band_fraction", "samples_per_instance", "learning_rate", "epochs",
                "batch_size", "prob_clamp", "seed", "alpha_mode"},
               "train config");
    TrainConfig cfg;
    cfg.gamma = get_or(j, "gamma", cfg.gamma);
    cfg.band_fraction = get_or(j, "band_fraction", cfg.band_fraction);
    cfg.samples_per_instance = get_or(j, "samples_per_instance", cfg.samples_per_instance);
    cfg.learning_rate = get_or(j, "learning_rate", cfg.learning_rate);
    cfg.epochs = get_or(j, "epochs", cfg.epochs);
    cfg.batch_size = get_or(j, "batch_size", cfg.batch_size);
    cfg.prob_clamp = get_or(j, "prob_clamp", cfg.prob_clamp);
    cfg.seed = get_or(j, "seed", cfg.seed);
    const std::string mode = get_or<std::string>(j, "alpha_mode", "neg_fraction");
    if (mode == "neg_fraction") {
        cfg.alpha_mode = AlphaMode::NegativeFraction;
    } else if (mode == "pos_fraction") {
        cfg.alpha_mode = AlphaMode::PositiveFraction;
    } else {
        throw std::runtime_error("train config: alpha_mode must be neg_fraction or pos_fraction");
    }
    return cfg;
}

Json to_json(const MlpParams& params) {
    Json layers = Json::array();
    for (size_t l = 0; l < params.weights.size(); ++l) {
        const auto& w = params.weights[l];
        Json rows = Json::array();
        for (int i = 0; i < w.rows(); ++i) {
            Json row = Json::array();
            for (int j = 0; j < w.cols(); ++j) {
                row.push_back(w(i, j));
            }
            rows.push_back(std::move(row));
        }
        Json b = Json::array();
        for (int i = 0; i < params.biases[l].size(); ++i) {
            b.push_back(params.biases[l](i));
        }
        layers.push_back(Json{{"w", std::move(rows)}, {"b", std::move(b)}});
    }
    Json dims = Json::array();
    for (int d : params.dims()) {
        dims.push_back(d);
    }
    return Json{{"dims", std::move(dims)}, {"layers", std::move(layers)}};
}

MlpParams mlp_params_from_json(const Json& j) {
    check_keys(j, {"dims", "layers"}, "classifier params");
    if (!j.contains("dims") || !j.contains("layers")) {
        throw std::runtime_error("classifier params: missing dims or layers");
    }
    const std::vector<int> dims = j.at("dims").get<std::vector<int>>();
    if (dims.size() < 2) {
        throw std::runtime_error("classifier params: need at least two dims");
    }
    const Json& layers = j.at("layers");
    if (!layers.is_array() || layers.size() != dims.size() - 1) {
        throw std::runtime_error("classifier params: layer count does not match dims");
    }
    MlpParams params = MlpParams::zeros(dims);
    for (size_t l = 0; l < layers.size(); ++l) {
        const Json& layer = layers[l];
        check_keys(layer, {"w", "b"}, "classifier layer");
        const Json& w = layer.at("w");
        const Json& b = layer.at("b");
        if (static_cast<int>(w.size()) != dims[l + 1]) {
            throw std::runtime_error("classifier params: weight rows mismatch in layer " +
                                     std::to_string(l));
        }
        for (int i = 0; i < dims[l + 1]; ++i) {
            const Json& row = w[i];
            if (static_cast<int>(row.size()) != dims[l]) {
                throw std::runtime_error("classifier params: weight cols mismatch in layer " +
                                         std::to_string(l));
            }
            for (int c = 0; c < dims[l]; ++c) {
                params.weights[l](i, c) = row[c].get<double>();
            }
        }
        if (static_cast<int>(b.size()) != dims[l + 1]) {
            throw std::runtime_error("classifier params: bias size mismatch in layer " +
                                     std::to_string(l));
        }
        for (int i = 0; i < dims[l + 1]; ++i) {
            params.biases[l](i) = b[i].get<double>();
        }
    }
    if (!params.all_finite()) {
        throw std::runtime_error("classifier params: non-finite values");
    }
    return params;
}

Json to_json(const FeatureGrid& grid) {
    Json data = Json::array();
    for (int r = 0; r < grid.height; ++r) {
        for (int c = 0; c < grid.width; ++c) {
            const auto col = grid.data.col(static_cast<Eigen::Index>(r) * grid.width + c);
            for (int ch = 0; ch < grid.channels; ++ch) {
                data.push_back(col(ch));
            }
        }
    }
    return Json{{"width", grid.width},
                {"height", grid.height},
                {"channels", grid.channels},
                {"data", std::move(data)}};
}

FeatureGrid feature_grid_from_json(const Json& j) {
    check_keys(j, {"width", "height", "channels", "data"}, "feature grid");
    FeatureGrid grid;
    grid.width = j.at("width").get<int>();
    grid.height = j.at("height").get<int>();
    grid.channels = j.at("channels").get<int>();
    if (grid.width < 1 || grid.height < 1 || grid.channels < 1) {
        throw std::runtime_error("feature grid: non-positive dimensions");
    }
    const Json& data = j.at("data");
    const size_t expected =
        static_cast<size_t>(grid.width) * grid.height * grid.channels;
    if (data.size() != expected) {
        throw std::runtime_error("feature grid: expected " + std::to_string(expected) +
                                 " values, got " + std::to_string(data.size()));
    }
    grid.data.resize(grid.channels, static_cast<Eigen::Index>(grid.width) * grid.height);
    size_t idx = 0;
    for (int r = 0; r < grid.height; ++r) {
        for (int c = 0; c < grid.width; ++c) {
            for (int ch = 0; ch < grid.channels; ++ch) {
                grid.data(ch, static_cast<Eigen::Index>(r) * grid.width + c) =
                    data[idx++].get<double>();
            }
        }
    }
    return grid;
}

Json to_json(const PolygonDocument& doc) {
    Json instances = Json::array();
    const double h = doc.canvas_height;
    for (const PolygonInstance& inst : doc.instances) {
        Json contours = Json::array();
        double min_x = std::numeric_limits<double>::infinity();
        double min_y = min_x;
        double max_x = -min_x;
        double max_y = -min_x;
        for (const Polygon& ring : inst.rings) {
            Json points = Json::array();
            for (int i = 0; i < ring.size(); ++i) {
                const double x = ring.vertex(i).x();
                const double y_img = h - ring.vertex(i).y();
                points.push_back(Json::array({x, y_img}));
                min_x = std::min(min_x, x);
                max_x = std::max(max_x, x);
                min_y = std::min(min_y, y_img);
                max_y = std::max(max_y, y_img);
            }
            contours.push_back(std::move(points));
        }
        instances.push_back(Json{{"id", inst.id},
                                 {"bbox", Json::array({min_x, min_y, max_x - min_x,
                                                       max_y - min_y})},
                                 {"contours", std::move(contours)}});
    }
    return Json{{"coordinate_convention", "image"},
                {"canvas", Json::array({doc.canvas_width, doc.canvas_height})},
                {"instances", std::move(instances)}};
}

PolygonDocument polygon_document_from_json(const Json& j) {
    check_keys(j, {"coordinate_convention", "canvas", "instances"}, "polygon document");
    if (j.contains("coordinate_convention") &&
        j.at("coordinate_convention").get<std::string>() != "image") {
        throw std::runtime_error("polygon document: coordinate_convention must be \"image\"");
    }
    if (!j.contains("canvas")) {
        throw std::runtime_error("polygon document: missing canvas [width, height]");
    }
    PolygonDocument doc;
    doc.canvas_width = j.at("canvas").at(0).get<int>();
    doc.canvas_height = j.at("canvas").at(1).get<int>();
    if (doc.canvas_width < 1 || doc.canvas_height < 1) {
        throw std::runtime_error("polygon document: non-positive canvas");
    }
    if (!j.contains("instances")) {
        return doc;
    }
    const double h = doc.canvas_height;
    for (const Json& inst_json : j.at("instances")) {
        check_keys(inst_json, {"id", "bbox", "contours"}, "polygon instance");
        PolygonInstance inst;
        if (inst_json.contains("id")) {
            const Json& id = inst_json.at("id");
            inst.id = id.is_string() ? id.get<std::string>() : id.dump();
        }
        double min_x = std::numeric_limits<double>::infinity();
        double min_y = min_x;
        double max_x = -min_x;
        double max_y = -min_x;
        for (const Json& ring_json : inst_json.at("contours")) {
            if (ring_json.size() < 3) {
                throw std::runtime_error("polygon document: ring with fewer than 3 points");
            }
            Polygon ring;
            ring.vertices.resize(2, static_cast<int>(ring_json.size()));
            for (size_t i = 0; i < ring_json.size(); ++i) {
                const double x = ring_json[i].at(0).get<double>();
                const double y_img = ring_json[i].at(1).get<double>();
                min_x = std::min(min_x, x);
                max_x = std::max(max_x, x);
                min_y = std::min(min_y, y_img);
                max_y = std::max(max_y, y_img);
                ring.vertices.col(static_cast<int>(i)) = Point2(x, h - y_img);
            }
            validate_polygon(ring);
            inst.rings.push_back(std::move(ring));
        }
        if (inst_json.contains("bbox")) {
            const Json& bb = inst_json.at("bbox");
            const double bx = bb.at(0).get<double>();
            const double by = bb.at(1).get<double>();
            const double bw = bb.at(2).get<double>();
            const double bh = bb.at(3).get<double>();
            if (std::abs(bx - min_x) > 1e-6 || std::abs(by - min_y) > 1e-6 ||
                std::abs(bw - (max_x - min_x)) > 1e-6 || std::abs(bh - (max_y - min_y)) > 1e-6) {
                throw std::runtime_error("polygon document: bbox of instance '" + inst.id +
                                         "' is inconsistent with its contours");
            }
        }
        doc.instances.push_back(std::move(inst));
    }
    return doc;
}

std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

Json parse_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path);
    }
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

void write_text_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot write " + tmp);
        }
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace sharpcontour
