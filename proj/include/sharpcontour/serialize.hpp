#pragma once

#include "sharpcontour/evolution.hpp"
#include "sharpcontour/fields.hpp"
#include "sharpcontour/geometry.hpp"
#include "sharpcontour/training.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace sharpcontour {

using Json = nlohmann::json;

// EvolutionConfig JSON carries exactly: lambda, max_steps, resolution,
// iterations, adaptive_step, freeze_epsilon, seed (midpoint_refine is an
// optional extra). Unknown keys are rejected.
Json to_json(const EvolutionConfig& cfg);
EvolutionConfig evolution_config_from_json(const Json& j);

Json to_json(const TrainConfig& cfg);
TrainConfig train_config_from_json(const Json& j);

// Classifier weights: {"dims":[F+2,H,H,H,1],
//                      "layers":[{"w":[[out x in]],"b":[out]} x 4]}.
Json to_json(const MlpParams& params);
MlpParams mlp_params_from_json(const Json& j);

// {"width","height","channels","data"} with data laid out as
// (row * width + col) * channels + channel.
Json to_json(const FeatureGrid& grid);
FeatureGrid feature_grid_from_json(const Json& j);

/// One segmented instance: hole rings follow the outer ring.
struct PolygonInstance {
    std::string id;
    std::vector<Polygon> rings;  // math coordinates in memory
};

/// Files store rings in image coordinates (y down) together with the
/// canvas size used for the flip; in memory everything is math
/// coordinates (y up).
struct PolygonDocument {
    int canvas_width = 0;
    int canvas_height = 0;
    std::vector<PolygonInstance> instances;
};

Json to_json(const PolygonDocument& doc);
PolygonDocument polygon_document_from_json(const Json& j);

std::string dump_json(const Json& j);

Json parse_json_file(const std::string& path);
void write_text_atomic(const std::string& path, const std::string& content);

}  // namespace sharpcontour
