#pragma once

#include "sharpcontour/fields.hpp"
#include "sharpcontour/geometry.hpp"

#include <cstdint>
#include <vector>

namespace sharpcontour {

struct EvolutionConfig {
    double lambda = 0.003;        // deformation ratio
    int max_steps = 10;           // M, probes per march
    int resolution = 128;         // N, polygon resolution
    int iterations = 3;           // n, evolution passes
    bool adaptive_step = true;    // scale the step by |phi - 0.5|
    double freeze_epsilon = 1e-4; // steps below this freeze the vertex
    std::uint64_t seed = 0;
    bool midpoint_refine = false; // place flipped vertices at the probe midpoint
};

/// Throws std::invalid_argument with a field-specific message.
void validate(const EvolutionConfig& cfg);

enum class VertexStatus { Active, Exhausted, Frozen };

struct VertexState {
    VertexStatus status = VertexStatus::Active;
    int steps = 0;          // m, probes taken
    double step_size = 0.0; // s, px per probe
};

/// Step size s = lambda * sqrt(A) * |p - 0.5|; with adaptive stepping off
/// the uncertainty factor is replaced by the constant 0.5.
double step_size(double box_area, double probability, const EvolutionConfig& cfg);

struct MarchResult {
    Point2 position;
    VertexStatus status = VertexStatus::Active;
    int steps = 0;
};

/// Discrete march from x along +/- normal: the field decides the
/// direction (outside marches inward), then probes x + k*s*d for
/// k = 1..max_steps and stops at the first probe strictly on the other
/// side of the 0.5 level (the flipping point). Returns Frozen at the
/// flip (or immediately when phi is exactly 0.5 or s < freeze_epsilon),
/// Exhausted at the cap.
MarchResult march_vertex(const ProbabilityField& field, const Point2& x, const Point2& normal,
                         double step, int max_steps, double freeze_epsilon = 1e-4,
                         bool midpoint_refine = false);

/// One evolution pass. Normals and step sizes come from the input contour
/// (Jacobi style), so vertices deform independently; frozen vertices are
/// copied through untouched.
std::pair<Polygon, std::vector<VertexState>> evolve_once(const Polygon& contour,
                                                         const ProbabilityField& field,
                                                         double box_area,
                                                         const EvolutionConfig& cfg,
                                                         std::vector<VertexState> states);

struct EvolutionTrace {
    std::vector<Polygon> contours;                   // C^(0) .. C^(n)
    std::vector<std::vector<VertexState>> states;    // per executed iteration
    double box_area = 0.0;

    const Polygon& final_contour() const { return contours.back(); }
    const std::vector<VertexState>& final_states() const { return states.back(); }
    double frozen_fraction() const;
};

/// Resamples the initial contour to cfg.resolution vertices, freezes the
/// bounding-box area A at C^(0), and runs evolve_once cfg.iterations
/// times (exiting early once every vertex is frozen).
EvolutionTrace evolve(const Polygon& initial, const ProbabilityField& field,
                      const EvolutionConfig& cfg);

}  // namespace sharpcontour
