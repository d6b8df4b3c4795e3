#include "sharpcontour/evolution.hpp"

#include <cmath>
#include <stdexcept>

namespace sharpcontour {

void validate(const EvolutionConfig& cfg) {
    if (!(cfg.lambda > 0.0)) {
        throw std::invalid_argument("lambda must be > 0");
    }
    if (cfg.max_steps < 1) {
        throw std::invalid_argument("max_steps must be >= 1");
    }
    if (cfg.resolution < 3) {
        throw std::invalid_argument("resolution must be >= 3");
    }
    if (cfg.iterations < 1) {
        throw std::invalid_argument("iterations must be >= 1");
    }
    if (!(cfg.freeze_epsilon >= 0.0)) {
        throw std::invalid_argument("freeze_epsilon must be >= 0");
    }
}

double step_size(double box_area, double probability, const EvolutionConfig& cfg) {
    if (!(box_area > 0.0)) {
        throw std::invalid_argument("step_size: box area must be > 0");
    }
    const double uncertainty = cfg.adaptive_step ? std::abs(probability - 0.5) : 0.5;
    return cfg.lambda * std::sqrt(box_area) * uncertainty;
}

MarchResult march_vertex(const ProbabilityField& field, const Point2& x, const Point2& normal,
                         double step, int max_steps, double freeze_epsilon,
                         bool midpoint_refine) {
    if (!normal.allFinite()) {
        throw std::invalid_argument("march_vertex: non-finite normal");
    }
    if (step < 0.0 || max_steps < 1) {
        throw std::invalid_argument("march_vertex: invalid step or cap");
    }

    const double phi0 = field.evaluate(x);
    if (phi0 == 0.5 || step < freeze_epsilon) {
        return {x, VertexStatus::Frozen, 0};
    }
    const double sign0 = phi0 > 0.5 ? 1.0 : -1.0;
    // Outside marches along the negative normal, inside along the positive.
    const Point2 dir = -sign0 * normal;

    for (int k = 1; k <= max_steps; ++k) {
        const Point2 probe = x + (static_cast<double>(k) * step) * dir;
        const double phi = field.evaluate(probe);
        const double s = phi > 0.5 ? 1.0 : (phi < 0.5 ? -1.0 : 0.0);
        // Flip only on a strict side change; a probe landing exactly on
        // the 0.5 level keeps marching.
        if (s == -sign0) {
            if (midpoint_refine) {
                const Point2 prev = x + (static_cast<double>(k - 1) * step) * dir;
                return {Point2(0.5 * (prev + probe)), VertexStatus::Frozen, k};
            }
            return {probe, VertexStatus::Frozen, k};
        }
    }
    const Point2 last = x + (static_cast<double>(max_steps) * step) * dir;
    return {last, VertexStatus::Exhausted, max_steps};
}

std::pair<Polygon, std::vector<VertexState>> evolve_once(const Polygon& contour,
                                                         const ProbabilityField& field,
                                                         double box_area,
                                                         const EvolutionConfig& cfg,
                                                         std::vector<VertexState> states) {
    validate(cfg);
    const int n = contour.size();
    if (static_cast<int>(states.size()) != n) {
        throw std::invalid_argument("evolve_once: state vector does not match contour");
    }

    Polygon out;
    out.vertices.resize(2, n);
    for (int i = 0; i < n; ++i) {
        if (states[i].status == VertexStatus::Frozen) {
            out.vertices.col(i) = contour.vertex(i);
            continue;
        }
        const Point2 x = contour.vertex(i);
        const Point2 normal = vertex_normal(contour, i);
        const double s = step_size(box_area, field.evaluate(x), cfg);
        const MarchResult res = march_vertex(field, x, normal, s, cfg.max_steps,
                                             cfg.freeze_epsilon, cfg.midpoint_refine);
        out.vertices.col(i) = res.position;
        states[i] = {res.status, res.steps, s};
    }
    return {std::move(out), std::move(states)};
}

double EvolutionTrace::frozen_fraction() const {
    if (states.empty()) {
        return 0.0;
    }
    const auto& last = states.back();
    int frozen = 0;
    for (const VertexState& s : last) {
        if (s.status == VertexStatus::Frozen) {
            ++frozen;
        }
    }
    return static_cast<double>(frozen) / static_cast<double>(last.size());
}

EvolutionTrace evolve(const Polygon& initial, const ProbabilityField& field,
                      const EvolutionConfig& cfg) {
    validate(cfg);
    EvolutionTrace trace;
    Polygon contour = resample(initial, cfg.resolution);
    trace.box_area = bbox(contour).area();
    trace.contours.push_back(contour);

    std::vector<VertexState> states(static_cast<size_t>(cfg.resolution));
    for (int it = 0; it < cfg.iterations; ++it) {
        auto [next, next_states] = evolve_once(contour, field, trace.box_area, cfg, states);
        contour = std::move(next);
        states = std::move(next_states);
        trace.contours.push_back(contour);
        trace.states.push_back(states);

        bool all_frozen = true;
        for (const VertexState& s : states) {
            if (s.status != VertexStatus::Frozen) {
                all_frozen = false;
                break;
            }
        }
        if (all_frozen) {
            break;
        }
    }
    return trace;
}

}  // namespace sharpcontour
