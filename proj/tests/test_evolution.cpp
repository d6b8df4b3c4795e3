#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sharpcontour/evolution.hpp"
#include "sharpcontour/fields.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace sharpcontour;

namespace {

Polygon circle_polygon(const Point2& centre, double radius, int n = 720) {
    Polygon p;
    p.vertices.resize(2, n);
    for (int i = 0; i < n; ++i) {
        const double a = 2.0 * std::numbers::pi * i / n;
        p.vertices.col(i) = centre + radius * Point2(std::cos(a), std::sin(a));
    }
    return p;
}

// Exact analytic circle indicator, independent of the polygon machinery.
class HardCircleField final : public ProbabilityField {
public:
    HardCircleField(Point2 centre, double radius) : centre_(centre), radius_(radius) {}
    double evaluate(const Point2& q) const override {
        const double r = (q - centre_).norm();
        if (r > radius_) return 1.0;
        if (r < radius_) return 0.0;
        return 0.5;
    }

private:
    Point2 centre_;
    double radius_;
};

// Hard half-plane indicator: outside where u . q > b.
class HalfPlaneField final : public ProbabilityField {
public:
    HalfPlaneField(Point2 u, double b) : u_(u), b_(b) {}
    double evaluate(const Point2& q) const override {
        const double s = u_.dot(q) - b_;
        if (s > 0.0) return 1.0;
        if (s < 0.0) return 0.0;
        return 0.5;
    }

private:
    Point2 u_;
    double b_;
};

}  // namespace

TEST_CASE("config validation messages") {
    EvolutionConfig cfg;
    cfg.lambda = 0.0;
    CHECK_THROWS_WITH_AS(validate(cfg), "lambda must be > 0", std::invalid_argument);
    cfg = EvolutionConfig{};
    cfg.max_steps = 0;
    CHECK_THROWS_WITH_AS(validate(cfg), "max_steps must be >= 1", std::invalid_argument);
    cfg = EvolutionConfig{};
    cfg.resolution = 2;
    CHECK_THROWS_WITH_AS(validate(cfg), "resolution must be >= 3", std::invalid_argument);
    cfg = EvolutionConfig{};
    cfg.iterations = 0;
    CHECK_THROWS_WITH_AS(validate(cfg), "iterations must be >= 1", std::invalid_argument);
}

TEST_CASE("step_size: formula arithmetic") {
    EvolutionConfig cfg;  // lambda 0.003, adaptive on
    CHECK(step_size(10000.0, 1.0, cfg) == doctest::Approx(0.15).epsilon(1e-12));
    CHECK(step_size(10000.0, 0.5, cfg) == 0.0);
    CHECK(step_size(10000.0, 0.75, cfg) == doctest::Approx(0.075).epsilon(1e-12));
    cfg.adaptive_step = false;
    CHECK(step_size(10000.0, 0.75, cfg) == doctest::Approx(0.15).epsilon(1e-12));
    CHECK_THROWS_AS(step_size(0.0, 0.5, cfg), std::invalid_argument);
    CHECK_THROWS_AS(step_size(-1.0, 0.5, cfg), std::invalid_argument);
}

TEST_CASE("step_size: bounded and monotone in |phi - 0.5|") {
    EvolutionConfig cfg;
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double prev = -1.0;
    for (double u = 0.0; u <= 0.5; u += 0.01) {
        const double s = step_size(40000.0, 0.5 + u, cfg);
        CHECK(s >= prev);
        CHECK(s <= 0.5 * cfg.lambda * 200.0 + 1e-12);
        prev = s;
    }
    for (int t = 0; t < 1000; ++t) {
        const double p = unit(rng);
        const double area = 1.0 + 1e6 * unit(rng);
        CHECK(step_size(area, p, cfg) <= 0.5 * cfg.lambda * std::sqrt(area) + 1e-12);
    }
}

TEST_CASE("march_vertex: cap reached on the hard circle") {
    const HardCircleField field(Point2(0, 0), 50.0);
    const MarchResult r = march_vertex(field, Point2(52, 0), Point2(1, 0), 0.15, 10);
    CHECK(r.status == VertexStatus::Exhausted);
    CHECK(r.steps == 10);
    CHECK(r.position.x() == doctest::Approx(50.5).epsilon(1e-12));
    CHECK(r.position.y() == 0.0);
}

TEST_CASE("march_vertex: flips at the first probe past the boundary") {
    const HardCircleField field(Point2(0, 0), 50.0);
    const MarchResult r = march_vertex(field, Point2(50.6, 0), Point2(1, 0), 0.15, 10);
    CHECK(r.status == VertexStatus::Frozen);
    CHECK(r.steps == 5);
    CHECK(r.position.x() == doctest::Approx(49.85).epsilon(1e-9));
}

TEST_CASE("march_vertex: starting on the boundary freezes immediately") {
    const Polygon circle = circle_polygon(Point2(0, 0), 50.0);
    const AnalyticOracleField field(circle, 0.0);
    const Point2 on_boundary = circle.vertex(13);
    const MarchResult r = march_vertex(field, on_boundary, Point2(1, 0), 0.2, 10);
    CHECK(r.status == VertexStatus::Frozen);
    CHECK(r.steps == 0);
    CHECK((r.position - on_boundary).norm() == 0.0);
}

TEST_CASE("march_vertex: inside points march outward") {
    const HardCircleField field(Point2(0, 0), 50.0);
    // Inside, radial normal: direction must be +normal.
    const MarchResult r = march_vertex(field, Point2(49.5, 0), Point2(1, 0), 0.2, 10);
    CHECK(r.status == VertexStatus::Frozen);
    CHECK(r.position.x() > 50.0);
}

TEST_CASE("march_vertex: tiny steps freeze, bad normals throw") {
    const HardCircleField field(Point2(0, 0), 50.0);
    const MarchResult r = march_vertex(field, Point2(60, 0), Point2(1, 0), 1e-7, 10);
    CHECK(r.status == VertexStatus::Frozen);
    CHECK(r.steps == 0);
    const Point2 bad(std::numeric_limits<double>::quiet_NaN(), 0.0);
    CHECK_THROWS_WITH_AS(march_vertex(field, Point2(60, 0), bad, 0.1, 10),
                         doctest::Contains("non-finite normal"), std::invalid_argument);
}

TEST_CASE("march_vertex: midpoint refinement halves the overshoot") {
    const HardCircleField field(Point2(0, 0), 50.0);
    const MarchResult r =
        march_vertex(field, Point2(50.6, 0), Point2(1, 0), 0.15, 10, 1e-4, true);
    CHECK(r.status == VertexStatus::Frozen);
    CHECK(r.steps == 5);
    // Midpoint of probes 4 and 5.
    CHECK(r.position.x() == doctest::Approx(49.925).epsilon(1e-9));
}

TEST_CASE("flipping point equals exhaustive probing on fuzzed monotone rays") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::uniform_real_distribution<double> spos(0.01, 2.0);
    std::uniform_int_distribution<int> steps(1, 20);
    int checked = 0;
    for (int t = 0; t < 1000; ++t) {
        const Point2 u = Point2(unit(rng), unit(rng)).normalized();
        const double b = 3.0 * unit(rng);
        const HalfPlaneField field(u, b);
        const Point2 x(5.0 * unit(rng), 5.0 * unit(rng));
        const Point2 normal = Point2(unit(rng), unit(rng)).normalized();
        const double s = spos(rng);
        const int m = steps(rng);

        const double phi0 = field.evaluate(x);
        if (phi0 == 0.5) {
            continue;
        }
        const double y0 = phi0 > 0.5 ? 1.0 : -1.0;
        const Point2 d = -y0 * normal;
        // Exhaustive probing oracle: first probe strictly on the other side.
        int first_flip = m;
        VertexStatus expected_status = VertexStatus::Exhausted;
        for (int k = 1; k <= m; ++k) {
            const Point2 probe = x + (static_cast<double>(k) * s) * d;
            const double phi = field.evaluate(probe);
            const double sign = phi > 0.5 ? 1.0 : (phi < 0.5 ? -1.0 : 0.0);
            if (sign == -y0) {
                first_flip = k;
                expected_status = VertexStatus::Frozen;
                break;
            }
        }
        const MarchResult r = march_vertex(field, x, normal, s, m);
        CHECK(r.steps == first_flip);
        CHECK(r.status == expected_status);
        ++checked;
    }
    CHECK(checked > 900);
}

TEST_CASE("evolve_once: fully frozen contour is untouched") {
    const HardCircleField field(Point2(0, 0), 50.0);
    const Polygon c = circle_polygon(Point2(0, 0), 52.0, 32);
    std::vector<VertexState> states(32, VertexState{VertexStatus::Frozen, 3, 0.1});
    EvolutionConfig cfg;
    auto [next, next_states] = evolve_once(c, field, 104.0 * 104.0, cfg, states);
    CHECK((next.vertices - c.vertices).cwiseAbs().maxCoeff() == 0.0);
    for (const VertexState& s : next_states) {
        CHECK(s.status == VertexStatus::Frozen);
        CHECK(s.steps == 3);
    }
}

TEST_CASE("evolve_once: symmetric ring marches inward by exactly M*s") {
    const HardCircleField field(Point2(0, 0), 50.0);
    const Polygon c = circle_polygon(Point2(0, 0), 52.0, 128);
    const double area = 104.0 * 104.0;
    EvolutionConfig cfg;  // lambda 0.003, M 10
    std::vector<VertexState> states(128);
    auto [next, next_states] = evolve_once(c, field, area, cfg, states);
    const double expected_move = 10.0 * 0.003 * 104.0 * 0.5;  // 1.56 px
    for (int i = 0; i < 128; ++i) {
        CHECK(next_states[i].status == VertexStatus::Exhausted);
        CHECK(next_states[i].steps == 10);
        const double moved = (c.vertex(i) - next.vertex(i)).norm();
        CHECK(moved == doctest::Approx(expected_move).epsilon(1e-9));
        CHECK(next.vertex(i).norm() == doctest::Approx(52.0 - expected_move).epsilon(1e-9));
    }
}

TEST_CASE("evolve_once: matches a per-vertex scalar reference on a mixed contour") {
    const HardCircleField field(Point2(0, 0), 50.0);
    // Perturbed ring with vertices on both sides of the boundary.
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> dr(-3.0, 3.0);
    Polygon c;
    c.vertices.resize(2, 64);
    for (int i = 0; i < 64; ++i) {
        const double a = 2.0 * std::numbers::pi * i / 64;
        c.vertices.col(i) = (50.0 + dr(rng)) * Point2(std::cos(a), std::sin(a));
    }
    const double area = bbox(c).area();
    EvolutionConfig cfg;
    std::vector<VertexState> states(64);
    auto [next, next_states] = evolve_once(c, field, area, cfg, states);

    for (int i = 0; i < 64; ++i) {
        // Reference: recompute the full update for vertex i from scratch.
        const Point2 x = c.vertex(i);
        const Point2 n = vertex_normal(c, i);
        const double phi = field.evaluate(x);
        const double s = cfg.lambda * std::sqrt(area) * std::abs(phi - 0.5);
        const MarchResult r = march_vertex(field, x, n, s, cfg.max_steps, cfg.freeze_epsilon);
        CHECK((next.vertex(i) - r.position).norm() == 0.0);
        CHECK(next_states[i].status == r.status);
        CHECK(next_states[i].steps == r.steps);
        // Outside vertices move inward, inside vertices outward.
        if (phi > 0.5) {
            CHECK(next.vertex(i).norm() < x.norm() + 1e-12);
        } else if (phi < 0.5) {
            CHECK(next.vertex(i).norm() > x.norm() - 1e-12);
        }
    }
}

TEST_CASE("evolve_once: index rotation equivariance (vertex independence)") {
    const HardCircleField field(Point2(3, -2), 40.0);
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> dr(-2.0, 2.0);
    Polygon c;
    c.vertices.resize(2, 48);
    for (int i = 0; i < 48; ++i) {
        const double a = 2.0 * std::numbers::pi * i / 48;
        c.vertices.col(i) = Point2(3, -2) + (40.0 + dr(rng)) * Point2(std::cos(a), std::sin(a));
    }
    Polygon rotated;
    rotated.vertices.resize(2, 48);
    const int shift = 17;
    for (int i = 0; i < 48; ++i) {
        rotated.vertices.col(i) = c.vertices.col((i + shift) % 48);
    }
    EvolutionConfig cfg;
    const double area = bbox(c).area();
    auto [next, s1] = evolve_once(c, field, area, cfg, std::vector<VertexState>(48));
    auto [next_rot, s2] = evolve_once(rotated, field, area, cfg, std::vector<VertexState>(48));
    for (int i = 0; i < 48; ++i) {
        CHECK((next_rot.vertex(i) - next.vertex((i + shift) % 48)).norm() == 0.0);
    }
}

TEST_CASE("evolve: n=1 equals evolve_once on the resampled input") {
    const HardCircleField field(Point2(0, 0), 50.0);
    const Polygon c0 = circle_polygon(Point2(0, 0), 52.0, 300);
    EvolutionConfig cfg;
    cfg.iterations = 1;
    const EvolutionTrace trace = evolve(c0, field, cfg);
    REQUIRE(trace.contours.size() == 2);

    const Polygon resampled = resample(c0, cfg.resolution);
    auto [expected, states] = evolve_once(resampled, field, bbox(resampled).area(), cfg,
                                          std::vector<VertexState>(cfg.resolution));
    CHECK((trace.final_contour().vertices - expected.vertices).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("evolve: dilated circle converges onto the oracle boundary") {
    const Polygon gt = circle_polygon(Point2(0, 0), 50.0);
    const AnalyticOracleField field(gt, 0.0);
    const Polygon c0 = circle_polygon(Point2(0, 0), 52.0, 256);
    EvolutionConfig cfg;  // defaults: 3 iterations
    const EvolutionTrace trace = evolve(c0, field, cfg);
    const Polygon& final = trace.final_contour();

    double mean = 0.0;
    for (int i = 0; i < final.size(); ++i) {
        mean += std::abs(signed_distance(gt, final.vertex(i)));
    }
    mean /= final.size();
    CHECK(mean <= 0.2);
    CHECK(trace.frozen_fraction() >= 0.95);
}

TEST_CASE("evolve: larger lambda overshoots more") {
    const Polygon gt = circle_polygon(Point2(0, 0), 50.0);
    const AnalyticOracleField field(gt, 0.0);
    const Polygon c0 = circle_polygon(Point2(0, 0), 52.0, 256);
    auto mean_err = [&](double lambda) {
        EvolutionConfig cfg;
        cfg.lambda = lambda;
        const EvolutionTrace trace = evolve(c0, field, cfg);
        double mean = 0.0;
        for (int i = 0; i < trace.final_contour().size(); ++i) {
            mean += std::abs(signed_distance(gt, trace.final_contour().vertex(i)));
        }
        return mean / trace.final_contour().size();
    };
    CHECK(mean_err(0.006) > mean_err(0.003));
}

TEST_CASE("evolve: invariants on the trace") {
    const Polygon gt = circle_polygon(Point2(0, 0), 40.0);
    const AnalyticOracleField field(gt, 0.0);
    Polygon c0 = circle_polygon(Point2(0, 0), 43.0, 200);
    EvolutionConfig cfg;
    cfg.iterations = 4;
    const EvolutionTrace trace = evolve(c0, field, cfg);

    const double bound = cfg.max_steps * 0.5 * cfg.lambda * std::sqrt(trace.box_area) + 1e-12;
    for (size_t k = 0; k < trace.states.size(); ++k) {
        const Polygon& before = trace.contours[k];
        const Polygon& after = trace.contours[k + 1];
        REQUIRE(before.size() == cfg.resolution);
        REQUIRE(after.size() == cfg.resolution);
        for (int i = 0; i < cfg.resolution; ++i) {
            CHECK((after.vertex(i) - before.vertex(i)).norm() <= bound);
        }
    }
    // Frozen persistence: once frozen, positions never change again.
    for (size_t k = 0; k + 1 < trace.states.size(); ++k) {
        for (int i = 0; i < cfg.resolution; ++i) {
            if (trace.states[k][i].status == VertexStatus::Frozen) {
                CHECK(trace.states[k + 1][i].status == VertexStatus::Frozen);
                CHECK((trace.contours[k + 1].vertex(i) - trace.contours[k + 2].vertex(i))
                          .norm() == 0.0);
            }
        }
    }
    // VertexStatus bookkeeping invariants.
    for (const auto& states : trace.states) {
        for (const VertexState& s : states) {
            if (s.status == VertexStatus::Exhausted) {
                CHECK(s.steps == cfg.max_steps);
            } else if (s.status == VertexStatus::Frozen) {
                CHECK(s.steps <= cfg.max_steps);
            }
        }
    }
}

TEST_CASE("evolve: adaptive step never loses to fixed step on the hard oracle") {
    const Polygon gt = circle_polygon(Point2(0, 0), 50.0);
    const AnalyticOracleField field(gt, 0.0);
    const Polygon c0 = circle_polygon(Point2(0, 0), 53.0, 256);
    auto mean_err = [&](bool adaptive) {
        EvolutionConfig cfg;
        cfg.adaptive_step = adaptive;
        const EvolutionTrace trace = evolve(c0, field, cfg);
        double mean = 0.0;
        for (int i = 0; i < trace.final_contour().size(); ++i) {
            mean += std::abs(signed_distance(gt, trace.final_contour().vertex(i)));
        }
        return mean / trace.final_contour().size();
    };
    // On a hard indicator |phi - 0.5| is 0.5 off the boundary, so both
    // modes are identical.
    CHECK(mean_err(true) <= mean_err(false) + 1e-9);
}
