#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sharpcontour/harness.hpp"
#include "sharpcontour/training.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace sharpcontour;

namespace {

Polygon square_ring(double side, const Point2& origin) {
    Polygon p;
    p.vertices.resize(2, 4);
    p.vertices.col(0) = origin;
    p.vertices.col(1) = origin + Point2(side, 0);
    p.vertices.col(2) = origin + Point2(side, side);
    p.vertices.col(3) = origin + Point2(0, side);
    return p;
}

std::vector<TrainingSample> random_batch(int n, int feature_dim, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::bernoulli_distribution label(0.5);
    std::vector<TrainingSample> batch(n);
    for (TrainingSample& s : batch) {
        s.feature = Eigen::VectorXd::NullaryExpr(feature_dim, [&](Eigen::Index) {
            return unit(rng);
        });
        s.coords = Eigen::Vector2d(unit(rng), unit(rng));
        s.label = label(rng) ? 1 : 0;
        s.point = Point2(0, 0);
    }
    return batch;
}

// Central finite differences over the flattened parameters.
Eigen::VectorXd fd_gradient(const IpcParams& params, std::span<const TrainingSample> batch,
                            double alpha, double gamma, double h = 1e-5) {
    const std::vector<int> dims = params.dims();
    const Eigen::VectorXd theta = params.flatten();
    Eigen::VectorXd g(theta.size());
    for (Eigen::Index i = 0; i < theta.size(); ++i) {
        Eigen::VectorXd tp = theta;
        Eigen::VectorXd tm = theta;
        tp(i) += h;
        tm(i) -= h;
        const double lp = batch_loss(MlpParams::from_flat(dims, tp), batch, alpha, gamma);
        const double lm = batch_loss(MlpParams::from_flat(dims, tm), batch, alpha, gamma);
        g(i) = (lp - lm) / (2.0 * h);
    }
    return g;
}

}  // namespace

TEST_CASE("sample_boundary_points: square band") {
    const Polygon gt = square_ring(100.0, Point2(10, 10));
    const MaskGrid mask = rasterize(gt, 128, 128);
    const FeatureGrid grid = make_synthetic_features(mask, 16, 3);
    TrainConfig cfg;
    cfg.band_fraction = 0.05;  // band = 5 px for the 100x100 box
    std::mt19937_64 rng(77);
    const auto samples = sample_boundary_points(gt, grid, cfg, rng);
    REQUIRE(static_cast<int>(samples.size()) == cfg.samples_per_instance);
    for (const TrainingSample& s : samples) {
        CHECK(distance_to_polyline(gt, s.point) <= 5.0);
        // Labels match an independent even-odd containment check.
        CHECK(s.label == (point_in_polygon(gt, s.point) ? 0 : 1));
    }
}

TEST_CASE("sample_boundary_points: deterministic for a fixed seed") {
    const Polygon gt = square_ring(60.0, Point2(4, 4));
    const MaskGrid mask = rasterize(gt, 72, 72);
    const FeatureGrid grid = make_synthetic_features(mask, 16, 5);
    TrainConfig cfg;
    cfg.samples_per_instance = 64;
    std::mt19937_64 rng_a(123);
    std::mt19937_64 rng_b(123);
    const auto a = sample_boundary_points(gt, grid, cfg, rng_a);
    const auto b = sample_boundary_points(gt, grid, cfg, rng_b);
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].point.x() == b[i].point.x());
        CHECK(a[i].point.y() == b[i].point.y());
        CHECK(a[i].label == b[i].label);
    }
}

TEST_CASE("sample_boundary_points: impossibly thin band errors") {
    const Polygon gt = square_ring(60.0, Point2(4, 4));
    const MaskGrid mask = rasterize(gt, 72, 72);
    const FeatureGrid grid = make_synthetic_features(mask, 16, 5);
    TrainConfig cfg;
    cfg.band_fraction = 1e-12;
    std::mt19937_64 rng(9);
    CHECK_THROWS_WITH_AS(sample_boundary_points(gt, grid, cfg, rng),
                         doctest::Contains("10000 tries"), std::runtime_error);
}

TEST_CASE("dynamic_alpha") {
    auto batch_with = [](int pos, int neg) {
        std::vector<TrainingSample> batch(pos + neg);
        for (int i = 0; i < pos + neg; ++i) {
            batch[i].label = i < pos ? 1 : 0;
        }
        return batch;
    };
    CHECK(dynamic_alpha(batch_with(256, 256)) == 0.5);
    CHECK(dynamic_alpha(batch_with(100, 300)) == doctest::Approx(0.75));
    CHECK(dynamic_alpha(batch_with(400, 0)) == 0.0);
    CHECK(dynamic_alpha(batch_with(100, 300), AlphaMode::PositiveFraction) ==
          doctest::Approx(0.25));
    CHECK_THROWS_AS(dynamic_alpha({}), std::invalid_argument);
}

TEST_CASE("focal_loss: plug-in arithmetic") {
    // Confident and correct: loss vanishes.
    CHECK(focal_loss(1.0 - 1e-7, 1, 0.25, 2.0) < 1e-5);
    // y=1, p=0.5, alpha=0.5, gamma=2.
    CHECK(focal_loss(0.5, 1, 0.5, 2.0) ==
          doctest::Approx(0.5 * 0.25 * (-std::log(0.5))).epsilon(1e-12));
    CHECK(focal_loss(0.5, 1, 0.5, 2.0) == doctest::Approx(0.0866).epsilon(1e-3));
    // y=0, p=0.9, alpha=0.25, gamma=2.
    CHECK(focal_loss(0.9, 0, 0.25, 2.0) ==
          doctest::Approx(0.75 * 0.81 * (-std::log(0.1))).epsilon(1e-12));
    CHECK(focal_loss(0.9, 0, 0.25, 2.0) == doctest::Approx(1.3988).epsilon(1e-3));
}

TEST_CASE("focal_loss: gamma=0 reduces to alpha-weighted cross entropy") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> prob(1e-6, 1.0 - 1e-6);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int t = 0; t < 100; ++t) {
        const double p = prob(rng);
        const double alpha = unit(rng);
        const int y = unit(rng) > 0.5 ? 1 : 0;
        const double eps = 1e-7;
        const double pc = std::clamp(p, eps, 1.0 - eps);
        const double ce = y == 1 ? -alpha * std::log(pc) : -(1.0 - alpha) * std::log(1.0 - pc);
        CHECK(std::abs(focal_loss(p, y, alpha, 0.0) - ce) < 1e-12);
    }
}

TEST_CASE("focal_loss: monotone in the prediction") {
    const double eps = 1e-7;
    double prev1 = std::numeric_limits<double>::infinity();
    double prev0 = 0.0;
    for (double p = eps; p <= 1.0 - eps; p += 0.001) {
        const double l1 = focal_loss(p, 1, 0.4, 2.0);
        const double l0 = focal_loss(p, 0, 0.4, 2.0);
        CHECK(l1 <= prev1 + 1e-15);  // decreasing for y=1
        CHECK(l0 >= prev0 - 1e-15);  // increasing for y=0
        prev1 = l1;
        prev0 = l0;
    }
}

TEST_CASE("focal_loss: label swap with alpha -> 1-alpha keeps the batch loss") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> prob(0.01, 0.99);
    std::bernoulli_distribution label(0.3);
    std::vector<double> preds;
    std::vector<int> labels;
    for (int i = 0; i < 64; ++i) {
        preds.push_back(prob(rng));
        labels.push_back(label(rng) ? 1 : 0);
    }
    std::vector<TrainingSample> batch(64);
    for (int i = 0; i < 64; ++i) {
        batch[i].label = labels[i];
    }
    const double alpha = dynamic_alpha(batch);
    for (auto& s : batch) {
        s.label = 1 - s.label;
    }
    const double alpha_swapped = dynamic_alpha(batch);
    CHECK(alpha_swapped == doctest::Approx(1.0 - alpha).epsilon(1e-12));

    double total = 0.0;
    double total_swapped = 0.0;
    for (int i = 0; i < 64; ++i) {
        total += focal_loss(preds[i], labels[i], alpha, 2.0);
        total_swapped += focal_loss(1.0 - preds[i], 1 - labels[i], alpha_swapped, 2.0);
    }
    CHECK(total == doctest::Approx(total_swapped).epsilon(1e-12));
}

TEST_CASE("loss_gradient: matches central finite differences") {
    std::mt19937_64 rng(2718);
    const std::vector<int> dims = {6, 5, 5, 5, 1};
    for (int t = 0; t < 10; ++t) {
        const IpcParams params = MlpParams::random_init(dims, rng);
        const auto batch = random_batch(32, 4, rng);
        const double alpha = dynamic_alpha(batch);
        const Eigen::VectorXd g = loss_gradient(params, batch, alpha, 2.0);
        const Eigen::VectorXd fd = fd_gradient(params, batch, alpha, 2.0);
        for (Eigen::Index i = 0; i < g.size(); ++i) {
            if (std::abs(g(i)) > 1e-8) {
                CHECK(std::abs(g(i) - fd(i)) / std::abs(g(i)) < 1e-5);
            }
        }
    }
}

TEST_CASE("loss_gradient: duplicating every sample keeps the mean gradient") {
    std::mt19937_64 rng(99);
    const std::vector<int> dims = {6, 5, 5, 5, 1};
    const IpcParams params = MlpParams::random_init(dims, rng);
    const auto batch = random_batch(16, 4, rng);
    std::vector<TrainingSample> doubled;
    for (const auto& s : batch) {
        doubled.push_back(s);
        doubled.push_back(s);
    }
    const double alpha = dynamic_alpha(batch);
    const Eigen::VectorXd g1 = loss_gradient(params, batch, alpha, 2.0);
    const Eigen::VectorXd g2 = loss_gradient(params, doubled, alpha, 2.0);
    CHECK((g1 - g2).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("fit_instance: linearly separable half-plane band") {
    // Band points of the half-plane x < 25 inside a 50x50 box; the
    // classifier sees the coordinates both as features and rel-coords.
    std::mt19937_64 rng(555);
    std::uniform_real_distribution<double> ux(20.0, 30.0);
    std::uniform_real_distribution<double> uy(0.0, 50.0);
    std::vector<TrainingSample> samples(256);
    for (auto& s : samples) {
        const double x = ux(rng);
        const double y = uy(rng);
        s.point = Point2(x, y);
        s.feature = Eigen::VectorXd::Zero(2);
        s.feature << x / 50.0, y / 50.0;
        s.coords = Eigen::Vector2d(x / 50.0, y / 50.0);
        s.label = x > 25.0 ? 1 : 0;
    }
    TrainConfig cfg;
    cfg.epochs = 200;
    cfg.learning_rate = 0.5;
    const IpcParams initial = MlpParams::random_init({4, 8, 8, 8, 1}, rng);
    const FitResult fit = fit_instance(initial, samples, cfg);
    CHECK(fit.final_accuracy >= 0.99);

    // Loss log is non-increasing up to the acceptance tolerance.
    for (size_t i = 1; i < fit.log.size(); ++i) {
        CHECK(fit.log[i].loss <= fit.log[i - 1].loss + 1e-6);
    }

    // Near-zero gradient after convergence on the separable toy problem.
    const double alpha = dynamic_alpha(samples);
    const Eigen::VectorXd g = loss_gradient(fit.params, samples, alpha, cfg.gamma);
    CHECK(g.norm() < 1e-4);
}

TEST_CASE("fit_instance: square instance reaches held-out band accuracy") {
    const Polygon gt = square_ring(100.0, Point2(14, 14));
    const MaskGrid mask = rasterize(gt, 128, 128);
    const FeatureGrid grid = make_synthetic_features(mask, 16, 21);
    TrainConfig cfg;
    cfg.epochs = 250;
    cfg.learning_rate = 0.3;
    std::mt19937_64 rng(2023);
    const auto train_samples = sample_boundary_points(gt, grid, cfg, rng);
    const IpcParams initial = MlpParams::random_init(ipc_dims(16, 16), rng);
    const FitResult fit = fit_instance(initial, train_samples, cfg);

    std::mt19937_64 held_out_rng(814);
    const auto held_out = sample_boundary_points(gt, grid, cfg, held_out_rng);
    CHECK(classification_accuracy(fit.params, held_out) >= 0.97);
}

TEST_CASE("fit_instance: bit-reproducible for a fixed seed") {
    const Polygon gt = square_ring(50.0, Point2(7, 7));
    const MaskGrid mask = rasterize(gt, 64, 64);
    const FeatureGrid grid = make_synthetic_features(mask, 16, 4);
    TrainConfig cfg;
    cfg.samples_per_instance = 128;
    cfg.epochs = 40;
    auto run = [&]() {
        std::mt19937_64 rng(cfg.seed + 1);
        const auto samples = sample_boundary_points(gt, grid, cfg, rng);
        const IpcParams initial = MlpParams::random_init(ipc_dims(16, 16), rng);
        return fit_instance(initial, samples, cfg).params.flatten();
    };
    const Eigen::VectorXd a = run();
    const Eigen::VectorXd b = run();
    CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("fit_instance: rejects single-class data, reports divergence") {
    std::mt19937_64 rng(1);
    auto batch = random_batch(16, 4, rng);
    for (auto& s : batch) {
        s.label = 1;
    }
    TrainConfig cfg;
    const IpcParams initial = MlpParams::random_init({6, 4, 4, 4, 1}, rng);
    CHECK_THROWS_AS(fit_instance(initial, batch, cfg), std::invalid_argument);

    // Non-finite parameters surface as "diverged".
    auto ok_batch = random_batch(16, 4, rng);
    ok_batch[0].label = 0;
    ok_batch[1].label = 0;
    ok_batch[2].label = 1;
    ok_batch[3].label = 1;
    IpcParams poisoned = MlpParams::zeros({6, 4, 4, 4, 1});
    poisoned.weights[0](0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_WITH_AS(fit_instance(poisoned, ok_batch, cfg), "diverged",
                         std::runtime_error);
}

TEST_CASE("hypernet_forward: zero network yields the constant-0.5 classifier") {
    const Hypernetwork h = zero_hypernetwork(32, 64, ipc_dims(16, 16));
    const IpcParams params = hypernet_forward(h, Eigen::VectorXd::Ones(32));
    CHECK(params.flatten().cwiseAbs().maxCoeff() == 0.0);
    CHECK(ipc_forward(params, Eigen::VectorXd::Random(16), Eigen::Vector2d(0.5, 0.5)) == 0.5);
}

TEST_CASE("hypernet_forward: distinct embeddings give distinct parameters") {
    std::mt19937_64 rng(3);
    const Hypernetwork h = make_hypernetwork(32, 64, ipc_dims(16, 16), rng);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Eigen::VectorXd e1(32), e2(32);
    for (int i = 0; i < 32; ++i) {
        e1(i) = unit(rng);
        e2(i) = unit(rng);
    }
    const IpcParams p1 = hypernet_forward(h, e1);
    const IpcParams p2 = hypernet_forward(h, e2);
    CHECK((p1.flatten() - p2.flatten()).norm() > 1e-9);

    CHECK_THROWS_AS(hypernet_forward(h, Eigen::VectorXd::Zero(7)), std::invalid_argument);
}

TEST_CASE("hypernetwork: joint two-instance training is instance-aware") {
    const TwoInstanceScene scene = make_two_blob_scene(42);
    TrainConfig cfg;
    cfg.samples_per_instance = 512;
    cfg.epochs = 320;
    cfg.learning_rate = 0.2;

    std::mt19937_64 rng(90210);
    std::vector<InstanceTrainingSet> sets(2);
    sets[0].embedding = instance_embedding(*scene.features, scene.box_a);
    sets[0].samples = sample_boundary_points(std::span<const Polygon>(&scene.ring_a, 1),
                                             *scene.features, scene.box_a, cfg, rng, 0);
    sets[1].embedding = instance_embedding(*scene.features, scene.box_b);
    sets[1].samples = sample_boundary_points(std::span<const Polygon>(&scene.ring_b, 1),
                                             *scene.features, scene.box_b, cfg, rng, 1);
    CHECK((sets[0].embedding - sets[1].embedding).norm() > 1e-9);

    Hypernetwork initial =
        make_hypernetwork(static_cast<int>(sets[0].embedding.size()), 64,
                          ipc_dims(scene.features->channels, kHiddenWidth), rng);
    const HypernetFitResult fit = fit_hypernetwork(initial, sets, cfg);

    const IpcParams theta_a = hypernet_forward(fit.hypernet, sets[0].embedding);
    const IpcParams theta_b = hypernet_forward(fit.hypernet, sets[1].embedding);
    CHECK(classification_accuracy(theta_a, sets[0].samples) >= 0.95);
    CHECK(classification_accuracy(theta_b, sets[1].samples) >= 0.95);

    // A point inside exactly one blob classifies oppositely under the two
    // parameter sets.
    std::uniform_real_distribution<double> ux(scene.box_b.min.x(), scene.box_a.max.x());
    std::uniform_real_distribution<double> uy(scene.box_a.min.y(), scene.box_a.max.y());
    const InstanceField field_a(scene.features, InstanceContext{scene.box_a, theta_a});
    const InstanceField field_b(scene.features, InstanceContext{scene.box_b, theta_b});
    int found = 0;
    int opposite = 0;
    for (int t = 0; t < 20000 && found < 200; ++t) {
        const Point2 q(ux(rng), uy(rng));
        const bool in_a = point_in_polygon(scene.ring_a, q);
        const bool in_b = point_in_polygon(scene.ring_b, q);
        if (in_a == in_b) {
            continue;
        }
        ++found;
        const bool a_says_inside = field_a.evaluate(q) < 0.5;
        const bool b_says_inside = field_b.evaluate(q) < 0.5;
        opposite += (a_says_inside != b_says_inside) ? 1 : 0;
    }
    REQUIRE(found >= 200);
    CHECK(static_cast<double>(opposite) / found >= 0.9);
}

TEST_CASE("train log csv is deterministic") {
    std::vector<TrainLogRow> log{{1, 0.5, 0.75, 0.5}, {2, 0.25, 0.9, 0.5}};
    const std::string csv = train_log_csv(log, 3);
    CHECK(csv == "instance,epoch,loss,accuracy,alpha\n3,1,0.5,0.75,0.5\n3,2,0.25,0.9,0.5\n");
}
