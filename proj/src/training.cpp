#include "sharpcontour/training.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <limits>
#include <stdexcept>

namespace sharpcontour {

void validate(const TrainConfig& cfg) {
    if (cfg.gamma < 0.0) {
        throw std::invalid_argument("gamma must be >= 0");
    }
    if (!(cfg.prob_clamp > 0.0 && cfg.prob_clamp < 0.5)) {
        throw std::invalid_argument("prob_clamp must be in (0, 0.5)");
    }
    if (!(cfg.band_fraction > 0.0)) {
        throw std::invalid_argument("band_fraction must be > 0");
    }
    if (cfg.samples_per_instance < 1) {
        throw std::invalid_argument("samples_per_instance must be >= 1");
    }
    if (!(cfg.learning_rate > 0.0)) {
        throw std::invalid_argument("learning_rate must be > 0");
    }
    if (cfg.epochs < 1) {
        throw std::invalid_argument("epochs must be >= 1");
    }
}

std::vector<TrainingSample> sample_boundary_points(std::span<const Polygon> gt_rings,
                                                   const FeatureGrid& grid, const BBox& box,
                                                   const TrainConfig& cfg, std::mt19937_64& rng,
                                                   int instance_id) {
    validate(cfg);
    if (!(box.area() > 0.0)) {
        throw std::invalid_argument("sample_boundary_points: box area must be > 0");
    }
    const double band = cfg.band_fraction * std::sqrt(box.area());
    std::uniform_real_distribution<double> ux(box.min.x() - band, box.max.x() + band);
    std::uniform_real_distribution<double> uy(box.min.y() - band, box.max.y() + band);

    std::vector<TrainingSample> samples;
    samples.reserve(static_cast<size_t>(cfg.samples_per_instance));
    int consecutive_failures = 0;
    while (static_cast<int>(samples.size()) < cfg.samples_per_instance) {
        const Point2 q(ux(rng), uy(rng));
        const double sd = signed_distance(gt_rings, q);
        if (std::abs(sd) > band || std::abs(sd) < 1e-9) {
            if (++consecutive_failures >= 10000) {
                throw std::runtime_error(
                    "sample_boundary_points: no band point found in 10000 tries");
            }
            continue;
        }
        consecutive_failures = 0;
        TrainingSample s;
        s.point = q;
        s.feature = bilinear_feature(grid, q);
        s.coords = relative_coords(q, box);
        s.label = sd > 0.0 ? 1 : 0;
        s.instance_id = instance_id;
        samples.push_back(std::move(s));
    }
    return samples;
}

std::vector<TrainingSample> sample_boundary_points(const Polygon& gt, const FeatureGrid& grid,
                                                   const TrainConfig& cfg, std::mt19937_64& rng) {
    return sample_boundary_points(std::span<const Polygon>(&gt, 1), grid, bbox(gt), cfg, rng);
}

double dynamic_alpha(std::span<const TrainingSample> batch, AlphaMode mode) {
    if (batch.empty()) {
        throw std::invalid_argument("dynamic_alpha: empty batch");
    }
    int positives = 0;
    for (const TrainingSample& s : batch) {
        positives += s.label == 1 ? 1 : 0;
    }
    const int negatives = static_cast<int>(batch.size()) - positives;
    if (positives == 0 || negatives == 0) {
        std::cerr << "warning: dynamic_alpha: single-class batch ("
                  << (positives == 0 ? "all negative" : "all positive") << ")\n";
    }
    const double positive_fraction =
        static_cast<double>(positives) / static_cast<double>(batch.size());
    return mode == AlphaMode::NegativeFraction ? 1.0 - positive_fraction : positive_fraction;
}

double focal_loss(double y_hat, int y, double alpha, double gamma, double eps) {
    const double p = std::clamp(y_hat, eps, 1.0 - eps);
    if (y == 1) {
        return -alpha * std::pow(1.0 - p, gamma) * std::log(p);
    }
    return -(1.0 - alpha) * std::pow(p, gamma) * std::log(1.0 - p);
}

double focal_loss_dp(double y_hat, int y, double alpha, double gamma, double eps) {
    if (y_hat <= eps || y_hat >= 1.0 - eps) {
        return 0.0;  // clamp region: loss locally constant in y_hat
    }
    const double p = y_hat;
    if (y == 1) {
        const double focus = gamma > 0.0 ? gamma * std::pow(1.0 - p, gamma - 1.0) : 0.0;
        return -alpha * (-focus * std::log(p) + std::pow(1.0 - p, gamma) / p);
    }
    const double focus = gamma > 0.0 ? gamma * std::pow(p, gamma - 1.0) : 0.0;
    return -(1.0 - alpha) * (focus * std::log(1.0 - p) - std::pow(p, gamma) / (1.0 - p));
}

namespace {

Eigen::VectorXd sample_input(const TrainingSample& s) {
    Eigen::VectorXd input(s.feature.size() + 2);
    input << s.feature, s.coords;
    return input;
}

}  // namespace

double batch_loss(const IpcParams& params, std::span<const TrainingSample> batch, double alpha,
                  double gamma, double eps) {
    if (batch.empty()) {
        throw std::invalid_argument("batch_loss: empty batch");
    }
    double total = 0.0;
    for (const TrainingSample& s : batch) {
        const double y_hat = mlp_forward(params, sample_input(s), OutputActivation::Sigmoid)(0);
        total += focal_loss(y_hat, s.label, alpha, gamma, eps);
    }
    return total / static_cast<double>(batch.size());
}

Eigen::VectorXd loss_gradient(const IpcParams& params, std::span<const TrainingSample> batch,
                              double alpha, double gamma, double eps) {
    if (batch.empty()) {
        throw std::invalid_argument("loss_gradient: empty batch");
    }
    MlpParams grad = MlpParams::zeros(params.dims());
    const double inv_n = 1.0 / static_cast<double>(batch.size());
    for (const TrainingSample& s : batch) {
        const MlpTrace trace = mlp_forward_trace(params, sample_input(s),
                                                 OutputActivation::Sigmoid);
        const double y_hat = trace.activations.back()(0);
        Eigen::VectorXd d_out(1);
        d_out(0) = focal_loss_dp(y_hat, s.label, alpha, gamma, eps) * inv_n;
        mlp_backward(params, trace, d_out, OutputActivation::Sigmoid, grad);
    }
    return grad.flatten();
}

double classification_accuracy(const IpcParams& params,
                               std::span<const TrainingSample> samples) {
    if (samples.empty()) {
        return 0.0;
    }
    int correct = 0;
    for (const TrainingSample& s : samples) {
        const double y_hat = mlp_forward(params, sample_input(s), OutputActivation::Sigmoid)(0);
        correct += ((y_hat > 0.5) == (s.label == 1)) ? 1 : 0;
    }
    return static_cast<double>(correct) / static_cast<double>(samples.size());
}

MomentumOptimizer::MomentumOptimizer(Eigen::VectorXd theta, double learning_rate)
    : theta_(std::move(theta)),
      velocity_(Eigen::VectorXd::Zero(theta_.size())),
      lr_(learning_rate) {}

double MomentumOptimizer::step(const Eigen::VectorXd& gradient, double current_loss,
                               const std::function<double(const Eigen::VectorXd&)>& loss_fn) {
    if (!std::isfinite(current_loss)) {
        throw std::runtime_error("diverged");
    }
    for (int attempt = 0; attempt < 40; ++attempt) {
        const Eigen::VectorXd v_try = 0.9 * velocity_ - lr_ * gradient;
        const Eigen::VectorXd theta_try = theta_ + v_try;
        const double trial = loss_fn(theta_try);
        if (std::isfinite(trial) && trial <= current_loss + 1e-6) {
            theta_ = theta_try;
            velocity_ = v_try;
            return trial;
        }
        lr_ *= 0.5;
        velocity_.setZero();
    }
    velocity_.setZero();
    return current_loss;  // stuck: keep the parameters
}

FitResult fit_instance(const IpcParams& initial, std::span<const TrainingSample> samples,
                       const TrainConfig& cfg) {
    validate(cfg);
    int positives = 0;
    for (const TrainingSample& s : samples) {
        positives += s.label == 1 ? 1 : 0;
    }
    const int negatives = static_cast<int>(samples.size()) - positives;
    if (positives < 2 || negatives < 2) {
        throw std::invalid_argument("fit_instance: need at least 2 samples of each label");
    }

    const std::vector<int> dims = initial.dims();
    const double alpha_all = dynamic_alpha(samples, cfg.alpha_mode);

    // Fixed-order batches; full batch by default.
    std::vector<std::span<const TrainingSample>> batches;
    const int n = static_cast<int>(samples.size());
    const int bs = cfg.batch_size > 0 ? std::min(cfg.batch_size, n) : n;
    for (int start = 0; start < n; start += bs) {
        batches.push_back(samples.subspan(start, std::min(bs, n - start)));
    }
    std::vector<double> batch_alpha;
    batch_alpha.reserve(batches.size());
    for (const auto& b : batches) {
        batch_alpha.push_back(dynamic_alpha(b, cfg.alpha_mode));
    }

    MomentumOptimizer opt(initial.flatten(), cfg.learning_rate);
    FitResult result;
    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        for (size_t bi = 0; bi < batches.size(); ++bi) {
            const IpcParams params = MlpParams::from_flat(dims, opt.theta());
            const Eigen::VectorXd g =
                loss_gradient(params, batches[bi], batch_alpha[bi], cfg.gamma, cfg.prob_clamp);
            const double current =
                batch_loss(params, batches[bi], batch_alpha[bi], cfg.gamma, cfg.prob_clamp);
            opt.step(g, current, [&](const Eigen::VectorXd& theta) {
                return batch_loss(MlpParams::from_flat(dims, theta), batches[bi],
                                  batch_alpha[bi], cfg.gamma, cfg.prob_clamp);
            });
        }
        const IpcParams params = MlpParams::from_flat(dims, opt.theta());
        TrainLogRow row;
        row.epoch = epoch;
        row.loss = batch_loss(params, samples, alpha_all, cfg.gamma, cfg.prob_clamp);
        row.accuracy = classification_accuracy(params, samples);
        row.alpha = alpha_all;
        result.log.push_back(row);
    }
    result.params = MlpParams::from_flat(dims, opt.theta());
    result.final_loss = result.log.back().loss;
    result.final_accuracy = result.log.back().accuracy;
    return result;
}

Hypernetwork make_hypernetwork(int embedding_dim, int hidden_width,
                               const std::vector<int>& ipc_shape, std::mt19937_64& rng) {
    Hypernetwork h;
    h.ipc_shape = ipc_shape;
    const int out = MlpParams::zeros(ipc_shape).parameter_count();
    h.net = MlpParams::random_init({embedding_dim, hidden_width, hidden_width, out}, rng);
    // Scale the output layer down so predicted classifiers start near zero.
    h.net.weights.back() *= 0.1;
    return h;
}

Hypernetwork zero_hypernetwork(int embedding_dim, int hidden_width,
                               const std::vector<int>& ipc_shape) {
    Hypernetwork h;
    h.ipc_shape = ipc_shape;
    const int out = MlpParams::zeros(ipc_shape).parameter_count();
    h.net = MlpParams::zeros({embedding_dim, hidden_width, hidden_width, out});
    return h;
}

IpcParams hypernet_forward(const Hypernetwork& h, const Eigen::VectorXd& embedding) {
    const Eigen::VectorXd flat = mlp_forward(h.net, embedding, OutputActivation::Identity);
    return MlpParams::from_flat(h.ipc_shape, flat);
}

Eigen::VectorXd instance_embedding(const FeatureGrid& grid, const BBox& box) {
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(grid.channels);
    Eigen::VectorXd max =
        Eigen::VectorXd::Constant(grid.channels, -std::numeric_limits<double>::infinity());
    int count = 0;
    for (int r = 0; r < grid.height; ++r) {
        for (int c = 0; c < grid.width; ++c) {
            const Point2 centre(c + 0.5, grid.height - r - 0.5);
            if (!box.contains(centre)) {
                continue;
            }
            const auto col = grid.data.col(static_cast<Eigen::Index>(r) * grid.width + c);
            mean += col;
            max = max.cwiseMax(col);
            ++count;
        }
    }
    if (count == 0) {
        const Eigen::VectorXd f = bilinear_feature(grid, 0.5 * (box.min + box.max));
        mean = f;
        max = f;
    } else {
        mean /= static_cast<double>(count);
    }
    Eigen::VectorXd embedding(2 * grid.channels);
    embedding << mean, max;
    return embedding;
}

HypernetFitResult fit_hypernetwork(Hypernetwork initial,
                                   std::span<const InstanceTrainingSet> instances,
                                   const TrainConfig& cfg) {
    validate(cfg);
    if (instances.empty()) {
        throw std::invalid_argument("fit_hypernetwork: no instances");
    }
    size_t total_samples = 0;
    std::vector<double> alpha;
    for (const InstanceTrainingSet& inst : instances) {
        total_samples += inst.samples.size();
        alpha.push_back(dynamic_alpha(inst.samples, cfg.alpha_mode));
    }
    const std::vector<int> net_dims = initial.net.dims();
    const std::vector<int> ipc_shape = initial.ipc_shape;

    // Pooled mean loss over every sample of every instance.
    auto pooled_loss = [&](const Eigen::VectorXd& theta) {
        const Hypernetwork h{MlpParams::from_flat(net_dims, theta), ipc_shape};
        double total = 0.0;
        for (size_t i = 0; i < instances.size(); ++i) {
            const IpcParams ipc = hypernet_forward(h, instances[i].embedding);
            total += batch_loss(ipc, instances[i].samples, alpha[i], cfg.gamma, cfg.prob_clamp) *
                     static_cast<double>(instances[i].samples.size());
        }
        return total / static_cast<double>(total_samples);
    };
    auto pooled_gradient = [&](const Eigen::VectorXd& theta) {
        const Hypernetwork h{MlpParams::from_flat(net_dims, theta), ipc_shape};
        MlpParams grad = MlpParams::zeros(net_dims);
        for (size_t i = 0; i < instances.size(); ++i) {
            const MlpTrace trace =
                mlp_forward_trace(h.net, instances[i].embedding, OutputActivation::Identity);
            const IpcParams ipc = MlpParams::from_flat(ipc_shape, trace.activations.back());
            const double weight = static_cast<double>(instances[i].samples.size()) /
                                  static_cast<double>(total_samples);
            const Eigen::VectorXd d_ipc =
                weight *
                loss_gradient(ipc, instances[i].samples, alpha[i], cfg.gamma, cfg.prob_clamp);
            mlp_backward(h.net, trace, d_ipc, OutputActivation::Identity, grad);
        }
        return grad.flatten();
    };

    MomentumOptimizer opt(initial.net.flatten(), cfg.learning_rate);
    HypernetFitResult result;
    result.hypernet.ipc_shape = ipc_shape;
    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        const Eigen::VectorXd g = pooled_gradient(opt.theta());
        const double current = pooled_loss(opt.theta());
        const double loss = opt.step(g, current, pooled_loss);

        const Hypernetwork h{MlpParams::from_flat(net_dims, opt.theta()), ipc_shape};
        int correct = 0;
        for (size_t i = 0; i < instances.size(); ++i) {
            const IpcParams ipc = hypernet_forward(h, instances[i].embedding);
            correct += static_cast<int>(
                std::lround(classification_accuracy(ipc, instances[i].samples) *
                            static_cast<double>(instances[i].samples.size())));
        }
        TrainLogRow row;
        row.epoch = epoch;
        row.loss = loss;
        row.accuracy = static_cast<double>(correct) / static_cast<double>(total_samples);
        row.alpha = alpha.front();
        result.log.push_back(row);
    }
    result.hypernet.net = MlpParams::from_flat(net_dims, opt.theta());
    result.final_loss = result.log.back().loss;
    return result;
}

std::string train_log_csv(std::span<const TrainLogRow> log, int instance_id, bool header) {
    std::string out;
    if (header) {
        out += "instance,epoch,loss,accuracy,alpha\n";
    }
    char buf[128];
    for (const TrainLogRow& row : log) {
        std::snprintf(buf, sizeof(buf), "%d,%d,%.9g,%.9g,%.9g\n", instance_id, row.epoch,
                      row.loss, row.accuracy, row.alpha);
        out += buf;
    }
    return out;
}

}  // namespace sharpcontour
