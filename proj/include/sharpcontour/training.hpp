#pragma once

#include "sharpcontour/fields.hpp"
#include "sharpcontour/geometry.hpp"
#include "sharpcontour/mlp.hpp"

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace sharpcontour {

/// One labelled point near an instance boundary. label 1 = outside,
/// 0 = inside, consistent with ground-truth containment of `point`.
struct TrainingSample {
    Point2 point;
    Eigen::VectorXd feature;   // F
    Eigen::Vector2d coords;    // box-relative
    int label = 0;
    int instance_id = 0;
};

/// Which class fraction the dynamic focal coefficient uses. The default
/// weights the positive (outside) term by the negative fraction, so the
/// minority class is up-weighted.
enum class AlphaMode { NegativeFraction, PositiveFraction };

struct TrainConfig {
    double gamma = 2.0;                // focusing exponent
    double band_fraction = 0.05;       // band half-width = fraction * sqrt(A)
    int samples_per_instance = 512;
    double learning_rate = 0.05;
    int epochs = 300;
    int batch_size = 0;                // 0 = full batch
    double prob_clamp = 1e-7;
    std::uint64_t seed = 0;
    AlphaMode alpha_mode = AlphaMode::NegativeFraction;
};

void validate(const TrainConfig& cfg);

/// Uniform rejection sampling of points within the boundary band
/// {q : |signed_distance| <= band}; labels come from the signed-distance
/// sign. Points landing exactly on the boundary are resampled. Throws
/// when 10^4 consecutive tries produce no valid point.
std::vector<TrainingSample> sample_boundary_points(std::span<const Polygon> gt_rings,
                                                   const FeatureGrid& grid, const BBox& box,
                                                   const TrainConfig& cfg, std::mt19937_64& rng,
                                                   int instance_id = 0);
std::vector<TrainingSample> sample_boundary_points(const Polygon& gt, const FeatureGrid& grid,
                                                   const TrainConfig& cfg, std::mt19937_64& rng);

/// alpha = n_neg / (n_pos + n_neg) (NegativeFraction mode). Single-class
/// batches are legal but warn on stderr.
double dynamic_alpha(std::span<const TrainingSample> batch,
                     AlphaMode mode = AlphaMode::NegativeFraction);

/// Focal loss with a dynamic coefficient:
///   y=1: -alpha   * (1-p)^gamma * log(p)
///   y=0: -(1-alpha) * p^gamma   * log(1-p)
/// with p clamped to [eps, 1-eps].
double focal_loss(double y_hat, int y, double alpha, double gamma, double eps = 1e-7);
double focal_loss_dp(double y_hat, int y, double alpha, double gamma, double eps = 1e-7);

/// Mean focal loss of the classifier over a batch.
double batch_loss(const IpcParams& params, std::span<const TrainingSample> batch, double alpha,
                  double gamma, double eps = 1e-7);

/// Mean-reduced gradient of batch_loss over the flattened parameters;
/// matches central finite differences.
Eigen::VectorXd loss_gradient(const IpcParams& params, std::span<const TrainingSample> batch,
                              double alpha, double gamma, double eps = 1e-7);

struct TrainLogRow {
    int epoch = 0;
    double loss = 0.0;
    double accuracy = 0.0;
    double alpha = 0.5;
};

/// Momentum descent (0.9) with step-halving: an accepted step may not
/// increase the loss by more than 1e-6; a rejected step halves the rate
/// and resets the momentum.
class MomentumOptimizer {
public:
    MomentumOptimizer(Eigen::VectorXd theta, double learning_rate);

    /// Attempts one step against `loss_fn`; returns the resulting loss
    /// (unchanged when 40 halvings still increase it). Throws "diverged"
    /// when the current loss is non-finite.
    double step(const Eigen::VectorXd& gradient, double current_loss,
                const std::function<double(const Eigen::VectorXd&)>& loss_fn);

    const Eigen::VectorXd& theta() const { return theta_; }

private:
    Eigen::VectorXd theta_;
    Eigen::VectorXd velocity_;
    double lr_;
};

struct FitResult {
    IpcParams params;
    std::vector<TrainLogRow> log;
    double final_loss = 0.0;
    double final_accuracy = 0.0;
};

double classification_accuracy(const IpcParams& params, std::span<const TrainingSample> samples);

/// Gradient descent with momentum 0.9 and step-halving whenever a step
/// would increase the loss; accepted steps never increase the loss by
/// more than 1e-6. Throws "diverged" on non-finite loss.
FitResult fit_instance(const IpcParams& initial, std::span<const TrainingSample> samples,
                       const TrainConfig& cfg);

/// Three fully-connected layers mapping an instance embedding to the
/// flattened classifier parameter vector.
struct Hypernetwork {
    MlpParams net;
    std::vector<int> ipc_shape;

    int embedding_dim() const { return net.input_dim(); }
};

Hypernetwork make_hypernetwork(int embedding_dim, int hidden_width,
                               const std::vector<int>& ipc_shape, std::mt19937_64& rng);
Hypernetwork zero_hypernetwork(int embedding_dim, int hidden_width,
                               const std::vector<int>& ipc_shape);

IpcParams hypernet_forward(const Hypernetwork& h, const Eigen::VectorXd& embedding);

/// Mean- and max-pooled feature vectors over the cells inside the box;
/// dimension 2F.
Eigen::VectorXd instance_embedding(const FeatureGrid& grid, const BBox& box);

struct InstanceTrainingSet {
    Eigen::VectorXd embedding;
    std::vector<TrainingSample> samples;
};

struct HypernetFitResult {
    Hypernetwork hypernet;
    std::vector<TrainLogRow> log;
    double final_loss = 0.0;
};

/// Joint training of the hypernetwork over several instances: each
/// instance's classifier weights are predicted from its embedding and the
/// pooled focal loss is backpropagated through the hypernetwork.
HypernetFitResult fit_hypernetwork(Hypernetwork initial,
                                   std::span<const InstanceTrainingSet> instances,
                                   const TrainConfig& cfg);

std::string train_log_csv(std::span<const TrainLogRow> log, int instance_id = 0,
                          bool header = true);

}  // namespace sharpcontour
