#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <random>
#include <vector>

namespace sharpcontour {

enum class OutputActivation { Sigmoid, Identity };

/// Weights and biases of a fully-connected network with ReLU hidden
/// activations. Layer l maps dims[l] -> dims[l+1]; weights are stored
/// out-rows x in-cols.
struct MlpParams {
    std::vector<Eigen::MatrixXd> weights;
    std::vector<Eigen::VectorXd> biases;

    std::vector<int> dims() const;
    int layer_count() const { return static_cast<int>(weights.size()); }
    int input_dim() const { return weights.empty() ? 0 : static_cast<int>(weights.front().cols()); }
    int output_dim() const { return weights.empty() ? 0 : static_cast<int>(weights.back().rows()); }
    int parameter_count() const;
    bool all_finite() const;

    Eigen::VectorXd flatten() const;

    static MlpParams zeros(const std::vector<int>& dims);
    static MlpParams from_flat(const std::vector<int>& dims, const Eigen::VectorXd& flat);
    /// He-style uniform init, deterministic for a given generator state.
    static MlpParams random_init(const std::vector<int>& dims, std::mt19937_64& rng);
};

Eigen::VectorXd mlp_forward(const MlpParams& params, const Eigen::VectorXd& input,
                            OutputActivation activation);

/// Per-layer post-activation values kept for backpropagation.
struct MlpTrace {
    Eigen::VectorXd input;
    std::vector<Eigen::VectorXd> activations;  // one per layer, output last
};

MlpTrace mlp_forward_trace(const MlpParams& params, const Eigen::VectorXd& input,
                           OutputActivation activation);

/// Backpropagates d(loss)/d(output) through the trace, accumulating
/// parameter gradients into `grad` (shaped like `params`). Returns
/// d(loss)/d(input).
Eigen::VectorXd mlp_backward(const MlpParams& params, const MlpTrace& trace,
                             const Eigen::VectorXd& output_grad, OutputActivation activation,
                             MlpParams& grad);

}  // namespace sharpcontour
