#include "sharpcontour/mlp.hpp"

#include <cmath>
#include <stdexcept>

namespace sharpcontour {

std::vector<int> MlpParams::dims() const {
    std::vector<int> d;
    if (weights.empty()) {
        return d;
    }
    d.push_back(static_cast<int>(weights.front().cols()));
    for (const auto& w : weights) {
        d.push_back(static_cast<int>(w.rows()));
    }
    return d;
}

int MlpParams::parameter_count() const {
    int n = 0;
    for (size_t l = 0; l < weights.size(); ++l) {
        n += static_cast<int>(weights[l].size() + biases[l].size());
    }
    return n;
}

bool MlpParams::all_finite() const {
    for (size_t l = 0; l < weights.size(); ++l) {
        if (!weights[l].allFinite() || !biases[l].allFinite()) {
            return false;
        }
    }
    return true;
}

Eigen::VectorXd MlpParams::flatten() const {
    Eigen::VectorXd flat(parameter_count());
    int offset = 0;
    for (size_t l = 0; l < weights.size(); ++l) {
        const auto& w = weights[l];
        flat.segment(offset, w.size()) = Eigen::Map<const Eigen::VectorXd>(w.data(), w.size());
        offset += static_cast<int>(w.size());
        flat.segment(offset, biases[l].size()) = biases[l];
        offset += static_cast<int>(biases[l].size());
    }
    return flat;
}

MlpParams MlpParams::zeros(const std::vector<int>& dims) {
    if (dims.size() < 2) {
        throw std::invalid_argument("MlpParams: need at least input and output dims");
    }
    MlpParams p;
    for (size_t l = 0; l + 1 < dims.size(); ++l) {
        p.weights.push_back(Eigen::MatrixXd::Zero(dims[l + 1], dims[l]));
        p.biases.push_back(Eigen::VectorXd::Zero(dims[l + 1]));
    }
    return p;
}

MlpParams MlpParams::from_flat(const std::vector<int>& dims, const Eigen::VectorXd& flat) {
    MlpParams p = zeros(dims);
    int offset = 0;
    for (size_t l = 0; l < p.weights.size(); ++l) {
        auto& w = p.weights[l];
        if (offset + w.size() + p.biases[l].size() > flat.size()) {
            throw std::invalid_argument("MlpParams::from_flat: vector too short");
        }
        Eigen::Map<Eigen::VectorXd>(w.data(), w.size()) = flat.segment(offset, w.size());
        offset += static_cast<int>(w.size());
        p.biases[l] = flat.segment(offset, p.biases[l].size());
        offset += static_cast<int>(p.biases[l].size());
    }
    if (offset != flat.size()) {
        throw std::invalid_argument("MlpParams::from_flat: vector length mismatch");
    }
    return p;
}

MlpParams MlpParams::random_init(const std::vector<int>& dims, std::mt19937_64& rng) {
    MlpParams p = zeros(dims);
    for (size_t l = 0; l < p.weights.size(); ++l) {
        const double bound = std::sqrt(6.0 / static_cast<double>(dims[l]));
        std::uniform_real_distribution<double> dist(-bound, bound);
        auto& w = p.weights[l];
        for (int i = 0; i < w.rows(); ++i) {
            for (int j = 0; j < w.cols(); ++j) {
                w(i, j) = dist(rng);
            }
        }
    }
    return p;
}

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

void check_input(const MlpParams& params, const Eigen::VectorXd& input) {
    if (params.weights.empty()) {
        throw std::invalid_argument("mlp: empty parameter set");
    }
    if (input.size() != params.input_dim()) {
        throw std::invalid_argument("mlp: dimension mismatch (input " +
                                    std::to_string(input.size()) + ", expected " +
                                    std::to_string(params.input_dim()) + ")");
    }
    for (size_t l = 0; l + 1 < params.weights.size(); ++l) {
        if (params.weights[l + 1].cols() != params.weights[l].rows()) {
            throw std::invalid_argument("mlp: dimension mismatch between layers");
        }
    }
}

}  // namespace

Eigen::VectorXd mlp_forward(const MlpParams& params, const Eigen::VectorXd& input,
                            OutputActivation activation) {
    check_input(params, input);
    Eigen::VectorXd a = input;
    const size_t last = params.weights.size() - 1;
    for (size_t l = 0; l <= last; ++l) {
        a = (params.weights[l] * a + params.biases[l]).eval();
        if (l < last) {
            a = a.cwiseMax(0.0);
        } else if (activation == OutputActivation::Sigmoid) {
            a = a.unaryExpr([](double z) { return sigmoid(z); });
        }
    }
    return a;
}

MlpTrace mlp_forward_trace(const MlpParams& params, const Eigen::VectorXd& input,
                           OutputActivation activation) {
    check_input(params, input);
    MlpTrace trace;
    trace.input = input;
    Eigen::VectorXd a = input;
    const size_t last = params.weights.size() - 1;
    for (size_t l = 0; l <= last; ++l) {
        a = (params.weights[l] * a + params.biases[l]).eval();
        if (l < last) {
            a = a.cwiseMax(0.0);
        } else if (activation == OutputActivation::Sigmoid) {
            a = a.unaryExpr([](double z) { return sigmoid(z); });
        }
        trace.activations.push_back(a);
    }
    return trace;
}

Eigen::VectorXd mlp_backward(const MlpParams& params, const MlpTrace& trace,
                             const Eigen::VectorXd& output_grad, OutputActivation activation,
                             MlpParams& grad) {
    const int layers = params.layer_count();
    Eigen::VectorXd delta = output_grad;
    // Map d(loss)/d(activation) to d(loss)/d(pre-activation) of the output.
    if (activation == OutputActivation::Sigmoid) {
        const Eigen::VectorXd& y = trace.activations.back();
        delta = delta.cwiseProduct(y.cwiseProduct(Eigen::VectorXd::Ones(y.size()) - y));
    }
    for (int l = layers - 1; l >= 0; --l) {
        const Eigen::VectorXd& prev =
            l == 0 ? trace.input : trace.activations[static_cast<size_t>(l) - 1];
        grad.weights[l].noalias() += delta * prev.transpose();
        grad.biases[l] += delta;
        if (l > 0) {
            const Eigen::VectorXd upstream = params.weights[l].transpose() * delta;
            // ReLU mask from the stored post-activation values.
            const Eigen::VectorXd& act = trace.activations[static_cast<size_t>(l) - 1];
            delta = (upstream.array() * (act.array() > 0.0).cast<double>()).matrix();
        }
    }
    return params.weights[0].transpose() * delta;
}

}  // namespace sharpcontour
