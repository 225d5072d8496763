// Copyright 2026 The AutoLR Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "autolr/error.hpp"
#include "autolr/seeding.hpp"

namespace autolr {

enum class Activation { relu, identity };

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Fully connected layer, y = W x + b. W is (outputs x inputs).
template <typename Scalar>
struct Dense {
    Matrix<Scalar> weights;
    Vector<Scalar> bias;
};

/// Feed-forward classifier: hidden layers use `hidden`, the output layer
/// feeds a softmax with cross-entropy loss.
template <typename Scalar>
struct Mlp {
    std::vector<Dense<Scalar>> layers;
    Activation hidden = Activation::relu;

    Eigen::Index input_size() const { return layers.front().weights.cols(); }
    Eigen::Index output_size() const { return layers.back().weights.rows(); }

    std::size_t parameter_count() const {
        std::size_t n = 0;
        for (const auto& l : layers) {
            n += static_cast<std::size_t>(l.weights.size() + l.bias.size());
        }
        return n;
    }
};

/// Same shape as the model; one entry per parameter.
template <typename Scalar>
using Gradients = std::vector<Dense<Scalar>>;

/// Glorot-uniform weights in [-r, r], r = sqrt(6 / (fan_in + fan_out)); zero biases.
template <typename Scalar>
Mlp<Scalar> make_mlp(std::span<const std::size_t> layer_sizes, Activation hidden, std::uint64_t seed) {
    if (layer_sizes.size() < 2) {
        throw ShapeMismatchError("an MLP needs at least an input and an output layer");
    }
    Rng rng(seed);
    Mlp<Scalar> model;
    model.hidden = hidden;
    for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
        const auto in = static_cast<Eigen::Index>(layer_sizes[l]);
        const auto out = static_cast<Eigen::Index>(layer_sizes[l + 1]);
        if (in < 1 || out < 1) {
            throw ShapeMismatchError("layer sizes must be positive");
        }
        const double r = std::sqrt(6.0 / static_cast<double>(in + out));
        std::uniform_real_distribution<double> u(-r, r);
        Dense<Scalar> layer{Matrix<Scalar>(out, in), Vector<Scalar>::Zero(out)};
        // Row-major fill order so the draw sequence does not depend on storage order.
        for (Eigen::Index i = 0; i < out; ++i) {
            for (Eigen::Index j = 0; j < in; ++j) {
                layer.weights(i, j) = static_cast<Scalar>(u(rng));
            }
        }
        model.layers.push_back(std::move(layer));
    }
    return model;
}

namespace detail {

template <typename Scalar>
void check_batch(const Mlp<Scalar>& model, const Matrix<Scalar>& inputs, std::span<const int> labels) {
    if (inputs.cols() == 0) {
        throw ShapeMismatchError("empty batch");
    }
    if (inputs.rows() != model.input_size()) {
        throw ShapeMismatchError("batch has " + std::to_string(inputs.rows()) + " features, model expects " +
                                 std::to_string(model.input_size()));
    }
    if (static_cast<Eigen::Index>(labels.size()) != inputs.cols()) {
        throw ShapeMismatchError("label count does not match batch size");
    }
    for (int y : labels) {
        if (y < 0 || y >= model.output_size()) {
            throw ShapeMismatchError("label " + std::to_string(y) + " out of range");
        }
    }
    for (std::size_t l = 1; l < model.layers.size(); ++l) {
        if (model.layers[l].weights.cols() != model.layers[l - 1].weights.rows()) {
            throw ShapeMismatchError("inconsistent layer shapes");
        }
    }
}

template <typename Derived>
void apply_hidden(Eigen::MatrixBase<Derived>& z, Activation a) {
    if (a == Activation::relu) {
        z = z.cwiseMax(typename Derived::Scalar(0));
    }
}

// Column-wise softmax, max-shifted.
template <typename Scalar>
Matrix<Scalar> softmax(const Matrix<Scalar>& logits) {
    Matrix<Scalar> p = logits;
    for (Eigen::Index c = 0; c < p.cols(); ++c) {
        auto col = p.col(c);
        col.array() -= col.maxCoeff();
        col = col.array().exp().matrix();
        col /= col.sum();
    }
    return p;
}

// Per-layer outputs after activation; front() is the input batch, back() the logits.
template <typename Scalar>
std::vector<Matrix<Scalar>> forward_all(const Mlp<Scalar>& model, const Matrix<Scalar>& inputs) {
    std::vector<Matrix<Scalar>> acts;
    acts.reserve(model.layers.size() + 1);
    acts.push_back(inputs);
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
        const auto& layer = model.layers[l];
        Matrix<Scalar> z = layer.weights * acts.back();
        z.colwise() += layer.bias;
        if (l + 1 < model.layers.size()) {
            apply_hidden(z, model.hidden);
        }
        acts.push_back(std::move(z));
    }
    return acts;
}

template <typename Scalar>
Scalar cross_entropy(const Matrix<Scalar>& probs, std::span<const int> labels) {
    Scalar loss(0);
    for (Eigen::Index c = 0; c < probs.cols(); ++c) {
        loss -= std::log(probs(labels[static_cast<std::size_t>(c)], c));
    }
    return loss / static_cast<Scalar>(probs.cols());
}

} // namespace detail

template <typename Scalar>
Matrix<Scalar> forward(const Mlp<Scalar>& model, const Matrix<Scalar>& inputs) {
    return detail::forward_all(model, inputs).back();
}

template <typename Scalar>
struct LossAndGradients {
    Scalar loss;
    Gradients<Scalar> gradients;
};

/// Mean cross-entropy over the batch (samples are columns) and its exact gradient.
template <typename Scalar>
LossAndGradients<Scalar> mlp_forward_backward(const Mlp<Scalar>& model, const Matrix<Scalar>& inputs,
                                              std::span<const int> labels) {
    detail::check_batch(model, inputs, labels);
    const auto acts = detail::forward_all(model, inputs);
    const Matrix<Scalar> probs = detail::softmax(acts.back());
    const auto m = static_cast<Scalar>(inputs.cols());

    LossAndGradients<Scalar> out{detail::cross_entropy(probs, labels), Gradients<Scalar>(model.layers.size())};

    // dL/dlogits = (p - onehot) / m
    Matrix<Scalar> delta = probs;
    for (Eigen::Index c = 0; c < delta.cols(); ++c) {
        delta(labels[static_cast<std::size_t>(c)], c) -= Scalar(1);
    }
    delta /= m;

    for (std::size_t l = model.layers.size(); l-- > 0;) {
        out.gradients[l].weights = delta * acts[l].transpose();
        out.gradients[l].bias = delta.rowwise().sum();
        if (l == 0) {
            break;
        }
        Matrix<Scalar> back = model.layers[l].weights.transpose() * delta;
        if (model.hidden == Activation::relu) {
            // acts[l] is relu(z): its derivative is 1 where the output is positive.
            back = back.cwiseProduct((acts[l].array() > Scalar(0)).template cast<Scalar>().matrix());
        }
        delta = std::move(back);
    }
    return out;
}

template <typename Scalar>
struct ClassificationMetrics {
    Scalar loss;
    double accuracy;
};

template <typename Scalar>
ClassificationMetrics<Scalar> evaluate_classifier(const Mlp<Scalar>& model, const Matrix<Scalar>& inputs,
                                                  std::span<const int> labels) {
    detail::check_batch(model, inputs, labels);
    const Matrix<Scalar> logits = forward(model, inputs);
    const Matrix<Scalar> probs = detail::softmax(logits);
    std::size_t correct = 0;
    for (Eigen::Index c = 0; c < logits.cols(); ++c) {
        Eigen::Index arg = 0;
        logits.col(c).maxCoeff(&arg);
        if (arg == labels[static_cast<std::size_t>(c)]) {
            ++correct;
        }
    }
    return {detail::cross_entropy(probs, labels), static_cast<double>(correct) / static_cast<double>(labels.size())};
}

template <typename Scalar>
void sgd_step(Mlp<Scalar>& model, const Gradients<Scalar>& grads, Scalar lr) {
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
        model.layers[l].weights.noalias() -= lr * grads[l].weights;
        model.layers[l].bias.noalias() -= lr * grads[l].bias;
    }
}

/// All parameters, layer by layer, weights (column-major) then bias.
template <typename Scalar>
std::vector<Scalar> flatten(const std::vector<Dense<Scalar>>& layers) {
    std::vector<Scalar> out;
    for (const auto& l : layers) {
        out.insert(out.end(), l.weights.data(), l.weights.data() + l.weights.size());
        out.insert(out.end(), l.bias.data(), l.bias.data() + l.bias.size());
    }
    return out;
}

} // namespace autolr
