#pragma once

#include <cmath>
#include <cstddef>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace rlcycle::nn {

enum class Activation { kTanh, kRelu, kLinear };

std::string_view to_string(Activation a);
Activation activation_from_string(std::string_view name);

inline double activate(Activation a, double z) {
  switch (a) {
    case Activation::kTanh:
      return std::tanh(z);
    case Activation::kRelu:
      return z > 0.0 ? z : 0.0;
    case Activation::kLinear:
      return z;
  }
  return z;
}

// Derivative expressed through the activation output y.
inline double activation_slope(Activation a, double y) {
  switch (a) {
    case Activation::kTanh:
      return 1.0 - y * y;
    case Activation::kRelu:
      return y > 0.0 ? 1.0 : 0.0;
    case Activation::kLinear:
      return 1.0;
  }
  return 1.0;
}

struct LayerShape {
  std::size_t in = 0;
  std::size_t out = 0;
  Activation activation = Activation::kLinear;
  // Offsets into the flat parameter vector.
  std::size_t weight_offset = 0;
  std::size_t bias_offset = 0;

  std::size_t parameter_count() const { return in * out + out; }
  friend bool operator==(const LayerShape&, const LayerShape&) = default;
};

// Fully connected feed-forward network. All parameters live in one flat
// vector: for each layer, the out x in weight block (row k = incoming weights
// of output unit k) followed by the out biases. Optimizers, target-network
// averaging and hashing operate on that vector directly.
class Network {
 public:
  Network() = default;

  // Zero-initialised network with the given layer widths. `activations` has
  // one entry per layer (sizes.size() - 1).
  Network(std::span<const std::size_t> sizes, std::span<const Activation> activations);

  // Glorot-uniform for tanh/linear layers, He-uniform for relu, zero biases.
  static Network initialized(std::span<const std::size_t> sizes,
                             std::span<const Activation> activations,
                             std::mt19937_64& rng);

  // Convenience: hidden layers share one activation, the head is linear.
  static Network mlp(std::size_t inputs, std::span<const std::size_t> hidden,
                     std::size_t outputs, Activation hidden_activation,
                     std::mt19937_64& rng);

  std::size_t input_size() const;
  std::size_t output_size() const;
  std::size_t layer_count() const { return layers_.size(); }
  const std::vector<LayerShape>& layers() const { return layers_; }
  std::size_t parameter_count() const { return params_.size(); }

  std::span<double> parameters() { return params_; }
  std::span<const double> parameters() const { return params_; }

  std::span<double> weights(std::size_t layer);
  std::span<const double> weights(std::size_t layer) const;
  std::span<double> biases(std::size_t layer);
  std::span<const double> biases(std::size_t layer) const;

  std::vector<double> forward(std::span<const double> input) const;

  bool all_finite() const;

  friend bool operator==(const Network&, const Network&) = default;

 private:
  std::vector<LayerShape> layers_;
  std::vector<double> params_;
};

struct BackwardResult {
  std::vector<double> parameter_grads;  // same layout as Network::parameters()
  std::vector<double> input_grad;
};

// Gradient of <output_grad, forward(input)> w.r.t. the parameters and the input.
BackwardResult backward(const Network& net, std::span<const double> input,
                        std::span<const double> output_grad);

// Per-layer post-activation values for one input; element 0 is the input.
std::vector<std::vector<double>> forward_trace(const Network& net,
                                               std::span<const double> input);

// Backpropagates through an existing trace. Adds into `param_grads` (may be
// empty to skip), writes `input_grad` if non-empty.
void backward_from_trace(const Network& net,
                         const std::vector<std::vector<double>>& trace,
                         std::span<const double> output_grad,
                         std::span<double> param_grads,
                         std::span<double> input_grad);

// Gradients w.r.t. each layer's pre-activation (deltas[k] has layers()[k].out
// entries). Writes `input_grad` if non-empty.
std::vector<std::vector<double>> backprop_deltas(const Network& net,
                                                 const std::vector<std::vector<double>>& trace,
                                                 std::span<const double> output_grad,
                                                 std::span<double> input_grad);

// param_grads[layer k] += outer(delta, in), in output-unit order.
void accumulate_layer_grads(const LayerShape& layer, std::span<const double> in,
                            std::span<const double> delta, std::span<double> param_grads);

}  // namespace rlcycle::nn
