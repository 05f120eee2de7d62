#include "rlcycle/nn/network.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rlcycle/errors.hpp"

namespace rlcycle::nn {

std::string_view to_string(Activation a) {
  switch (a) {
    case Activation::kTanh:
      return "tanh";
    case Activation::kRelu:
      return "relu";
    case Activation::kLinear:
      return "linear";
  }
  return "linear";
}

Activation activation_from_string(std::string_view name) {
  if (name == "tanh") return Activation::kTanh;
  if (name == "relu") return Activation::kRelu;
  if (name == "linear") return Activation::kLinear;
  throw ParseError("unknown activation '" + std::string(name) + "'");
}

Network::Network(std::span<const std::size_t> sizes,
                 std::span<const Activation> activations) {
  if (sizes.size() < 2) throw ShapeError("network needs at least one layer");
  if (activations.size() != sizes.size() - 1) {
    throw ShapeError("need one activation per layer");
  }
  std::size_t offset = 0;
  for (std::size_t k = 0; k + 1 < sizes.size(); ++k) {
    if (sizes[k] == 0 || sizes[k + 1] == 0) throw ShapeError("zero-width layer");
    LayerShape layer;
    layer.in = sizes[k];
    layer.out = sizes[k + 1];
    layer.activation = activations[k];
    layer.weight_offset = offset;
    layer.bias_offset = offset + layer.in * layer.out;
    offset += layer.parameter_count();
    layers_.push_back(layer);
  }
  params_.assign(offset, 0.0);
}

Network Network::initialized(std::span<const std::size_t> sizes,
                             std::span<const Activation> activations,
                             std::mt19937_64& rng) {
  Network net(sizes, activations);
  for (std::size_t k = 0; k < net.layers_.size(); ++k) {
    const auto& layer = net.layers_[k];
    const double fan_in = static_cast<double>(layer.in);
    const double fan_out = static_cast<double>(layer.out);
    const double limit = layer.activation == Activation::kRelu
                             ? std::sqrt(6.0 / fan_in)
                             : std::sqrt(6.0 / (fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (double& w : net.weights(k)) w = dist(rng);
  }
  return net;
}

Network Network::mlp(std::size_t inputs, std::span<const std::size_t> hidden,
                     std::size_t outputs, Activation hidden_activation,
                     std::mt19937_64& rng) {
  std::vector<std::size_t> sizes{inputs};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(outputs);
  std::vector<Activation> acts(hidden.size(), hidden_activation);
  acts.push_back(Activation::kLinear);
  return initialized(sizes, acts, rng);
}

std::size_t Network::input_size() const {
  return layers_.empty() ? 0 : layers_.front().in;
}

std::size_t Network::output_size() const {
  return layers_.empty() ? 0 : layers_.back().out;
}

std::span<double> Network::weights(std::size_t layer) {
  const auto& l = layers_.at(layer);
  return {params_.data() + l.weight_offset, l.in * l.out};
}

std::span<const double> Network::weights(std::size_t layer) const {
  const auto& l = layers_.at(layer);
  return {params_.data() + l.weight_offset, l.in * l.out};
}

std::span<double> Network::biases(std::size_t layer) {
  const auto& l = layers_.at(layer);
  return {params_.data() + l.bias_offset, l.out};
}

std::span<const double> Network::biases(std::size_t layer) const {
  const auto& l = layers_.at(layer);
  return {params_.data() + l.bias_offset, l.out};
}

namespace {

void dense(const LayerShape& layer, std::span<const double> params,
           std::span<const double> in, std::span<double> out) {
  const double* w = params.data() + layer.weight_offset;
  const double* b = params.data() + layer.bias_offset;
  const std::size_t n_in = layer.in;
  const double* x = in.data();
  std::size_t o = 0;
  // Four units at a time; each unit still sums its inputs in order.
  for (; o + 4 <= layer.out; o += 4) {
    const double* r0 = w + o * n_in;
    const double* r1 = r0 + n_in;
    const double* r2 = r1 + n_in;
    const double* r3 = r2 + n_in;
    double z0 = b[o], z1 = b[o + 1], z2 = b[o + 2], z3 = b[o + 3];
    for (std::size_t i = 0; i < n_in; ++i) {
      z0 += r0[i] * x[i];
      z1 += r1[i] * x[i];
      z2 += r2[i] * x[i];
      z3 += r3[i] * x[i];
    }
    out[o] = activate(layer.activation, z0);
    out[o + 1] = activate(layer.activation, z1);
    out[o + 2] = activate(layer.activation, z2);
    out[o + 3] = activate(layer.activation, z3);
  }
  for (; o < layer.out; ++o) {
    double z = b[o];
    const double* row = w + o * n_in;
    for (std::size_t i = 0; i < n_in; ++i) z += row[i] * x[i];
    out[o] = activate(layer.activation, z);
  }
}

}  // namespace

std::vector<double> Network::forward(std::span<const double> input) const {
  if (layers_.empty()) throw ShapeError("forward on an empty network");
  if (input.size() != input_size()) {
    throw ShapeError("input length " + std::to_string(input.size()) +
                     " != network input size " + std::to_string(input_size()));
  }
  std::vector<double> cur(input.begin(), input.end());
  std::vector<double> next;
  for (const auto& layer : layers_) {
    next.resize(layer.out);
    dense(layer, params_, cur, next);
    cur.swap(next);
  }
  return cur;
}

bool Network::all_finite() const {
  return std::all_of(params_.begin(), params_.end(),
                     [](double p) { return std::isfinite(p); });
}

std::vector<std::vector<double>> forward_trace(const Network& net,
                                               std::span<const double> input) {
  if (net.layer_count() == 0) throw ShapeError("forward on an empty network");
  if (input.size() != net.input_size()) {
    throw ShapeError("input length " + std::to_string(input.size()) +
                     " != network input size " + std::to_string(net.input_size()));
  }
  std::vector<std::vector<double>> trace;
  trace.reserve(net.layer_count() + 1);
  trace.emplace_back(input.begin(), input.end());
  for (const auto& layer : net.layers()) {
    std::vector<double> out(layer.out);
    dense(layer, net.parameters(), trace.back(), out);
    trace.push_back(std::move(out));
  }
  return trace;
}

std::vector<std::vector<double>> backprop_deltas(const Network& net,
                                                 const std::vector<std::vector<double>>& trace,
                                                 std::span<const double> output_grad,
                                                 std::span<double> input_grad) {
  if (output_grad.size() != net.output_size()) {
    throw ShapeError("output gradient length mismatch");
  }
  if (!input_grad.empty() && input_grad.size() != net.input_size()) {
    throw ShapeError("input gradient buffer mismatch");
  }
  const auto params = net.parameters();
  std::vector<std::vector<double>> deltas(net.layer_count());
  std::vector<double> delta(output_grad.begin(), output_grad.end());
  for (std::size_t k = net.layer_count(); k-- > 0;) {
    const auto& layer = net.layers()[k];
    const auto& out = trace[k + 1];
    for (std::size_t o = 0; o < layer.out; ++o) {
      delta[o] *= activation_slope(layer.activation, out[o]);
    }
    deltas[k] = delta;
    if (k == 0 && input_grad.empty()) break;
    std::vector<double> upstream(layer.in, 0.0);
    const double* w = params.data() + layer.weight_offset;
    for (std::size_t o = 0; o < layer.out; ++o) {
      const double d = delta[o];
      const double* row = w + o * layer.in;
      for (std::size_t i = 0; i < layer.in; ++i) upstream[i] += d * row[i];
    }
    delta.swap(upstream);
  }
  if (!input_grad.empty()) std::copy(delta.begin(), delta.end(), input_grad.begin());
  return deltas;
}

void accumulate_layer_grads(const LayerShape& layer, std::span<const double> in,
                            std::span<const double> delta, std::span<double> param_grads) {
  double* gw = param_grads.data() + layer.weight_offset;
  double* gb = param_grads.data() + layer.bias_offset;
  for (std::size_t o = 0; o < layer.out; ++o) {
    const double d = delta[o];
    double* row = gw + o * layer.in;
    for (std::size_t i = 0; i < layer.in; ++i) row[i] += d * in[i];
    gb[o] += d;
  }
}

void backward_from_trace(const Network& net,
                         const std::vector<std::vector<double>>& trace,
                         std::span<const double> output_grad,
                         std::span<double> param_grads,
                         std::span<double> input_grad) {
  if (!param_grads.empty() && param_grads.size() != net.parameter_count()) {
    throw ShapeError("parameter gradient buffer mismatch");
  }
  const auto deltas = backprop_deltas(net, trace, output_grad, input_grad);
  if (param_grads.empty()) return;
  for (std::size_t k = 0; k < net.layer_count(); ++k) {
    accumulate_layer_grads(net.layers()[k], trace[k], deltas[k], param_grads);
  }
}

BackwardResult backward(const Network& net, std::span<const double> input,
                        std::span<const double> output_grad) {
  const auto trace = forward_trace(net, input);
  BackwardResult result;
  result.parameter_grads.assign(net.parameter_count(), 0.0);
  result.input_grad.assign(net.input_size(), 0.0);
  backward_from_trace(net, trace, output_grad, result.parameter_grads,
                      result.input_grad);
  return result;
}

}  // namespace rlcycle::nn
