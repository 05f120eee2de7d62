#include <omp.h>

#include <cstddef>
#include <vector>

#include "rlcycle/errors.hpp"
#include "rlcycle/nn/batch_kernels.hpp"

// Layer-at-a-time kernels. Weights are transposed to in x out so the inner
// loop runs across output units; every unit still accumulates bias first and
// then inputs in index order, exactly like Network::forward.

namespace rlcycle::nn::omp {

namespace {

std::vector<double> transposed_weights(const Network& net, std::size_t k) {
  const LayerShape& layer = net.layers()[k];
  const auto w = net.weights(k);
  std::vector<double> wt(layer.in * layer.out);
  for (std::size_t o = 0; o < layer.out; ++o) {
    for (std::size_t i = 0; i < layer.in; ++i) wt[i * layer.out + o] = w[o * layer.in + i];
  }
  return wt;
}

Matrix dense_layer(const Network& net, std::size_t k, const Matrix& in) {
  const LayerShape& layer = net.layers()[k];
  const std::vector<double> wt = transposed_weights(net, k);
  const auto b = net.biases(k);
  Matrix out(in.rows(), layer.out);
  const auto rows = static_cast<std::ptrdiff_t>(in.rows());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t r = 0; r < rows; ++r) {
    const auto x = in.row(static_cast<std::size_t>(r));
    double* z = out.row(static_cast<std::size_t>(r)).data();
    for (std::size_t o = 0; o < layer.out; ++o) z[o] = b[o];
    for (std::size_t i = 0; i < layer.in; ++i) {
      const double xi = x[i];
      const double* wi = wt.data() + i * layer.out;
      for (std::size_t o = 0; o < layer.out; ++o) z[o] += wi[o] * xi;
    }
    for (std::size_t o = 0; o < layer.out; ++o) z[o] = activate(layer.activation, z[o]);
  }
  return out;
}

}  // namespace

Matrix batch_forward(const Network& net, const Matrix& inputs) {
  if (inputs.cols() != net.input_size()) throw ShapeError("batch input width mismatch");
  if (net.layer_count() == 0) throw ShapeError("forward on an empty network");
  Matrix a = dense_layer(net, 0, inputs);
  for (std::size_t k = 1; k < net.layer_count(); ++k) a = dense_layer(net, k, a);
  return a;
}

BatchGradient batch_backward(const Network& net, const Matrix& inputs,
                             const Matrix& output_grads, bool want_input_grads) {
  if (inputs.cols() != net.input_size()) throw ShapeError("batch input width mismatch");
  if (output_grads.rows() != inputs.rows() || output_grads.cols() != net.output_size()) {
    throw ShapeError("batch output gradient shape mismatch");
  }
  if (net.layer_count() == 0) throw ShapeError("backward on an empty network");
  BatchGradient result;
  result.parameter_grads.assign(net.parameter_count(), 0.0);
  const std::size_t n_rows = inputs.rows();
  if (want_input_grads) result.input_grads = Matrix(n_rows, inputs.cols());
  if (n_rows == 0) return result;

  const std::size_t layers = net.layer_count();
  std::vector<Matrix> acts;  // acts[k] feeds layer k
  acts.reserve(layers + 1);
  acts.push_back(inputs);
  for (std::size_t k = 0; k < layers; ++k) acts.push_back(dense_layer(net, k, acts.back()));

  const auto rows = static_cast<std::ptrdiff_t>(n_rows);
  Matrix delta = output_grads;
  for (std::size_t k = layers; k-- > 0;) {
    const LayerShape& layer = net.layers()[k];
    const Matrix& out = acts[k + 1];
    const Matrix& in = acts[k];
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t r = 0; r < rows; ++r) {
      const auto ur = static_cast<std::size_t>(r);
      for (std::size_t o = 0; o < layer.out; ++o) {
        delta(ur, o) *= activation_slope(layer.activation, out(ur, o));
      }
    }

    // Parameter gradients: units in parallel, rows summed in order.
    double* gw = result.parameter_grads.data() + layer.weight_offset;
    double* gb = result.parameter_grads.data() + layer.bias_offset;
    const auto units = static_cast<std::ptrdiff_t>(layer.out);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t uo = 0; uo < units; ++uo) {
      const auto o = static_cast<std::size_t>(uo);
      double* row = gw + o * layer.in;
      for (std::size_t r = 0; r < n_rows; ++r) {
        const double d = delta(r, o);
        const double* x = in.row(r).data();
        for (std::size_t i = 0; i < layer.in; ++i) row[i] += d * x[i];
        gb[o] += d;
      }
    }

    if (k == 0 && !want_input_grads) break;
    const auto w = net.weights(k);
    Matrix upstream(n_rows, layer.in);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t r = 0; r < rows; ++r) {
      const auto ur = static_cast<std::size_t>(r);
      double* up = upstream.row(ur).data();
      for (std::size_t o = 0; o < layer.out; ++o) {
        const double d = delta(ur, o);
        const double* wo = w.data() + o * layer.in;
        for (std::size_t i = 0; i < layer.in; ++i) up[i] += d * wo[i];
      }
    }
    delta = std::move(upstream);
  }
  if (want_input_grads) result.input_grads = std::move(delta);
  return result;
}

}  // namespace rlcycle::nn::omp
