#pragma once

#include <vector>

#include "rlcycle/nn/matrix.hpp"
#include "rlcycle/nn/network.hpp"

namespace rlcycle::nn {

// Row-parallel kernels over a batch of samples (one sample per row).
//
// The OpenMP versions give bit-identical results to the serial reference:
// per-row gradients go into private buffers and are summed in row order, so
// floating-point association matches the serial accumulation.

enum class Backend { kSerial, kOpenMP };

struct BatchGradient {
  // Sum over rows of d<output_grads[r], f(inputs[r])>/d(theta).
  std::vector<double> parameter_grads;
  // Row r holds the input gradient of row r. Empty unless requested.
  Matrix input_grads;
};

namespace serial {
Matrix batch_forward(const Network& net, const Matrix& inputs);
BatchGradient batch_backward(const Network& net, const Matrix& inputs,
                             const Matrix& output_grads, bool want_input_grads);
}  // namespace serial

namespace omp {
Matrix batch_forward(const Network& net, const Matrix& inputs);
BatchGradient batch_backward(const Network& net, const Matrix& inputs,
                             const Matrix& output_grads, bool want_input_grads);
}  // namespace omp

inline Matrix batch_forward(const Network& net, const Matrix& inputs,
                            Backend backend = Backend::kOpenMP) {
  return backend == Backend::kSerial ? serial::batch_forward(net, inputs)
                                     : omp::batch_forward(net, inputs);
}

inline BatchGradient batch_backward(const Network& net, const Matrix& inputs,
                                    const Matrix& output_grads, bool want_input_grads,
                                    Backend backend = Backend::kOpenMP) {
  return backend == Backend::kSerial
             ? serial::batch_backward(net, inputs, output_grads, want_input_grads)
             : omp::batch_backward(net, inputs, output_grads, want_input_grads);
}

}  // namespace rlcycle::nn
