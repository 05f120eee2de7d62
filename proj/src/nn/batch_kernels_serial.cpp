#include "rlcycle/errors.hpp"
#include "rlcycle/nn/batch_kernels.hpp"

namespace rlcycle::nn::serial {

Matrix batch_forward(const Network& net, const Matrix& inputs) {
  if (inputs.cols() != net.input_size()) throw ShapeError("batch input width mismatch");
  Matrix out(inputs.rows(), net.output_size());
  for (std::size_t r = 0; r < inputs.rows(); ++r) {
    const auto y = net.forward(inputs.row(r));
    std::copy(y.begin(), y.end(), out.row(r).begin());
  }
  return out;
}

BatchGradient batch_backward(const Network& net, const Matrix& inputs,
                             const Matrix& output_grads, bool want_input_grads) {
  if (inputs.cols() != net.input_size()) throw ShapeError("batch input width mismatch");
  if (output_grads.rows() != inputs.rows() || output_grads.cols() != net.output_size()) {
    throw ShapeError("batch output gradient shape mismatch");
  }
  BatchGradient result;
  result.parameter_grads.assign(net.parameter_count(), 0.0);
  if (want_input_grads) result.input_grads = Matrix(inputs.rows(), inputs.cols());
  for (std::size_t r = 0; r < inputs.rows(); ++r) {
    const auto trace = forward_trace(net, inputs.row(r));
    std::span<double> input_grad;
    if (want_input_grads) input_grad = result.input_grads.row(r);
    backward_from_trace(net, trace, output_grads.row(r), result.parameter_grads,
                        input_grad);
  }
  return result;
}

}  // namespace rlcycle::nn::serial
