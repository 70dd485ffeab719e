#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "ballot/nn/random.hpp"
#include "ballot/nn/tensor.hpp"

namespace ballot::nn {

enum class Activation { none, relu, sigmoid, softmax };

enum class Mode { train, inference };

struct ConvLayerSpec {
  Index window = 1;
  Index filters = 1;
  std::optional<Index> pool;
  Index in_channels = 1;

  void validate() const {
    if (window < 1) throw Error(Errc::config, "conv window must be >= 1");
    if (filters < 1) throw Error(Errc::config, "conv filters must be >= 1");
    if (in_channels < 1) throw Error(Errc::config, "conv in_channels must be >= 1");
    if (pool && *pool < 2) throw Error(Errc::config, "conv pool size must be >= 2 when present");
  }

  // Rows after convolution and optional pooling, or -1 when the input is too short.
  Index output_rows(Index input_rows) const {
    Index rows = input_rows - window + 1;
    if (rows < 1) return -1;
    if (pool) {
      if (rows < *pool) return -1;
      rows /= *pool;
    }
    return rows;
  }
};

struct DenseLayerSpec {
  Index in_size = 1;
  Index out_size = 1;
  Activation activation = Activation::none;
  double dropout_rate = 0.0;

  void validate() const {
    if (in_size < 1 || out_size < 1) throw Error(Errc::config, "dense sizes must be >= 1");
    if (!(dropout_rate >= 0.0 && dropout_rate < 1.0))
      throw Error(Errc::config, "dropout rate must lie in [0,1)");
  }
};

namespace detail {

template <typename Scalar>
using WindowMap = Eigen::Map<const Matrix<Scalar>, Eigen::Unaligned, Eigen::OuterStride<>>;

// Overlapping view whose row i is input rows [i, i+window) laid end to end.
template <typename Scalar>
WindowMap<Scalar> windows(const Matrix<Scalar>& x, Index window) {
  return WindowMap<Scalar>(x.data(), x.rows() - window + 1, window * x.cols(),
                           Eigen::OuterStride<>(x.cols()));
}

template <typename Scalar>
void activate_inplace(Matrix<Scalar>& z, Activation act) {
  switch (act) {
    case Activation::none:
      break;
    case Activation::relu:
      z = z.cwiseMax(Scalar(0));
      break;
    case Activation::sigmoid:
      z = (Scalar(1) + (-z.array()).exp()).inverse().matrix();
      break;
    case Activation::softmax:
      for (Index r = 0; r < z.rows(); ++r) {
        const Scalar top = z.row(r).maxCoeff();
        z.row(r) = (z.row(r).array() - top).exp().matrix();
        z.row(r) /= z.row(r).sum();
      }
      break;
  }
}

// Gradient with respect to the pre-activation, given the activation output.
template <typename Scalar>
Matrix<Scalar> activation_backward(const Matrix<Scalar>& output, const Matrix<Scalar>& grad_output,
                                   Activation act) {
  switch (act) {
    case Activation::none:
      return grad_output;
    case Activation::relu:
      return (output.array() > Scalar(0)).select(grad_output, Scalar(0));
    case Activation::sigmoid:
      return (grad_output.array() * output.array() * (Scalar(1) - output.array())).matrix();
    case Activation::softmax: {
      Matrix<Scalar> dz(output.rows(), output.cols());
      for (Index r = 0; r < output.rows(); ++r) {
        const Scalar inner = output.row(r).dot(grad_output.row(r));
        dz.row(r) = (output.row(r).array() * (grad_output.row(r).array() - inner)).matrix();
      }
      return dz;
    }
  }
  return grad_output;
}

}  // namespace detail

// Valid 1-d convolution, stride 1. Filter k is row k of `weights`, laid out as
// window-major (row offset, channel). Output row i is
// act(weights * vec(input[i : i+window]) + bias).
template <typename DerivedX, typename DerivedW, typename DerivedB>
Matrix<typename DerivedX::Scalar> conv1d_forward(const Eigen::MatrixBase<DerivedX>& input,
                                                 const Eigen::MatrixBase<DerivedW>& weights,
                                                 const Eigen::MatrixBase<DerivedB>& bias,
                                                 Activation act = Activation::relu) {
  using Scalar = typename DerivedX::Scalar;
  const Index channels = input.cols();
  if (channels == 0 || weights.cols() % channels != 0)
    throw Error(Errc::shape, "conv1d: filter width " + std::to_string(weights.cols()) +
                                 " is not a multiple of input channels " +
                                 std::to_string(channels));
  const Index window = weights.cols() / channels;
  if (input.rows() < window)
    throw Error(Errc::shape, "conv1d: sequence length " + std::to_string(input.rows()) +
                                 " is shorter than window " + std::to_string(window));
  if (bias.size() != weights.rows())
    throw Error(Errc::shape, "conv1d: bias size " + std::to_string(bias.size()) +
                                 " does not match filter count " + std::to_string(weights.rows()));
  const Matrix<Scalar> x = input;
  Matrix<Scalar> z = detail::windows(x, window) * weights.transpose();
  z.rowwise() += bias.derived().reshaped().transpose();
  detail::activate_inplace(z, act);
  return z;
}

// Accumulates into grad_weights / grad_bias; writes grad_input when non-null.
template <typename Scalar>
void conv1d_backward(const Matrix<Scalar>& input, const Matrix<Scalar>& weights,
                     const Matrix<Scalar>& output, const Matrix<Scalar>& grad_output,
                     Activation act, Matrix<Scalar>& grad_weights, Matrix<Scalar>& grad_bias,
                     Matrix<Scalar>* grad_input) {
  const Index channels = input.cols();
  const Index window = weights.cols() / channels;
  const Index out_rows = input.rows() - window + 1;
  if (grad_output.rows() != out_rows || grad_output.cols() != weights.rows())
    throw Error(Errc::shape, "conv1d_backward: gradient shape " + shape_str(grad_output) +
                                 " does not match output " + shape_str(out_rows, weights.rows()));
  const Matrix<Scalar> dz = detail::activation_backward(output, grad_output, act);
  grad_weights.noalias() += dz.transpose() * detail::windows(input, window);
  grad_bias.reshaped() += dz.colwise().sum().transpose();
  if (grad_input) {
    grad_input->setZero(input.rows(), channels);
    for (Index k = 0; k < window; ++k) {
      grad_input->middleRows(k, out_rows).noalias() +=
          dz * weights.middleCols(k * channels, channels);
    }
  }
}

// Non-overlapping max pooling over row blocks of `pool`; trailing rows that do
// not fill a block are dropped. `argmax`, when given, records the winning row
// of each output element (first row on ties).
template <typename Derived>
Matrix<typename Derived::Scalar> maxpool1d(const Eigen::MatrixBase<Derived>& input, Index pool,
                                           IndexMatrix* argmax = nullptr) {
  using Scalar = typename Derived::Scalar;
  if (pool < 1) throw Error(Errc::parameter, "maxpool1d: pool size must be >= 1");
  if (input.rows() < pool)
    throw Error(Errc::shape, "maxpool1d: " + std::to_string(input.rows()) +
                                 " rows cannot fill a pool of " + std::to_string(pool));
  const Index out_rows = input.rows() / pool;
  const Index cols = input.cols();
  Matrix<Scalar> out(out_rows, cols);
  if (argmax) argmax->resize(out_rows, cols);
  for (Index r = 0; r < out_rows; ++r) {
    const Index base = r * pool;
    out.row(r) = input.row(base);
    if (argmax) argmax->row(r).setConstant(base);
    for (Index k = 1; k < pool; ++k) {
      for (Index c = 0; c < cols; ++c) {
        const Scalar v = input(base + k, c);
        if (v > out(r, c)) {
          out(r, c) = v;
          if (argmax) (*argmax)(r, c) = base + k;
        }
      }
    }
  }
  return out;
}

template <typename Scalar>
Matrix<Scalar> maxpool1d_backward(const Matrix<Scalar>& grad_output, const IndexMatrix& argmax,
                                  Index input_rows) {
  Matrix<Scalar> grad = Matrix<Scalar>::Zero(input_rows, grad_output.cols());
  for (Index r = 0; r < grad_output.rows(); ++r)
    for (Index c = 0; c < grad_output.cols(); ++c) grad(argmax(r, c), c) += grad_output(r, c);
  return grad;
}

// Column-wise maximum over all rows.
template <typename Derived>
RowVector<typename Derived::Scalar> max_over_time(const Eigen::MatrixBase<Derived>& input,
                                                  IndexMatrix* argmax = nullptr) {
  if (input.rows() < 1 || input.cols() < 1)
    throw Error(Errc::shape, "max_over_time: empty input " + shape_str(input));
  return maxpool1d(input, input.rows(), argmax).row(0);
}

// Batched affine layer: rows of `input` are examples, weights are out x in.
template <typename DerivedX, typename DerivedW, typename DerivedB>
Matrix<typename DerivedX::Scalar> dense_forward(const Eigen::MatrixBase<DerivedX>& input,
                                                const Eigen::MatrixBase<DerivedW>& weights,
                                                const Eigen::MatrixBase<DerivedB>& bias,
                                                Activation act) {
  using Scalar = typename DerivedX::Scalar;
  if (input.cols() != weights.cols())
    throw Error(Errc::shape, "dense: input width " + std::to_string(input.cols()) +
                                 " does not match layer input size " +
                                 std::to_string(weights.cols()));
  if (bias.size() != weights.rows())
    throw Error(Errc::shape, "dense: bias size does not match output size");
  Matrix<Scalar> z = input * weights.transpose();
  z.rowwise() += bias.derived().reshaped().transpose();
  detail::activate_inplace(z, act);
  return z;
}

// Single-example form checked against a layer spec.
template <typename Scalar>
Vector<Scalar> dense_forward(const Vector<Scalar>& input, const DenseLayerSpec& spec,
                             const Matrix<Scalar>& weights, const Matrix<Scalar>& bias) {
  if (input.size() != spec.in_size)
    throw Error(Errc::shape, "dense: input length " + std::to_string(input.size()) +
                                 " does not match in_size " + std::to_string(spec.in_size));
  if (weights.rows() != spec.out_size || weights.cols() != spec.in_size)
    throw Error(Errc::shape, "dense: weights " + shape_str(weights) + " do not match spec " +
                                 shape_str(spec.out_size, spec.in_size));
  return dense_forward(input.transpose(), weights, bias, spec.activation).transpose();
}

template <typename Scalar>
void dense_backward(const Matrix<Scalar>& input, const Matrix<Scalar>& weights,
                    const Matrix<Scalar>& output, const Matrix<Scalar>& grad_output, Activation act,
                    Matrix<Scalar>& grad_weights, Matrix<Scalar>& grad_bias,
                    Matrix<Scalar>* grad_input) {
  if (grad_output.rows() != input.rows() || grad_output.cols() != weights.rows())
    throw Error(Errc::shape, "dense_backward: gradient shape " + shape_str(grad_output) +
                                 " does not match output " +
                                 shape_str(input.rows(), weights.rows()));
  const Matrix<Scalar> dz = detail::activation_backward(output, grad_output, act);
  grad_weights.noalias() += dz.transpose() * input;
  grad_bias.reshaped() += dz.colwise().sum().transpose();
  if (grad_input) *grad_input = dz * weights;
}

// Softmax of a vector, shifted by its maximum before exponentiation.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> softmax(
    const Eigen::MatrixBase<Derived>& logits) {
  using Scalar = typename Derived::Scalar;
  if (logits.size() == 0) throw Error(Errc::shape, "softmax: empty logits");
  Matrix<Scalar> row = logits.reshaped().transpose();
  detail::activate_inplace(row, Activation::softmax);
  return row.transpose();
}

template <typename Scalar>
Scalar sigmoid(Scalar z) {
  return Scalar(1) / (Scalar(1) + std::exp(-z));
}

inline void check_dropout_rate(double rate) {
  if (!(rate >= 0.0 && rate < 1.0))
    throw Error(Errc::parameter, "dropout rate " + std::to_string(rate) + " outside [0,1)");
}

// Inverted-dropout mask: each entry is 0 with probability `rate`, else 1/(1-rate).
template <typename Scalar>
Matrix<Scalar> dropout_mask(Index rows, Index cols, double rate, Rng& rng) {
  check_dropout_rate(rate);
  const Scalar keep_scale = static_cast<Scalar>(1.0 / (1.0 - rate));
  Matrix<Scalar> mask(rows, cols);
  for (Index i = 0; i < mask.size(); ++i)
    mask.data()[i] = uniform01(rng) < rate ? Scalar(0) : keep_scale;
  return mask;
}

template <typename Derived>
Matrix<typename Derived::Scalar> dropout_apply(const Eigen::MatrixBase<Derived>& input, double rate,
                                               Mode mode, Rng& rng) {
  using Scalar = typename Derived::Scalar;
  check_dropout_rate(rate);
  if (mode == Mode::inference || rate == 0.0) return input;
  return input.cwiseProduct(dropout_mask<Scalar>(input.rows(), input.cols(), rate, rng));
}

}  // namespace ballot::nn
