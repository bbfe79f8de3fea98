#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "xrl/seeding.hpp"

namespace xrl::nnet {

using ParameterVector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using RowMajorMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class Activation { kTanh };

// Dense network: tanh on hidden layers, identity on the output layer.
// Flat parameter layout is layer-major; within a layer the (out x in) weight
// matrix is stored row-major, followed by the bias.
struct MlpSpec {
  std::size_t input_dim = 1;
  std::vector<std::size_t> hidden_sizes = {64, 64};
  std::size_t output_dim = 1;
  Activation activation = Activation::kTanh;

  std::size_t num_layers() const { return hidden_sizes.size() + 1; }
  std::size_t fan_in(std::size_t layer) const;
  std::size_t fan_out(std::size_t layer) const;
  // Offset of the layer's weight block within the flat vector.
  std::size_t layer_offset(std::size_t layer) const;
  std::size_t parameter_count() const;

  void validate() const;

  bool operator==(const MlpSpec&) const = default;
};

// Activations of every layer (index 0 is the input) kept for backprop.
struct ForwardCache {
  std::vector<Matrix> activations;
};

Eigen::VectorXd mlp_forward(const MlpSpec& spec, const ParameterVector& params,
                            std::span<const double> input);

// Column-per-sample batch forward pass. `inputs` is (input_dim x batch).
Matrix mlp_forward_batch(const MlpSpec& spec, const ParameterVector& params,
                         const Matrix& inputs, ForwardCache* cache = nullptr);

// Reverse pass for a cached batch. `grad_output` holds dLoss/dOutput with the
// same shape as the forward output. Returns dLoss/dParams.
ParameterVector mlp_backward(const MlpSpec& spec, const ParameterVector& params,
                             const ForwardCache& cache,
                             const Matrix& grad_output);

// Orthogonal init: hidden layers use gain 1, the output layer `output_gain`.
// Biases start at zero.
ParameterVector init_parameters(const MlpSpec& spec, double output_gain,
                                Rng& rng);

// A network together with its parameters.
struct Mlp {
  MlpSpec spec;
  ParameterVector params;

  Eigen::VectorXd operator()(std::span<const double> input) const {
    return mlp_forward(spec, params, input);
  }
};

}  // namespace xrl::nnet
