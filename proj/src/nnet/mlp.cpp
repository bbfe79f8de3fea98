#include "xrl/nnet/mlp.hpp"

#include <random>
#include <string>

#include "xrl/error.hpp"

namespace xrl::nnet {

namespace {

using ConstWeights = Eigen::Map<const RowMajorMatrix>;
using Weights = Eigen::Map<RowMajorMatrix>;

void check_params(const MlpSpec& spec, const ParameterVector& params) {
  if (static_cast<std::size_t>(params.size()) != spec.parameter_count()) {
    throw UsageError("parameter vector has " + std::to_string(params.size()) +
                     " entries, network expects " +
                     std::to_string(spec.parameter_count()));
  }
}

}  // namespace

std::size_t MlpSpec::fan_in(std::size_t layer) const {
  return layer == 0 ? input_dim : hidden_sizes[layer - 1];
}

std::size_t MlpSpec::fan_out(std::size_t layer) const {
  return layer + 1 == num_layers() ? output_dim : hidden_sizes[layer];
}

std::size_t MlpSpec::layer_offset(std::size_t layer) const {
  std::size_t offset = 0;
  for (std::size_t l = 0; l < layer; ++l) offset += (fan_in(l) + 1) * fan_out(l);
  return offset;
}

std::size_t MlpSpec::parameter_count() const { return layer_offset(num_layers()); }

void MlpSpec::validate() const {
  if (input_dim == 0 || output_dim == 0) {
    throw UsageError("network dimensions must be at least 1");
  }
  for (std::size_t h : hidden_sizes) {
    if (h == 0) throw UsageError("hidden layer sizes must be at least 1");
  }
}

Eigen::VectorXd mlp_forward(const MlpSpec& spec, const ParameterVector& params,
                            std::span<const double> input) {
  check_params(spec, params);
  if (input.size() != spec.input_dim) {
    throw UsageError("input has " + std::to_string(input.size()) +
                     " entries, network expects " +
                     std::to_string(spec.input_dim));
  }
  Eigen::VectorXd x =
      Eigen::Map<const Eigen::VectorXd>(input.data(), input.size());
  const double* p = params.data();
  for (std::size_t l = 0; l < spec.num_layers(); ++l) {
    const auto in = static_cast<Eigen::Index>(spec.fan_in(l));
    const auto out = static_cast<Eigen::Index>(spec.fan_out(l));
    ConstWeights w(p, out, in);
    Eigen::Map<const Eigen::VectorXd> b(p + out * in, out);
    Eigen::VectorXd z = w * x + b;
    if (l + 1 < spec.num_layers()) z = z.array().tanh();
    x = std::move(z);
    p += (in + 1) * out;
  }
  return x;
}

Matrix mlp_forward_batch(const MlpSpec& spec, const ParameterVector& params,
                         const Matrix& inputs, ForwardCache* cache) {
  check_params(spec, params);
  if (static_cast<std::size_t>(inputs.rows()) != spec.input_dim) {
    throw UsageError("batch input has " + std::to_string(inputs.rows()) +
                     " rows, network expects " + std::to_string(spec.input_dim));
  }
  if (cache != nullptr) {
    cache->activations.clear();
    cache->activations.push_back(inputs);
  }
  Matrix x = inputs;
  const double* p = params.data();
  for (std::size_t l = 0; l < spec.num_layers(); ++l) {
    const auto in = static_cast<Eigen::Index>(spec.fan_in(l));
    const auto out = static_cast<Eigen::Index>(spec.fan_out(l));
    ConstWeights w(p, out, in);
    Eigen::Map<const Eigen::VectorXd> b(p + out * in, out);
    Matrix z = w * x;
    z.colwise() += b;
    if (l + 1 < spec.num_layers()) z = z.array().tanh();
    if (cache != nullptr) cache->activations.push_back(z);
    x = std::move(z);
    p += (in + 1) * out;
  }
  return x;
}

ParameterVector mlp_backward(const MlpSpec& spec, const ParameterVector& params,
                             const ForwardCache& cache,
                             const Matrix& grad_output) {
  check_params(spec, params);
  if (cache.activations.size() != spec.num_layers() + 1) {
    throw UsageError("forward cache does not match network depth");
  }
  ParameterVector grad = ParameterVector::Zero(params.size());
  Matrix delta = grad_output;
  for (std::size_t l = spec.num_layers(); l-- > 0;) {
    const auto in = static_cast<Eigen::Index>(spec.fan_in(l));
    const auto out = static_cast<Eigen::Index>(spec.fan_out(l));
    const auto offset = static_cast<Eigen::Index>(spec.layer_offset(l));
    if (l + 1 < spec.num_layers()) {
      const Matrix& h = cache.activations[l + 1];
      delta = delta.array() * (1.0 - h.array().square());
    }
    const Matrix& x = cache.activations[l];
    Weights gw(grad.data() + offset, out, in);
    gw.noalias() = delta * x.transpose();
    grad.segment(offset + out * in, out) = delta.rowwise().sum();
    if (l > 0) {
      ConstWeights w(params.data() + offset, out, in);
      delta = w.transpose() * delta;
    }
  }
  return grad;
}

ParameterVector init_parameters(const MlpSpec& spec, double output_gain,
                                Rng& rng) {
  spec.validate();
  ParameterVector params = ParameterVector::Zero(spec.parameter_count());
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t l = 0; l < spec.num_layers(); ++l) {
    const auto in = static_cast<Eigen::Index>(spec.fan_in(l));
    const auto out = static_cast<Eigen::Index>(spec.fan_out(l));
    const Eigen::Index tall = std::max(in, out);
    const Eigen::Index wide = std::min(in, out);
    Matrix a(tall, wide);
    for (Eigen::Index j = 0; j < wide; ++j) {
      for (Eigen::Index i = 0; i < tall; ++i) a(i, j) = normal(rng);
    }
    Eigen::HouseholderQR<Matrix> qr(a);
    Matrix q = qr.householderQ() * Matrix::Identity(tall, wide);
    const Matrix r = qr.matrixQR().topRows(wide).triangularView<Eigen::Upper>();
    for (Eigen::Index j = 0; j < wide; ++j) {
      if (r(j, j) < 0.0) q.col(j) *= -1.0;
    }
    const double gain = l + 1 == spec.num_layers() ? output_gain : 1.0;
    Weights w(params.data() + spec.layer_offset(l), out, in);
    if (out >= in) {
      w = gain * q;
    } else {
      w = gain * q.transpose();
    }
  }
  return params;
}

}  // namespace xrl::nnet
