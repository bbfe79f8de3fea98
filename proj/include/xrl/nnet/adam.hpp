#pragma once

#include <cstdint>

#include "xrl/nnet/mlp.hpp"

namespace xrl::nnet {

struct AdamState {
  Eigen::VectorXd first_moment;
  Eigen::VectorXd second_moment;
  std::uint64_t step_count = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  static AdamState zeros(Eigen::Index size) {
    AdamState s;
    s.first_moment = Eigen::VectorXd::Zero(size);
    s.second_moment = Eigen::VectorXd::Zero(size);
    return s;
  }
};

// One bias-corrected Adam descent step on `params` (minimizes the loss whose
// gradient is `grad`). Updates both arguments in place.
void adam_step(ParameterVector& params, const ParameterVector& grad,
               AdamState& state, double step_size);

}  // namespace xrl::nnet
