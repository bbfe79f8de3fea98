#include "xrl/nnet/adam.hpp"

#include <cmath>

#include "xrl/error.hpp"

namespace xrl::nnet {

void adam_step(ParameterVector& params, const ParameterVector& grad,
               AdamState& state, double step_size) {
  if (grad.size() != params.size() ||
      state.first_moment.size() != params.size() ||
      state.second_moment.size() != params.size()) {
    throw UsageError("adam_step: parameter, gradient and moment sizes differ");
  }
  state.step_count += 1;
  const double t = static_cast<double>(state.step_count);
  const double correction1 = 1.0 - std::pow(state.beta1, t);
  const double correction2 = 1.0 - std::pow(state.beta2, t);
  state.first_moment = state.beta1 * state.first_moment + (1.0 - state.beta1) * grad;
  state.second_moment =
      state.beta2 * state.second_moment + (1.0 - state.beta2) * grad.cwiseAbs2();
  params.array() -= step_size * (state.first_moment.array() / correction1) /
                    ((state.second_moment.array() / correction2).sqrt() +
                     state.epsilon);
}

}  // namespace xrl::nnet
