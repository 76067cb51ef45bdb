#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "seqtab/tensor.hpp"

namespace seqtab {

class NonFiniteError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct AdamConfig {
  double alpha = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Moments are shaped like their parameters and keyed by position in the
// parameter list passed to adam_step.
template <typename T>
struct AdamState {
  AdamConfig config;
  long step = 0;
  std::vector<Array<T>> first_moment;
  std::vector<Array<T>> second_moment;
};

// One bias-corrected Adam update from each parameter's grad. Throws
// NonFiniteError naming the first parameter with a non-finite gradient,
// before anything is modified.
template <typename T>
void adam_step(const std::vector<Parameter<T>*>& params, AdamState<T>& state);

// Global L2 norm of all gradients.
template <typename T>
double grad_norm(const std::vector<Parameter<T>*>& params);

// Scales gradients so their global norm is at most max_norm.
template <typename T>
void clip_grad_norm(const std::vector<Parameter<T>*>& params, double max_norm);

}  // namespace seqtab
