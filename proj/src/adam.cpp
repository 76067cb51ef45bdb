#include "seqtab/adam.hpp"

#include <cmath>

namespace seqtab {

template <typename T>
void adam_step(const std::vector<Parameter<T>*>& params, AdamState<T>& state) {
  for (const auto* p : params) {
    if (p->grad.shape() != p->value.shape()) {
      throw ShapeError("adam_step: gradient of " + p->name + " has shape " + shape_str(p->grad.shape()) +
                       ", parameter has " + shape_str(p->value.shape()));
    }
    for (T g : p->grad.values()) {
      if (!std::isfinite(g)) throw NonFiniteError("non-finite gradient in parameter " + p->name);
    }
  }
  if (state.first_moment.empty()) {
    for (const auto* p : params) {
      state.first_moment.emplace_back(p->value.shape());
      state.second_moment.emplace_back(p->value.shape());
    }
  }
  if (state.first_moment.size() != params.size()) {
    throw ShapeError("adam_step: state tracks " + std::to_string(state.first_moment.size()) + " parameters, given " +
                     std::to_string(params.size()));
  }
  const AdamConfig& c = state.config;
  ++state.step;
  const double bc1 = 1.0 - std::pow(c.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(c.beta2, static_cast<double>(state.step));
  for (size_t k = 0; k < params.size(); ++k) {
    Parameter<T>& p = *params[k];
    Array<T>& m = state.first_moment[k];
    Array<T>& v = state.second_moment[k];
    if (m.shape() != p.value.shape()) throw ShapeError("adam_step: moment shape mismatch for " + p.name);
    for (size_t i = 0; i < p.value.size(); ++i) {
      const double g = p.grad[i];
      const double mi = c.beta1 * m[i] + (1.0 - c.beta1) * g;
      const double vi = c.beta2 * v[i] + (1.0 - c.beta2) * g * g;
      m[i] = static_cast<T>(mi);
      v[i] = static_cast<T>(vi);
      const double update = c.alpha * (mi / bc1) / (std::sqrt(vi / bc2) + c.epsilon);
      p.value[i] = static_cast<T>(p.value[i] - update);
    }
  }
}

template <typename T>
double grad_norm(const std::vector<Parameter<T>*>& params) {
  double total = 0;
  for (const auto* p : params) {
    for (T g : p->grad.values()) total += static_cast<double>(g) * g;
  }
  return std::sqrt(total);
}

template <typename T>
void clip_grad_norm(const std::vector<Parameter<T>*>& params, double max_norm) {
  const double norm = grad_norm(params);
  if (!(norm > max_norm)) return;
  const T scale = static_cast<T>(max_norm / norm);
  for (auto* p : params) {
    for (T& g : p->grad.values()) g *= scale;
  }
}

template void adam_step<float>(const std::vector<Parameter<float>*>&, AdamState<float>&);
template void adam_step<double>(const std::vector<Parameter<double>*>&, AdamState<double>&);
template double grad_norm<float>(const std::vector<Parameter<float>*>&);
template double grad_norm<double>(const std::vector<Parameter<double>*>&);
template void clip_grad_norm<float>(const std::vector<Parameter<float>*>&, double);
template void clip_grad_norm<double>(const std::vector<Parameter<double>*>&, double);

}  // namespace seqtab
