#include "crab/adam.hpp"

#include <cmath>

#include "crab/errors.hpp"

namespace crab {

AdamState AdamState::init(const std::vector<const Tensor*>& params, AdamHyper hyper) {
    AdamState s;
    s.hyper = hyper;
    s.m.reserve(params.size());
    s.v.reserve(params.size());
    for (const Tensor* p : params) {
        s.m.push_back(Tensor::zeros(p->shape));
        s.v.push_back(Tensor::zeros(p->shape));
    }
    return s;
}

void adam_step(std::vector<Tensor*>& params, const std::vector<Tensor>& grads, AdamState& state,
               const std::vector<std::string>& names) {
    if (params.size() != grads.size() || params.size() != state.m.size()) {
        throw ContractError("adam_step: parameter/gradient/state count mismatch");
    }
    state.step += 1;
    const auto& h = state.hyper;
    const double bc1 = 1.0 - std::pow(h.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(h.beta2, static_cast<double>(state.step));
    for (std::size_t i = 0; i < params.size(); ++i) {
        Tensor& p = *params[i];
        const Tensor& g = grads[i];
        if (g.data.empty() || !g.same_shape(p)) {
            const std::string who = i < names.size() ? names[i] : ("#" + std::to_string(i));
            throw ContractError("adam_step: missing or misshapen gradient for parameter " + who);
        }
        Tensor& m = state.m[i];
        Tensor& v = state.v[i];
        for (std::size_t k = 0; k < p.data.size(); ++k) {
            m.data[k] = h.beta1 * m.data[k] + (1.0 - h.beta1) * g.data[k];
            v.data[k] = h.beta2 * v.data[k] + (1.0 - h.beta2) * g.data[k] * g.data[k];
            const double m_hat = m.data[k] / bc1;
            const double v_hat = v.data[k] / bc2;
            p.data[k] -= h.learning_rate * m_hat / (std::sqrt(v_hat) + h.epsilon);
        }
    }
}

}  // namespace crab
