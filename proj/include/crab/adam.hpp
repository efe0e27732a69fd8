#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "crab/tensor.hpp"

namespace crab {

struct AdamHyper {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

// Bias-corrected Adam moments for a fixed, ordered parameter list.
struct AdamState {
    std::int64_t step = 0;
    std::vector<Tensor> m;
    std::vector<Tensor> v;
    AdamHyper hyper;

    static AdamState init(const std::vector<const Tensor*>& params, AdamHyper hyper);
};

// One Adam update in place. `grads[i]` must carry the gradient for
// `params[i]`; an empty gradient tensor raises ContractError naming the
// parameter through `names` (when provided).
void adam_step(std::vector<Tensor*>& params, const std::vector<Tensor>& grads, AdamState& state,
               const std::vector<std::string>& names = {});

}  // namespace crab
