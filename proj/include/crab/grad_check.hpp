#pragma once

#include <functional>

#include "crab/graph.hpp"
#include "crab/tensor.hpp"

namespace crab {

// Builds a scalar loss on the given graph from a leaf tensor.
using GraphFn = std::function<Tensor(Graph&, const Tensor& x)>;

// Central-difference oracle for reverse-mode gradients. Evaluates f once
// analytically and 2*numel(x) times numerically; every evaluation uses a
// fresh graph whose dropout stream is reseeded with `rng_seed`, so f is
// deterministic even when it contains dropout. Returns
// max_i |analytic_i - numeric_i| / max(|analytic_i|, |numeric_i|, 1e-8).
double grad_check(const GraphFn& f, const Tensor& x, double epsilon,
                  std::uint64_t rng_seed = 0);

}  // namespace crab
