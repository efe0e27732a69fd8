#include "crab/grad_check.hpp"

#include <cmath>

#include "crab/errors.hpp"

namespace crab {

namespace {

double eval_scalar(const GraphFn& f, const Tensor& x, std::uint64_t rng_seed) {
    Rng rng(rng_seed);
    Graph g(&rng);
    Tensor leaf = g.leaf(x);
    Tensor loss = f(g, leaf);
    if (!loss.is_scalar()) {
        throw ContractError("grad_check: f must return a scalar, got shape " + loss.shape_str());
    }
    const double v = loss.data[0];
    if (!std::isfinite(v)) {
        throw NumericError("grad_check: non-finite function value");
    }
    return v;
}

}  // namespace

double grad_check(const GraphFn& f, const Tensor& x, double epsilon, std::uint64_t rng_seed) {
    // Analytic pass.
    Rng rng(rng_seed);
    Graph g(&rng);
    Tensor leaf = g.leaf(x, /*requires_grad=*/true);
    Tensor loss = f(g, leaf);
    if (!loss.is_scalar()) {
        throw ContractError("grad_check: f must return a scalar, got shape " + loss.shape_str());
    }
    g.backward(loss);
    Tensor analytic = Tensor::zeros(x.shape);
    if (g.has_gradient(leaf.node_id)) analytic = g.gradient(leaf.node_id);

    double worst = 0.0;
    for (std::size_t i = 0; i < x.data.size(); ++i) {
        Tensor xp = x;
        Tensor xm = x;
        xp.data[i] += epsilon;
        xm.data[i] -= epsilon;
        const double numeric =
            (eval_scalar(f, xp, rng_seed) - eval_scalar(f, xm, rng_seed)) / (2.0 * epsilon);
        const double a = analytic.data[i];
        const double denom = std::max({std::fabs(a), std::fabs(numeric), 1e-8});
        worst = std::max(worst, std::fabs(a - numeric) / denom);
    }
    return worst;
}

}  // namespace crab
