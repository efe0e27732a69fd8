#include "crab/graph.hpp"

#include <algorithm>
#include <cmath>

#include "crab/errors.hpp"

namespace crab {

namespace {

// Broadcast modes supported by add/mul.
enum class Broadcast { None, RowToMatrix, ScalarToAny };

Broadcast broadcast_mode(const Tensor& a, const Tensor& b, const char* op) {
    if (a.same_shape(b)) return Broadcast::None;
    if (b.is_scalar()) return Broadcast::ScalarToAny;
    if (b.shape.size() == 2 && b.shape[0] == 1 && a.shape.size() == 2 && a.shape[1] == b.shape[1])
        return Broadcast::RowToMatrix;
    throw DimensionError(std::string(op) + ": incompatible shapes " + a.shape_str() + " and " +
                         b.shape_str());
}

double softplus_stable(double x) {
    // log(1 + e^x) without overflow for large |x|.
    if (x > 35.0) return x + std::log1p(std::exp(-x));
    return std::log1p(std::exp(x));
}

}  // namespace

const char* op_kind_name(OpKind kind) {
    switch (kind) {
        case OpKind::Leaf: return "leaf";
        case OpKind::MatMul: return "matmul";
        case OpKind::Add: return "add";
        case OpKind::Mul: return "mul";
        case OpKind::ConcatCols: return "concat";
        case OpKind::MeanRows: return "mean_rows";
        case OpKind::Sum: return "sum";
        case OpKind::Scale: return "scale";
        case OpKind::Tanh: return "tanh";
        case OpKind::Sigmoid: return "sigmoid";
        case OpKind::Log: return "log";
        case OpKind::Softplus: return "softplus";
        case OpKind::SoftmaxRows: return "softmax_rows";
        case OpKind::LogSoftmaxRows: return "log_softmax_rows";
        case OpKind::Dropout: return "dropout";
        case OpKind::Grl: return "grl";
    }
    return "?";
}

int Graph::push(Node node, const char* name) {
    if (node.kind != OpKind::Leaf && !node.value.all_finite()) {
        throw NumericError(std::string("non-finite output of primitive '") + name + "'");
    }
    node.value.node_id = static_cast<int>(nodes_.size());
    nodes_.push_back(std::move(node));
    return static_cast<int>(nodes_.size()) - 1;
}

Tensor Graph::leaf(const Tensor& value, bool requires_grad) {
    (void)requires_grad;  // gradients are filled for every ancestor of the loss
    Node n{OpKind::Leaf, {}, value, 0.0, {}};
    int id = push(std::move(n), "leaf");
    return nodes_[static_cast<std::size_t>(id)].value;
}

Tensor Graph::matmul(const Tensor& a, const Tensor& b) {
    if (a.shape.size() != 2 || b.shape.size() != 2 || a.shape[1] != b.shape[0]) {
        throw DimensionError("matmul: incompatible shapes " + a.shape_str() + " and " +
                             b.shape_str());
    }
    const auto n = a.shape[0], k = a.shape[1], m = b.shape[1];
    Tensor out = Tensor::zeros({n, m});
    for (std::int64_t i = 0; i < n; ++i) {
        for (std::int64_t p = 0; p < k; ++p) {
            const double av = a.at(i, p);
            if (av == 0.0) continue;
            for (std::int64_t j = 0; j < m; ++j) out.at(i, j) += av * b.at(p, j);
        }
    }
    Node node{OpKind::MatMul, {a.node_id, b.node_id}, std::move(out), 0.0, {}};
    int id = push(std::move(node), "matmul");
    return nodes_[static_cast<std::size_t>(id)].value;
}

Tensor Graph::add(const Tensor& a, const Tensor& b) {
    const Broadcast mode = broadcast_mode(a, b, "add");
    Tensor out = a;
    out.node_id = -1;
    if (mode == Broadcast::None) {
        for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] += b.data[i];
    } else if (mode == Broadcast::ScalarToAny) {
        for (double& v : out.data) v += b.data[0];
    } else {
        const auto m = a.shape[1];
        for (std::int64_t i = 0; i < a.shape[0]; ++i)
            for (std::int64_t j = 0; j < m; ++j) out.at(i, j) += b.data[static_cast<std::size_t>(j)];
    }
    Node node{OpKind::Add, {a.node_id, b.node_id}, std::move(out), 0.0, {}};
    int id = push(std::move(node), "add");
    return nodes_[static_cast<std::size_t>(id)].value;
}

Tensor Graph::mul(const Tensor& a, const Tensor& b) {
    const Broadcast mode = broadcast_mode(a, b, "mul");
    Tensor out = a;
    out.node_id = -1;
    if (mode == Broadcast::None) {
        for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] *= b.data[i];
    } else if (mode == Broadcast::ScalarToAny) {
        for (double& v : out.data) v *= b.data[0];
    } else {
        const auto m = a.shape[1];
        for (std::int64_t i = 0; i < a.shape[0]; ++i)
            for (std::int64_t j = 0; j < m; ++j) out.at(i, j) *= b.data[static_cast<std::size_t>(j)];
    }
    Node node{OpKind::Mul, {a.node_id, b.node_id}, std::move(out), 0.0, {}};
    int id = push(std::move(node), "mul");
    return nodes_[static_cast<std::size_t>(id)].value;
}

Tensor Graph::concat_cols(const Tensor& a, const Tensor& b) {
    if (a.shape.size() != 2 || b.shape.size() != 2 || a.shape[0] != b.shape[0]) {
        throw DimensionError("concat: incompatible shapes " + a.shape_str() + " and " +
                             b.shape_str());
    }
    const auto n = a.shape[0], p = a.shape[1], q = b.shape[1];
    Tensor out = Tensor::zeros({n, p + q});
    for (std::int64_t i = 0; i < n; ++i) {
        for (std::int64_t j = 0; j < p; ++j) out.at(i, j) = a.at(i, j);
        for (std::int64_t j = 0; j < q; ++j) out.at(i, p + j) = b.at(i, j);
    }
    Node node{OpKind::ConcatCols, {a.node_id, b.node_id}, std::move(out), 0.0, {}};
    int id = push(std::move(node), "concat");
    return nodes_[static_cast<std::size_t>(id)].value;
}

Tensor Graph::mean_rows(const Tensor& x) {
    if (x.shape.size() != 2) {
        throw DimensionError("mean_rows: expected rank-2 input, got " + x.shape_str());
    }
    const auto n = x.shape[0], m = x.shape[1];
    Tensor out = Tensor::zeros({1, m});
    for (std::int64_t i = 0; i < n; ++i)
        for (std::int64_t j = 0; j < m; ++j) out.at(0, j) += x.at(i, j);
    for (std::int64_t j = 0; j < m; ++j) out.at(0, j) /= static_cast<double>(n);
    Node node{OpKind::MeanRows, {x.node_id}, std::move(out), 0.0, {}};
    int id = push(std::move(node), "mean_rows");
    return nodes_[static_cast<std::size_t>(id)].value;
}

Tensor Graph::sum(const Tensor& x) {
    double s = 0.0;
    for (double v : x.data) s += v;
    Node node{OpKind::Sum, {x.node_id}, Tensor::scalar(s), 0.0, {}};
    int id = push(std::move(node), "sum");
    return nodes_[static_cast<std::size_t>(id)].value;
}

Tensor Graph::scale(const Tensor& x, double c) {
    Tensor out = x;
    out.node_id = -1;
    for (double& v : out.data) v *= c;
    Node node{OpKind::Scale, {x.node_id}, std::move(out), c, {}};
    int id = push(std::move(node), "scale");
    return nodes_[static_cast<std::size_t>(id)].value;
}

Tensor Graph::tanh(const Tensor& x) {
    Tensor out = x;
    out.node_id = -1;
    for (double& v : out.data) v = std::tanh(v);
    Node node{OpKind::Tanh, {x.node_id}, std::move(out), 0.0, {}};
    int id = push(std::move(node), "tanh");
    return nodes_[static_cast<std::size_t>(id)].value;
}

Tensor Graph::sigmoid(const Tensor& x) {
    Tensor out = x;
    out.node_id = -1;
    for (double& v : out.data) {
        v = v >= 0.0 ? 1.0 / (1.0 + std::exp(-v)) : std::exp(v) / (1.0 + std::exp(v));
    }
    Node node{OpKind::Sigmoid, {x.node_id}, std::move(out), 0.0, {}};
    int id = push(std::move(node), "sigmoid");
    return nodes_[static_cast<std::size_t>(id)].value;
}

Tensor Graph::log(const Tensor& x) {
    Tensor out = x;
    out.node_id = -1;
    for (double& v : out.data) v = std::log(v);
    Node node{OpKind::Log, {x.node_id}, std::move(out), 0.0, {}};
    int id = push(std::move(node), "log");
    return nodes_[static_cast<std::size_t>(id)].value;
}

Tensor Graph::softplus(const Tensor& x) {
    Tensor out = x;
    out.node_id = -1;
    for (double& v : out.data) v = softplus_stable(v);
    Node node{OpKind::Softplus, {x.node_id}, std::move(out), 0.0, {}};
    int id = push(std::move(node), "softplus");
    return nodes_[static_cast<std::size_t>(id)].value;
}

Tensor Graph::softmax_rows(const Tensor& x) {
    if (x.shape.size() != 2) {
        throw DimensionError("softmax_rows: expected rank-2 input, got " + x.shape_str());
    }
    Tensor out = x;
    out.node_id = -1;
    const auto n = x.shape[0], m = x.shape[1];
    for (std::int64_t i = 0; i < n; ++i) {
        double mx = out.at(i, 0);
        for (std::int64_t j = 1; j < m; ++j) mx = std::max(mx, out.at(i, j));
        double z = 0.0;
        for (std::int64_t j = 0; j < m; ++j) {
            out.at(i, j) = std::exp(out.at(i, j) - mx);
            z += out.at(i, j);
        }
        for (std::int64_t j = 0; j < m; ++j) out.at(i, j) /= z;
    }
    Node node{OpKind::SoftmaxRows, {x.node_id}, std::move(out), 0.0, {}};
    int id = push(std::move(node), "softmax_rows");
    return nodes_[static_cast<std::size_t>(id)].value;
}

Tensor Graph::log_softmax_rows(const Tensor& x) {
    if (x.shape.size() != 2) {
        throw DimensionError("log_softmax_rows: expected rank-2 input, got " + x.shape_str());
    }
    Tensor out = x;
    out.node_id = -1;
    const auto n = x.shape[0], m = x.shape[1];
    for (std::int64_t i = 0; i < n; ++i) {
        double mx = out.at(i, 0);
        for (std::int64_t j = 1; j < m; ++j) mx = std::max(mx, out.at(i, j));
        double z = 0.0;
        for (std::int64_t j = 0; j < m; ++j) z += std::exp(out.at(i, j) - mx);
        const double lse = mx + std::log(z);
        for (std::int64_t j = 0; j < m; ++j) out.at(i, j) -= lse;
    }
    Node node{OpKind::LogSoftmaxRows, {x.node_id}, std::move(out), 0.0, {}};
    int id = push(std::move(node), "log_softmax_rows");
    return nodes_[static_cast<std::size_t>(id)].value;
}

Tensor Graph::dropout(const Tensor& x, double p, bool train) {
    if (!(p >= 0.0 && p < 1.0)) {
        throw ContractError("dropout: p must be in [0, 1), got " + std::to_string(p));
    }
    Tensor out = x;
    out.node_id = -1;
    Node node{OpKind::Dropout, {x.node_id}, {}, p, {}};
    if (train && p > 0.0) {
        if (rng_ == nullptr) {
            throw ContractError("dropout: training mode requires a graph RNG");
        }
        node.mask.resize(x.data.size());
        const double keep_scale = 1.0 / (1.0 - p);
        for (std::size_t i = 0; i < x.data.size(); ++i) {
            node.mask[i] = rng_->bernoulli(p) ? 0.0 : keep_scale;
            out.data[i] *= node.mask[i];
        }
    }
    node.value = std::move(out);
    int id = push(std::move(node), "dropout");
    return nodes_[static_cast<std::size_t>(id)].value;
}

Tensor Graph::grl(const Tensor& x, double lambda) {
    if (!std::isfinite(lambda)) {
        throw ContractError("grl: lambda must be finite");
    }
    Tensor out = x;  // forward is bitwise identity
    out.node_id = -1;
    Node node{OpKind::Grl, {x.node_id}, std::move(out), lambda, {}};
    int id = push(std::move(node), "grl");
    return nodes_[static_cast<std::size_t>(id)].value;
}

void Graph::backward(const Tensor& loss) {
    if (loss.node_id < 0 || loss.node_id >= static_cast<int>(nodes_.size())) {
        throw ContractError("backward: loss tensor does not belong to this graph");
    }
    if (!loss.is_scalar()) {
        throw ContractError("backward: loss must be scalar, got shape " + loss.shape_str());
    }

    grads_.assign(nodes_.size(), std::nullopt);

    // Restrict the sweep to ancestors of the loss node.
    std::vector<char> needed(nodes_.size(), 0);
    needed[static_cast<std::size_t>(loss.node_id)] = 1;
    for (int id = loss.node_id; id >= 0; --id) {
        if (!needed[static_cast<std::size_t>(id)]) continue;
        for (int in : nodes_[static_cast<std::size_t>(id)].inputs) needed[static_cast<std::size_t>(in)] = 1;
    }

    Tensor seed = nodes_[static_cast<std::size_t>(loss.node_id)].value;
    std::fill(seed.data.begin(), seed.data.end(), 1.0);
    grads_[static_cast<std::size_t>(loss.node_id)] = std::move(seed);

    for (int id = loss.node_id; id >= 0; --id) {
        const auto uid = static_cast<std::size_t>(id);
        if (!needed[uid] || !grads_[uid].has_value()) continue;
        const Node& node = nodes_[uid];
        const Tensor& g = *grads_[uid];
        switch (node.kind) {
            case OpKind::Leaf:
                break;
            case OpKind::MatMul: {
                const Tensor& a = input_value(node.inputs[0]);
                const Tensor& b = input_value(node.inputs[1]);
                const auto n = a.shape[0], k = a.shape[1], m = b.shape[1];
                Tensor da = Tensor::zeros(a.shape);
                Tensor db = Tensor::zeros(b.shape);
                for (std::int64_t i = 0; i < n; ++i) {
                    for (std::int64_t j = 0; j < m; ++j) {
                        const double gv = g.at(i, j);
                        if (gv == 0.0) continue;
                        for (std::int64_t p = 0; p < k; ++p) {
                            da.at(i, p) += gv * b.at(p, j);
                            db.at(p, j) += gv * a.at(i, p);
                        }
                    }
                }
                accumulate(node.inputs[0], da);
                accumulate(node.inputs[1], db);
                break;
            }
            case OpKind::Add: {
                const Tensor& a = input_value(node.inputs[0]);
                const Tensor& b = input_value(node.inputs[1]);
                accumulate(node.inputs[0], g);
                if (b.same_shape(a)) {
                    accumulate(node.inputs[1], g);
                } else if (b.is_scalar()) {
                    double s = 0.0;
                    for (double v : g.data) s += v;
                    Tensor db = b;
                    db.data[0] = s;
                    accumulate(node.inputs[1], db);
                } else {
                    Tensor db = Tensor::zeros(b.shape);
                    const auto m = a.shape[1];
                    for (std::int64_t i = 0; i < a.shape[0]; ++i)
                        for (std::int64_t j = 0; j < m; ++j)
                            db.data[static_cast<std::size_t>(j)] += g.at(i, j);
                    accumulate(node.inputs[1], db);
                }
                break;
            }
            case OpKind::Mul: {
                const Tensor& a = input_value(node.inputs[0]);
                const Tensor& b = input_value(node.inputs[1]);
                Tensor da = Tensor::zeros(a.shape);
                if (b.same_shape(a)) {
                    for (std::size_t i = 0; i < da.data.size(); ++i)
                        da.data[i] = g.data[i] * b.data[i];
                    Tensor db = Tensor::zeros(b.shape);
                    for (std::size_t i = 0; i < db.data.size(); ++i)
                        db.data[i] = g.data[i] * a.data[i];
                    accumulate(node.inputs[0], da);
                    accumulate(node.inputs[1], db);
                } else if (b.is_scalar()) {
                    double s = 0.0;
                    for (std::size_t i = 0; i < da.data.size(); ++i) {
                        da.data[i] = g.data[i] * b.data[0];
                        s += g.data[i] * a.data[i];
                    }
                    Tensor db = b;
                    db.data[0] = s;
                    accumulate(node.inputs[0], da);
                    accumulate(node.inputs[1], db);
                } else {
                    Tensor db = Tensor::zeros(b.shape);
                    const auto m = a.shape[1];
                    for (std::int64_t i = 0; i < a.shape[0]; ++i) {
                        for (std::int64_t j = 0; j < m; ++j) {
                            da.at(i, j) = g.at(i, j) * b.data[static_cast<std::size_t>(j)];
                            db.data[static_cast<std::size_t>(j)] += g.at(i, j) * a.at(i, j);
                        }
                    }
                    accumulate(node.inputs[0], da);
                    accumulate(node.inputs[1], db);
                }
                break;
            }
            case OpKind::ConcatCols: {
                const Tensor& a = input_value(node.inputs[0]);
                const Tensor& b = input_value(node.inputs[1]);
                const auto n = a.shape[0], p = a.shape[1], q = b.shape[1];
                Tensor da = Tensor::zeros(a.shape);
                Tensor db = Tensor::zeros(b.shape);
                for (std::int64_t i = 0; i < n; ++i) {
                    for (std::int64_t j = 0; j < p; ++j) da.at(i, j) = g.at(i, j);
                    for (std::int64_t j = 0; j < q; ++j) db.at(i, j) = g.at(i, p + j);
                }
                accumulate(node.inputs[0], da);
                accumulate(node.inputs[1], db);
                break;
            }
            case OpKind::MeanRows: {
                const Tensor& x = input_value(node.inputs[0]);
                const auto n = x.shape[0], m = x.shape[1];
                Tensor dx = Tensor::zeros(x.shape);
                for (std::int64_t i = 0; i < n; ++i)
                    for (std::int64_t j = 0; j < m; ++j)
                        dx.at(i, j) = g.at(0, j) / static_cast<double>(n);
                accumulate(node.inputs[0], dx);
                break;
            }
            case OpKind::Sum: {
                const Tensor& x = input_value(node.inputs[0]);
                Tensor dx = Tensor::full(x.shape, g.data[0]);
                accumulate(node.inputs[0], dx);
                break;
            }
            case OpKind::Scale: {
                Tensor dx = g;
                for (double& v : dx.data) v *= node.scalar;
                accumulate(node.inputs[0], dx);
                break;
            }
            case OpKind::Tanh: {
                Tensor dx = g;
                for (std::size_t i = 0; i < dx.data.size(); ++i) {
                    const double y = node.value.data[i];
                    dx.data[i] *= 1.0 - y * y;
                }
                accumulate(node.inputs[0], dx);
                break;
            }
            case OpKind::Sigmoid: {
                Tensor dx = g;
                for (std::size_t i = 0; i < dx.data.size(); ++i) {
                    const double y = node.value.data[i];
                    dx.data[i] *= y * (1.0 - y);
                }
                accumulate(node.inputs[0], dx);
                break;
            }
            case OpKind::Log: {
                const Tensor& x = input_value(node.inputs[0]);
                Tensor dx = g;
                for (std::size_t i = 0; i < dx.data.size(); ++i) dx.data[i] /= x.data[i];
                accumulate(node.inputs[0], dx);
                break;
            }
            case OpKind::Softplus: {
                const Tensor& x = input_value(node.inputs[0]);
                Tensor dx = g;
                for (std::size_t i = 0; i < dx.data.size(); ++i) {
                    const double v = x.data[i];
                    const double sig =
                        v >= 0.0 ? 1.0 / (1.0 + std::exp(-v)) : std::exp(v) / (1.0 + std::exp(v));
                    dx.data[i] *= sig;
                }
                accumulate(node.inputs[0], dx);
                break;
            }
            case OpKind::SoftmaxRows: {
                const Tensor& y = node.value;
                const auto n = y.shape[0], m = y.shape[1];
                Tensor dx = Tensor::zeros(y.shape);
                for (std::int64_t i = 0; i < n; ++i) {
                    double dot = 0.0;
                    for (std::int64_t j = 0; j < m; ++j) dot += g.at(i, j) * y.at(i, j);
                    for (std::int64_t j = 0; j < m; ++j)
                        dx.at(i, j) = y.at(i, j) * (g.at(i, j) - dot);
                }
                accumulate(node.inputs[0], dx);
                break;
            }
            case OpKind::LogSoftmaxRows: {
                const Tensor& y = node.value;  // log-probabilities
                const auto n = y.shape[0], m = y.shape[1];
                Tensor dx = Tensor::zeros(y.shape);
                for (std::int64_t i = 0; i < n; ++i) {
                    double gsum = 0.0;
                    for (std::int64_t j = 0; j < m; ++j) gsum += g.at(i, j);
                    for (std::int64_t j = 0; j < m; ++j)
                        dx.at(i, j) = g.at(i, j) - std::exp(y.at(i, j)) * gsum;
                }
                accumulate(node.inputs[0], dx);
                break;
            }
            case OpKind::Dropout: {
                Tensor dx = g;
                if (!node.mask.empty()) {
                    for (std::size_t i = 0; i < dx.data.size(); ++i) dx.data[i] *= node.mask[i];
                }
                accumulate(node.inputs[0], dx);
                break;
            }
            case OpKind::Grl: {
                Tensor dx = g;
                for (double& v : dx.data) v *= -node.scalar;
                accumulate(node.inputs[0], dx);
                break;
            }
        }
    }
}

void Graph::accumulate(int node_id, const Tensor& grad) {
    auto& slot = grads_[static_cast<std::size_t>(node_id)];
    if (!slot.has_value()) {
        slot = grad;
        slot->node_id = node_id;
    } else {
        for (std::size_t i = 0; i < slot->data.size(); ++i) slot->data[i] += grad.data[i];
    }
}

bool Graph::has_gradient(int node_id) const {
    return node_id >= 0 && node_id < static_cast<int>(grads_.size()) &&
           grads_[static_cast<std::size_t>(node_id)].has_value();
}

const Tensor& Graph::gradient(int node_id) const {
    if (!has_gradient(node_id)) {
        throw ContractError("gradient: node " + std::to_string(node_id) +
                            " has no gradient (not an ancestor of the loss?)");
    }
    return *grads_[static_cast<std::size_t>(node_id)];
}

std::map<int, Tensor> Graph::gradients() const {
    std::map<int, Tensor> out;
    for (std::size_t i = 0; i < grads_.size(); ++i) {
        if (grads_[i].has_value()) out.emplace(static_cast<int>(i), *grads_[i]);
    }
    return out;
}

const Tensor& Graph::value(int node_id) const {
    if (node_id < 0 || node_id >= static_cast<int>(nodes_.size())) {
        throw ContractError("value: unknown node " + std::to_string(node_id));
    }
    return nodes_[static_cast<std::size_t>(node_id)].value;
}

Tensor forward_primitive(Graph& graph, const std::string& kind, const std::vector<Tensor>& inputs,
                         const PrimitiveOptions& opts) {
    auto unary = [&](const char* name) -> const Tensor& {
        if (inputs.size() != 1) {
            throw ContractError(std::string(name) + ": expected 1 input, got " +
                                std::to_string(inputs.size()));
        }
        return inputs[0];
    };
    auto binary = [&](const char* name) {
        if (inputs.size() != 2) {
            throw ContractError(std::string(name) + ": expected 2 inputs, got " +
                                std::to_string(inputs.size()));
        }
    };
    if (kind == "matmul") { binary("matmul"); return graph.matmul(inputs[0], inputs[1]); }
    if (kind == "add") { binary("add"); return graph.add(inputs[0], inputs[1]); }
    if (kind == "mul") { binary("mul"); return graph.mul(inputs[0], inputs[1]); }
    if (kind == "concat") { binary("concat"); return graph.concat_cols(inputs[0], inputs[1]); }
    if (kind == "mean_rows") return graph.mean_rows(unary("mean_rows"));
    if (kind == "sum") return graph.sum(unary("sum"));
    if (kind == "scale") return graph.scale(unary("scale"), opts.scale_factor);
    if (kind == "tanh") return graph.tanh(unary("tanh"));
    if (kind == "sigmoid") return graph.sigmoid(unary("sigmoid"));
    if (kind == "log") return graph.log(unary("log"));
    if (kind == "softplus") return graph.softplus(unary("softplus"));
    if (kind == "softmax_rows") return graph.softmax_rows(unary("softmax_rows"));
    if (kind == "log_softmax_rows") return graph.log_softmax_rows(unary("log_softmax_rows"));
    if (kind == "dropout") return graph.dropout(unary("dropout"), opts.dropout_p, opts.train_flag);
    if (kind == "grl") return graph.grl(unary("grl"), opts.lambda_grl);
    throw ContractError("forward_primitive: unknown kind '" + kind + "'");
}

}  // namespace crab
