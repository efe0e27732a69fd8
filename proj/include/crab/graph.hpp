#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "crab/rng.hpp"
#include "crab/tensor.hpp"

namespace crab {

enum class OpKind {
    Leaf,
    MatMul,
    Add,
    Mul,
    ConcatCols,
    MeanRows,
    Sum,
    Scale,
    Tanh,
    Sigmoid,
    Log,
    Softplus,
    SoftmaxRows,
    LogSoftmaxRows,
    Dropout,
    Grl,
};

const char* op_kind_name(OpKind kind);

// Options for the generic forward_primitive dispatcher.
struct PrimitiveOptions {
    double dropout_p = 0.0;
    bool train_flag = false;
    double lambda_grl = 1.0;
    double scale_factor = 1.0;
};

// Define-by-run reverse-mode tape. Rebuilt per forward pass; nodes are stored
// in construction order, which is a topological order by construction.
// Every primitive checks its output for NaN/Inf and throws NumericError.
class Graph {
  public:
    // rng is only consulted by dropout in training mode; may be null otherwise.
    explicit Graph(Rng* dropout_rng = nullptr) : rng_(dropout_rng) {}

    Tensor leaf(const Tensor& value, bool requires_grad = false);

    Tensor matmul(const Tensor& a, const Tensor& b);
    // add/mul accept equal shapes, a [1, m] row against [n, m], or a scalar
    // against anything; gradients are summed back over broadcast dimensions.
    Tensor add(const Tensor& a, const Tensor& b);
    Tensor mul(const Tensor& a, const Tensor& b);
    Tensor concat_cols(const Tensor& a, const Tensor& b);
    Tensor mean_rows(const Tensor& x);  // [n, m] -> [1, m]
    Tensor sum(const Tensor& x);        // -> [1]
    Tensor scale(const Tensor& x, double c);
    Tensor tanh(const Tensor& x);
    Tensor sigmoid(const Tensor& x);
    Tensor log(const Tensor& x);
    Tensor softplus(const Tensor& x);
    Tensor softmax_rows(const Tensor& x);
    Tensor log_softmax_rows(const Tensor& x);
    // Inverted dropout: scales kept entries by 1/(1-p); identity when !train.
    Tensor dropout(const Tensor& x, double p, bool train);
    // Identity forward; backward multiplies the downstream gradient by
    // -lambda before passing it upstream.
    Tensor grl(const Tensor& x, double lambda);

    // Reverse-mode accumulation from a scalar loss. Fills gradients for every
    // ancestor of the loss node; gradient shapes equal value shapes.
    void backward(const Tensor& loss);

    bool has_gradient(int node_id) const;
    const Tensor& gradient(int node_id) const;
    // Gradients of every node touched by the last backward pass.
    std::map<int, Tensor> gradients() const;

    const Tensor& value(int node_id) const;
    std::size_t size() const { return nodes_.size(); }

  private:
    struct Node {
        OpKind kind;
        std::vector<int> inputs;
        Tensor value;
        // Per-op payload.
        double scalar = 0.0;            // scale factor / grl lambda / dropout p
        std::vector<double> mask;       // dropout keep-mask, already scaled
    };

    int push(Node node, const char* name);
    const Tensor& input_value(int id) const { return nodes_[static_cast<std::size_t>(id)].value; }
    void accumulate(int node_id, const Tensor& grad);

    std::vector<Node> nodes_;
    std::vector<std::optional<Tensor>> grads_;
    Rng* rng_;
};

// Generic dispatcher over the primitive set. `kind` is one of: matmul, add,
// mul, concat, mean_rows, sum, scale, tanh, sigmoid, log, softplus,
// softmax_rows, log_softmax_rows, dropout, grl.
Tensor forward_primitive(Graph& graph, const std::string& kind, const std::vector<Tensor>& inputs,
                         const PrimitiveOptions& opts = {});

}  // namespace crab
