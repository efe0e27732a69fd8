#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace crab {

// Dense row-major tensor of doubles. Rank is 1 or 2 in practice; a tensor
// produced by a Graph primitive carries the id of the node that made it.
struct Tensor {
    std::vector<std::int64_t> shape;
    std::vector<double> data;
    int node_id = -1;

    Tensor() = default;
    Tensor(std::vector<std::int64_t> shape_, std::vector<double> data_);

    static Tensor zeros(std::vector<std::int64_t> shape);
    static Tensor full(std::vector<std::int64_t> shape, double value);
    static Tensor scalar(double value);
    static Tensor row(std::vector<double> values);  // shape [1, n]
    static Tensor matrix(std::int64_t rows, std::int64_t cols, std::vector<double> values);

    std::int64_t numel() const;
    bool is_scalar() const { return numel() == 1; }

    // Rank-2 accessors; a rank-1 tensor behaves as a single row.
    std::int64_t rows() const;
    std::int64_t cols() const;
    double& at(std::int64_t r, std::int64_t c);
    double at(std::int64_t r, std::int64_t c) const;

    bool all_finite() const;
    bool same_shape(const Tensor& other) const { return shape == other.shape; }

    std::string shape_str() const;
};

}  // namespace crab
