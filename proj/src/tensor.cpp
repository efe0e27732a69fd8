#include "crab/tensor.hpp"

#include <cmath>

#include "crab/errors.hpp"

namespace crab {

namespace {
std::int64_t product(const std::vector<std::int64_t>& shape) {
    std::int64_t n = 1;
    for (auto d : shape) n *= d;
    return n;
}
}  // namespace

Tensor::Tensor(std::vector<std::int64_t> shape_, std::vector<double> data_)
    : shape(std::move(shape_)), data(std::move(data_)) {
    if (product(shape) != static_cast<std::int64_t>(data.size())) {
        throw DimensionError("tensor data length " + std::to_string(data.size()) +
                             " does not match shape " + shape_str());
    }
}

Tensor Tensor::zeros(std::vector<std::int64_t> shape) {
    return full(std::move(shape), 0.0);
}

Tensor Tensor::full(std::vector<std::int64_t> shape, double value) {
    Tensor t;
    t.shape = std::move(shape);
    t.data.assign(static_cast<std::size_t>(product(t.shape)), value);
    return t;
}

Tensor Tensor::scalar(double value) {
    return Tensor({1}, {value});
}

Tensor Tensor::row(std::vector<double> values) {
    const auto n = static_cast<std::int64_t>(values.size());
    return Tensor({1, n}, std::move(values));
}

Tensor Tensor::matrix(std::int64_t rows, std::int64_t cols, std::vector<double> values) {
    return Tensor({rows, cols}, std::move(values));
}

std::int64_t Tensor::numel() const {
    return product(shape);
}

std::int64_t Tensor::rows() const {
    return shape.size() == 2 ? shape[0] : 1;
}

std::int64_t Tensor::cols() const {
    if (shape.empty()) return 0;
    return shape.size() == 2 ? shape[1] : shape[0];
}

double& Tensor::at(std::int64_t r, std::int64_t c) {
    return data[static_cast<std::size_t>(r * cols() + c)];
}

double Tensor::at(std::int64_t r, std::int64_t c) const {
    return data[static_cast<std::size_t>(r * cols() + c)];
}

bool Tensor::all_finite() const {
    for (double v : data) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

std::string Tensor::shape_str() const {
    std::string s = "[";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) s += ", ";
        s += std::to_string(shape[i]);
    }
    return s + "]";
}

}  // namespace crab
