// Copyright (c) 2026 connsearch contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <initializer_list>
#include <memory>
#include <string>
#include <vector>

#include "connsearch/ad/rng.hpp"
#include "connsearch/errors.hpp"

namespace connsearch::ad {

namespace detail {
struct TensorData {
    std::int64_t rows = 0;
    std::int64_t cols = 0;
    std::vector<double> values;
    std::vector<double> grad;  // empty until someone accumulates into it
    bool requires_grad = false;
};
}  // namespace detail

// Dense row-major matrix of doubles with a gradient buffer. Tensor is a
// cheap handle: copies share the same storage, which is what ties a leaf
// parameter to the gradient the tape accumulates for it. Scalars are 1x1,
// row vectors 1xn, column vectors nx1.
class Tensor {
  public:
    Tensor() = default;

    Tensor(std::int64_t rows, std::int64_t cols, double fill = 0.0)
        : d_(std::make_shared<detail::TensorData>()) {
        if (rows <= 0 || cols <= 0)
            throw ShapeError("tensor dimensions must be positive, got " +
                             std::to_string(rows) + "x" + std::to_string(cols));
        d_->rows = rows;
        d_->cols = cols;
        d_->values.assign(static_cast<std::size_t>(rows * cols), fill);
    }

    static Tensor scalar(double v) {
        Tensor t(1, 1);
        t.d_->values[0] = v;
        return t;
    }

    static Tensor row(const std::vector<double>& v) {
        Tensor t(1, static_cast<std::int64_t>(v.size()));
        t.d_->values = v;
        return t;
    }

    static Tensor column(const std::vector<double>& v) {
        Tensor t(static_cast<std::int64_t>(v.size()), 1);
        t.d_->values = v;
        return t;
    }

    static Tensor from_rows(std::initializer_list<std::initializer_list<double>> rows);

    // Glorot-uniform initialized matrix; the usual init for the trainable
    // weights in this project.
    static Tensor glorot(std::int64_t rows, std::int64_t cols, Rng& rng);

    bool defined() const { return d_ != nullptr; }
    std::int64_t rows() const { return d_->rows; }
    std::int64_t cols() const { return d_->cols; }
    std::int64_t size() const { return d_->rows * d_->cols; }

    std::string shape_str() const {
        return std::to_string(d_->rows) + "x" + std::to_string(d_->cols);
    }

    double& at(std::int64_t r, std::int64_t c) { return d_->values[static_cast<std::size_t>(r * d_->cols + c)]; }
    double at(std::int64_t r, std::int64_t c) const { return d_->values[static_cast<std::size_t>(r * d_->cols + c)]; }

    // Value of a 1x1 tensor.
    double item() const {
        if (size() != 1) throw ShapeError("item() on non-scalar tensor " + shape_str());
        return d_->values[0];
    }

    std::vector<double>& values() { return d_->values; }
    const std::vector<double>& values() const { return d_->values; }

    bool requires_grad() const { return d_->requires_grad; }
    Tensor& set_requires_grad(bool b = true) {
        d_->requires_grad = b;
        return *this;
    }

    bool has_grad() const { return !d_->grad.empty(); }

    // Gradient buffer, allocated (zeroed) on first access.
    std::vector<double>& grad() {
        if (d_->grad.empty()) d_->grad.assign(d_->values.size(), 0.0);
        return d_->grad;
    }
    const std::vector<double>& grad() const {
        return const_cast<Tensor*>(this)->grad();
    }

    void zero_grad() {
        if (!d_->grad.empty()) d_->grad.assign(d_->values.size(), 0.0);
    }

    // Deep copy with its own storage (gradient buffer not copied).
    Tensor clone() const {
        Tensor t(rows(), cols());
        t.d_->values = d_->values;
        t.d_->requires_grad = d_->requires_grad;
        return t;
    }

    void copy_values_from(const Tensor& other) {
        if (rows() != other.rows() || cols() != other.cols())
            throw ShapeError("copy_values_from: shape mismatch " + shape_str() + " vs " +
                             other.shape_str());
        d_->values = other.d_->values;
    }

    // Storage identity; two handles to the same tensor compare equal.
    const void* id() const { return d_.get(); }
    bool same_storage(const Tensor& other) const { return d_ == other.d_; }

  private:
    std::shared_ptr<detail::TensorData> d_;
};

}  // namespace connsearch::ad
