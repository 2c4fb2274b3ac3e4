// Copyright (c) 2026 connsearch contributors
// SPDX-License-Identifier: Apache-2.0
#include "connsearch/ad/tape.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

namespace connsearch::ad {

namespace {

// The three product kernels accumulate every output element in a fixed
// k-ascending order, so results are bitwise reproducible: library BLAS
// kernels pick summation groupings based on buffer alignment, which makes
// repeated evaluations of the same graph wobble by ulps.

// O (m x n) += A (m x k) B (k x n), all row-major
void gemm_accum(const double* A, const double* B, double* O, std::int64_t m, std::int64_t k,
                std::int64_t n) {
    for (std::int64_t i = 0; i < m; ++i) {
        const double* arow = A + i * k;
        double* orow = O + i * n;
        for (std::int64_t kk = 0; kk < k; ++kk) {
            const double a = arow[kk];
            const double* brow = B + kk * n;
            for (std::int64_t j = 0; j < n; ++j) orow[j] += a * brow[j];
        }
    }
}

// GA (m x k) += G (m x n) B^T (n x k): a dot of contiguous rows per element
void gemm_abt_accum(const double* G, const double* B, double* GA, std::int64_t m,
                    std::int64_t n, std::int64_t k) {
    for (std::int64_t i = 0; i < m; ++i) {
        const double* grow = G + i * n;
        double* garow = GA + i * k;
        for (std::int64_t kk = 0; kk < k; ++kk) {
            const double* brow = B + kk * n;
            double acc = 0.0;
            for (std::int64_t j = 0; j < n; ++j) acc += grow[j] * brow[j];
            garow[kk] += acc;
        }
    }
}

// GB (k x n) += A^T (k x m) G (m x n)
void gemm_atb_accum(const double* A, const double* G, double* GB, std::int64_t m,
                    std::int64_t k, std::int64_t n) {
    for (std::int64_t i = 0; i < m; ++i) {
        const double* arow = A + i * k;
        const double* grow = G + i * n;
        for (std::int64_t kk = 0; kk < k; ++kk) {
            const double a = arow[kk];
            double* gbrow = GB + kk * n;
            for (std::int64_t j = 0; j < n; ++j) gbrow[j] += a * grow[j];
        }
    }
}

// Element strides of an operand under the documented broadcast rule:
// a 1xn row or an mx1 column may broadcast against mxn, nothing else.
struct Strides {
    std::int64_t row = 0;
    std::int64_t col = 0;
};

Strides full_strides(const Tensor& t) { return {t.cols(), 1}; }

bool resolve_broadcast(const Tensor& a, const Tensor& b, std::int64_t& rows,
                       std::int64_t& cols, Strides& sa, Strides& sb) {
    if (a.rows() == b.rows() && a.cols() == b.cols()) {
        rows = a.rows();
        cols = a.cols();
        sa = full_strides(a);
        sb = full_strides(b);
        return true;
    }
    if (b.rows() == 1 && b.cols() == a.cols()) {  // b is a row over a
        rows = a.rows();
        cols = a.cols();
        sa = full_strides(a);
        sb = {0, 1};
        return true;
    }
    if (b.cols() == 1 && b.rows() == a.rows()) {  // b is a column over a
        rows = a.rows();
        cols = a.cols();
        sa = full_strides(a);
        sb = {1, 0};
        return true;
    }
    if (a.rows() == 1 && a.cols() == b.cols()) {  // a is a row over b
        rows = b.rows();
        cols = b.cols();
        sa = {0, 1};
        sb = full_strides(b);
        return true;
    }
    if (a.cols() == 1 && a.rows() == b.rows()) {  // a is a column over b
        rows = b.rows();
        cols = b.cols();
        sa = {1, 0};
        sb = full_strides(b);
        return true;
    }
    return false;
}

double stable_sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

void check_axis(int axis, const char* op) {
    if (axis != 0 && axis != 1)
        throw ArgumentError(std::string(op) + ": axis must be 0 or 1, got " + std::to_string(axis));
}

}  // namespace

Tensor Tape::matmul(const Tensor& a, const Tensor& b) {
    if (a.cols() != b.rows())
        throw ShapeError("matmul: inner dimensions disagree, " + a.shape_str() + " vs " +
                         b.shape_str());
    const std::int64_t m = a.rows(), k = a.cols(), n = b.cols();
    Tensor out(m, n);
    gemm_accum(a.values().data(), b.values().data(), out.values().data(), m, k, n);
    record("matmul", [a = a, b = b, out, m, k, n]() mutable {
        gemm_abt_accum(out.grad().data(), b.values().data(), a.grad().data(), m, n, k);
        gemm_atb_accum(a.values().data(), out.grad().data(), b.grad().data(), m, k, n);
    });
    return out;
}

Tensor Tape::binary_op(std::string_view name, const Tensor& a, const Tensor& b, int kind) {
    std::int64_t rows = 0, cols = 0;
    Strides sa, sb;
    if (!resolve_broadcast(a, b, rows, cols, sa, sb))
        throw ShapeError(std::string(name) + ": incompatible shapes " + a.shape_str() + " vs " +
                         b.shape_str());
    Tensor out(rows, cols);
    const auto& av = a.values();
    const auto& bv = b.values();
    auto& ov = out.values();
    for (std::int64_t i = 0; i < rows; ++i) {
        for (std::int64_t j = 0; j < cols; ++j) {
            const double x = av[static_cast<std::size_t>(i * sa.row + j * sa.col)];
            const double y = bv[static_cast<std::size_t>(i * sb.row + j * sb.col)];
            double r = 0.0;
            switch (kind) {
                case 0: r = x + y; break;
                case 1: r = x - y; break;
                case 2: r = x * y; break;
                default:
                    if (y == 0.0) throw DomainError("div: division by zero");
                    r = x / y;
            }
            ov[static_cast<std::size_t>(i * cols + j)] = r;
        }
    }
    record(name, [a = a, b = b, out, rows, cols, sa, sb, kind]() mutable {
        const auto& av = a.values();
        const auto& bv = b.values();
        const auto& g = out.grad();
        auto& ga = a.grad();
        auto& gb = b.grad();
        for (std::int64_t i = 0; i < rows; ++i) {
            for (std::int64_t j = 0; j < cols; ++j) {
                const auto ia = static_cast<std::size_t>(i * sa.row + j * sa.col);
                const auto ib = static_cast<std::size_t>(i * sb.row + j * sb.col);
                const double gk = g[static_cast<std::size_t>(i * cols + j)];
                switch (kind) {
                    case 0:
                        ga[ia] += gk;
                        gb[ib] += gk;
                        break;
                    case 1:
                        ga[ia] += gk;
                        gb[ib] -= gk;
                        break;
                    case 2:
                        ga[ia] += gk * bv[ib];
                        gb[ib] += gk * av[ia];
                        break;
                    default:
                        ga[ia] += gk / bv[ib];
                        gb[ib] -= gk * av[ia] / (bv[ib] * bv[ib]);
                }
            }
        }
    });
    return out;
}

Tensor Tape::add(const Tensor& a, const Tensor& b) { return binary_op("add", a, b, 0); }
Tensor Tape::sub(const Tensor& a, const Tensor& b) { return binary_op("sub", a, b, 1); }
Tensor Tape::mul(const Tensor& a, const Tensor& b) { return binary_op("mul", a, b, 2); }
Tensor Tape::div(const Tensor& a, const Tensor& b) { return binary_op("div", a, b, 3); }

template <class Fwd, class Bwd>
Tensor Tape::unary_op(std::string_view name, const Tensor& x, Fwd fwd, Bwd dfdx) {
    Tensor out(x.rows(), x.cols());
    const auto& xv = x.values();
    auto& ov = out.values();
    for (std::size_t k = 0; k < xv.size(); ++k) ov[k] = fwd(xv[k]);
    record(name, [x = x, out, dfdx]() mutable {
        const auto& xv = x.values();
        const auto& yv = out.values();
        const auto& g = out.grad();
        auto& gx = x.grad();
        for (std::size_t k = 0; k < xv.size(); ++k) gx[k] += g[k] * dfdx(xv[k], yv[k]);
    });
    return out;
}

Tensor Tape::relu(const Tensor& x) {
    return unary_op(
        "relu", x, [](double v) { return v > 0.0 ? v : 0.0; },
        [](double v, double) { return v > 0.0 ? 1.0 : 0.0; });
}

Tensor Tape::leaky_relu(const Tensor& x, double slope) {
    return unary_op(
        "leaky_relu", x, [slope](double v) { return v > 0.0 ? v : slope * v; },
        [slope](double v, double) { return v > 0.0 ? 1.0 : slope; });
}

Tensor Tape::sigmoid(const Tensor& x) {
    return unary_op(
        "sigmoid", x, [](double v) { return stable_sigmoid(v); },
        [](double, double y) { return y * (1.0 - y); });
}

Tensor Tape::tanh(const Tensor& x) {
    return unary_op(
        "tanh", x, [](double v) { return std::tanh(v); },
        [](double, double y) { return 1.0 - y * y; });
}

Tensor Tape::exp(const Tensor& x) {
    return unary_op(
        "exp", x, [](double v) { return std::exp(v); },
        [](double, double y) { return y; });
}

Tensor Tape::log(const Tensor& x) {
    return unary_op(
        "log", x,
        [](double v) {
            if (v <= 0.0) throw DomainError("log: argument must be positive, got " + std::to_string(v));
            return std::log(v);
        },
        [](double v, double) { return 1.0 / v; });
}

Tensor Tape::elu(const Tensor& x) {
    return unary_op(
        "elu", x, [](double v) { return v > 0.0 ? v : std::expm1(v); },
        [](double v, double y) { return v > 0.0 ? 1.0 : y + 1.0; });
}

Tensor Tape::softmax(const Tensor& x, int axis) {
    check_axis(axis, "softmax");
    const std::int64_t groups = axis == 1 ? x.rows() : x.cols();
    const std::int64_t width = axis == 1 ? x.cols() : x.rows();
    // stride walks along the normalized axis; base selects the group
    const std::int64_t stride = axis == 1 ? 1 : x.cols();
    const std::int64_t group_stride = axis == 1 ? x.cols() : 1;
    Tensor out(x.rows(), x.cols());
    const auto& xv = x.values();
    auto& ov = out.values();
    for (std::int64_t gix = 0; gix < groups; ++gix) {
        const std::int64_t base = gix * group_stride;
        double mx = -std::numeric_limits<double>::infinity();
        for (std::int64_t k = 0; k < width; ++k)
            mx = std::max(mx, xv[static_cast<std::size_t>(base + k * stride)]);
        double total = 0.0;
        for (std::int64_t k = 0; k < width; ++k) {
            const auto idx = static_cast<std::size_t>(base + k * stride);
            ov[idx] = std::exp(xv[idx] - mx);
            total += ov[idx];
        }
        for (std::int64_t k = 0; k < width; ++k) ov[static_cast<std::size_t>(base + k * stride)] /= total;
    }
    record("softmax", [x = x, out, groups, width, stride, group_stride]() mutable {
        const auto& yv = out.values();
        const auto& g = out.grad();
        auto& gx = x.grad();
        for (std::int64_t gix = 0; gix < groups; ++gix) {
            const std::int64_t base = gix * group_stride;
            double dot = 0.0;
            for (std::int64_t k = 0; k < width; ++k) {
                const auto idx = static_cast<std::size_t>(base + k * stride);
                dot += g[idx] * yv[idx];
            }
            for (std::int64_t k = 0; k < width; ++k) {
                const auto idx = static_cast<std::size_t>(base + k * stride);
                gx[idx] += yv[idx] * (g[idx] - dot);
            }
        }
    });
    return out;
}

Tensor Tape::log_softmax(const Tensor& x, int axis) {
    check_axis(axis, "log_softmax");
    const std::int64_t groups = axis == 1 ? x.rows() : x.cols();
    const std::int64_t width = axis == 1 ? x.cols() : x.rows();
    const std::int64_t stride = axis == 1 ? 1 : x.cols();
    const std::int64_t group_stride = axis == 1 ? x.cols() : 1;
    Tensor out(x.rows(), x.cols());
    const auto& xv = x.values();
    auto& ov = out.values();
    for (std::int64_t gix = 0; gix < groups; ++gix) {
        const std::int64_t base = gix * group_stride;
        double mx = -std::numeric_limits<double>::infinity();
        for (std::int64_t k = 0; k < width; ++k)
            mx = std::max(mx, xv[static_cast<std::size_t>(base + k * stride)]);
        double total = 0.0;
        for (std::int64_t k = 0; k < width; ++k)
            total += std::exp(xv[static_cast<std::size_t>(base + k * stride)] - mx);
        const double lse = mx + std::log(total);
        for (std::int64_t k = 0; k < width; ++k) {
            const auto idx = static_cast<std::size_t>(base + k * stride);
            ov[idx] = xv[idx] - lse;
        }
    }
    record("log_softmax", [x = x, out, groups, width, stride, group_stride]() mutable {
        const auto& yv = out.values();
        const auto& g = out.grad();
        auto& gx = x.grad();
        for (std::int64_t gix = 0; gix < groups; ++gix) {
            const std::int64_t base = gix * group_stride;
            double gsum = 0.0;
            for (std::int64_t k = 0; k < width; ++k)
                gsum += g[static_cast<std::size_t>(base + k * stride)];
            for (std::int64_t k = 0; k < width; ++k) {
                const auto idx = static_cast<std::size_t>(base + k * stride);
                gx[idx] += g[idx] - std::exp(yv[idx]) * gsum;
            }
        }
    });
    return out;
}

Tensor Tape::concat(const std::vector<Tensor>& xs, int axis) {
    if (xs.empty()) throw ArgumentError("concat: empty tensor list");
    check_axis(axis, "concat");
    const std::int64_t r0 = xs[0].rows(), c0 = xs[0].cols();
    std::int64_t total = 0;
    for (const auto& t : xs) {
        if (axis == 1 && t.rows() != r0)
            throw ShapeError("concat: row mismatch " + t.shape_str() + " vs " + xs[0].shape_str());
        if (axis == 0 && t.cols() != c0)
            throw ShapeError("concat: column mismatch " + t.shape_str() + " vs " + xs[0].shape_str());
        total += axis == 1 ? t.cols() : t.rows();
    }
    Tensor out(axis == 1 ? r0 : total, axis == 1 ? total : c0);
    std::int64_t offset = 0;
    for (const auto& t : xs) {
        if (axis == 1) {
            for (std::int64_t i = 0; i < r0; ++i)
                for (std::int64_t j = 0; j < t.cols(); ++j) out.at(i, offset + j) = t.at(i, j);
            offset += t.cols();
        } else {
            for (std::int64_t i = 0; i < t.rows(); ++i)
                for (std::int64_t j = 0; j < c0; ++j) out.at(offset + i, j) = t.at(i, j);
            offset += t.rows();
        }
    }
    record("concat", [xs = xs, out, axis]() mutable {
        const auto& g = out.grad();
        const std::int64_t oc = out.cols();
        std::int64_t offset = 0;
        for (auto& t : xs) {
            auto& gt = t.grad();
            if (axis == 1) {
                for (std::int64_t i = 0; i < t.rows(); ++i)
                    for (std::int64_t j = 0; j < t.cols(); ++j)
                        gt[static_cast<std::size_t>(i * t.cols() + j)] +=
                            g[static_cast<std::size_t>(i * oc + offset + j)];
                offset += t.cols();
            } else {
                for (std::int64_t i = 0; i < t.rows(); ++i)
                    for (std::int64_t j = 0; j < t.cols(); ++j)
                        gt[static_cast<std::size_t>(i * t.cols() + j)] +=
                            g[static_cast<std::size_t>((offset + i) * oc + j)];
                offset += t.rows();
            }
        }
    });
    return out;
}

Tensor Tape::slice_cols(const Tensor& x, std::int64_t start, std::int64_t len) {
    if (start < 0 || len <= 0 || start + len > x.cols())
        throw ArgumentError("slice_cols: range [" + std::to_string(start) + ", " +
                            std::to_string(start + len) + ") outside " + x.shape_str());
    Tensor out(x.rows(), len);
    for (std::int64_t i = 0; i < x.rows(); ++i)
        for (std::int64_t j = 0; j < len; ++j) out.at(i, j) = x.at(i, start + j);
    record("slice_cols", [x = x, out, start, len]() mutable {
        const auto& g = out.grad();
        auto& gx = x.grad();
        for (std::int64_t i = 0; i < x.rows(); ++i)
            for (std::int64_t j = 0; j < len; ++j)
                gx[static_cast<std::size_t>(i * x.cols() + start + j)] +=
                    g[static_cast<std::size_t>(i * len + j)];
    });
    return out;
}

Tensor Tape::stack_reduce(Reduce op, const std::vector<Tensor>& xs) {
    if (xs.empty()) throw ArgumentError("stack_reduce: empty tensor list");
    const std::int64_t r = xs[0].rows(), c = xs[0].cols();
    for (const auto& t : xs)
        if (t.rows() != r || t.cols() != c)
            throw ShapeError("stack_reduce: shape mismatch " + t.shape_str() + " vs " +
                             xs[0].shape_str());
    const auto n = static_cast<std::size_t>(r * c);
    Tensor out(r, c);
    auto& ov = out.values();
    if (op == Reduce::kMax) {
        // ties go to the earliest input in list order
        std::vector<std::int32_t> argmax(n, 0);
        ov = xs[0].values();
        for (std::size_t t = 1; t < xs.size(); ++t) {
            const auto& tv = xs[t].values();
            for (std::size_t k = 0; k < n; ++k) {
                if (tv[k] > ov[k]) {
                    ov[k] = tv[k];
                    argmax[k] = static_cast<std::int32_t>(t);
                }
            }
        }
        record("stack_max", [xs = xs, out, argmax]() mutable {
            const auto& g = out.grad();
            for (std::size_t k = 0; k < g.size(); ++k)
                xs[static_cast<std::size_t>(argmax[k])].grad()[k] += g[k];
        });
        return out;
    }
    for (const auto& t : xs) {
        const auto& tv = t.values();
        for (std::size_t k = 0; k < n; ++k) ov[k] += tv[k];
    }
    const double inv = op == Reduce::kMean ? 1.0 / static_cast<double>(xs.size()) : 1.0;
    if (op == Reduce::kMean)
        for (auto& v : ov) v *= inv;
    record(op == Reduce::kMean ? "stack_mean" : "stack_sum", [xs = xs, out, inv]() mutable {
        const auto& g = out.grad();
        for (auto& t : xs) {
            auto& gt = t.grad();
            for (std::size_t k = 0; k < g.size(); ++k) gt[k] += inv * g[k];
        }
    });
    return out;
}

Tensor Tape::sum(const Tensor& x) {
    Tensor out(1, 1);
    double total = 0.0;
    for (double v : x.values()) total += v;
    out.values()[0] = total;
    record("sum", [x = x, out]() mutable {
        const double g = out.grad()[0];
        auto& gx = x.grad();
        for (auto& v : gx) v += g;
    });
    return out;
}

Tensor Tape::scale(const Tensor& x, const Tensor& s) {
    if (s.size() != 1) throw ShapeError("scale: scale factor must be 1x1, got " + s.shape_str());
    const double sv = s.values()[0];
    Tensor out(x.rows(), x.cols());
    auto& ov = out.values();
    const auto& xv = x.values();
    for (std::size_t k = 0; k < xv.size(); ++k) ov[k] = sv * xv[k];
    record("scale", [x = x, s = s, out, sv]() mutable {
        const auto& g = out.grad();
        const auto& xv = x.values();
        auto& gx = x.grad();
        double acc = 0.0;
        for (std::size_t k = 0; k < xv.size(); ++k) {
            gx[k] += sv * g[k];
            acc += g[k] * xv[k];
        }
        s.grad()[0] += acc;
    });
    return out;
}

Tensor Tape::scale_const(const Tensor& x, double c) {
    Tensor out(x.rows(), x.cols());
    auto& ov = out.values();
    const auto& xv = x.values();
    for (std::size_t k = 0; k < xv.size(); ++k) ov[k] = c * xv[k];
    record("scale_const", [x = x, out, c]() mutable {
        const auto& g = out.grad();
        auto& gx = x.grad();
        for (std::size_t k = 0; k < g.size(); ++k) gx[k] += c * g[k];
    });
    return out;
}

Tensor Tape::element(const Tensor& x, std::int64_t r, std::int64_t c) {
    if (r < 0 || r >= x.rows() || c < 0 || c >= x.cols())
        throw ArgumentError("element: index (" + std::to_string(r) + ", " + std::to_string(c) +
                            ") outside " + x.shape_str());
    Tensor out(1, 1);
    out.values()[0] = x.at(r, c);
    record("element", [x = x, out, r, c]() mutable {
        x.grad()[static_cast<std::size_t>(r * x.cols() + c)] += out.grad()[0];
    });
    return out;
}

Tensor Tape::cross_entropy(const Tensor& logits, const std::vector<int>& labels,
                           const std::vector<int>& mask) {
    const std::int64_t n = logits.rows(), c = logits.cols();
    if (static_cast<std::int64_t>(labels.size()) != n)
        throw ArgumentError("cross_entropy: " + std::to_string(labels.size()) + " labels for " +
                            std::to_string(n) + " rows");
    if (mask.empty()) throw ArgumentError("cross_entropy: empty mask");
    for (int m : mask) {
        if (m < 0 || m >= n)
            throw ArgumentError("cross_entropy: mask row " + std::to_string(m) + " outside [0, " +
                                std::to_string(n) + ")");
        if (labels[static_cast<std::size_t>(m)] < 0 || labels[static_cast<std::size_t>(m)] >= c)
            throw ArgumentError("cross_entropy: label " +
                                std::to_string(labels[static_cast<std::size_t>(m)]) +
                                " outside [0, " + std::to_string(c) + ")");
    }
    // softmax rows for the masked subset, saved for the backward pass
    std::vector<double> probs(mask.size() * static_cast<std::size_t>(c));
    const auto& xv = logits.values();
    double loss = 0.0;
    for (std::size_t mi = 0; mi < mask.size(); ++mi) {
        const auto base = static_cast<std::size_t>(mask[mi]) * static_cast<std::size_t>(c);
        double mx = -std::numeric_limits<double>::infinity();
        for (std::int64_t j = 0; j < c; ++j) mx = std::max(mx, xv[base + static_cast<std::size_t>(j)]);
        double total = 0.0;
        for (std::int64_t j = 0; j < c; ++j)
            total += std::exp(xv[base + static_cast<std::size_t>(j)] - mx);
        const double lse = mx + std::log(total);
        for (std::int64_t j = 0; j < c; ++j)
            probs[mi * static_cast<std::size_t>(c) + static_cast<std::size_t>(j)] =
                std::exp(xv[base + static_cast<std::size_t>(j)] - lse);
        loss += lse - xv[base + static_cast<std::size_t>(labels[static_cast<std::size_t>(mask[mi])])];
    }
    Tensor out(1, 1);
    out.values()[0] = loss / static_cast<double>(mask.size());
    record("cross_entropy", [logits = logits, out, labels, mask, probs, c]() mutable {
        const double g = out.grad()[0] / static_cast<double>(mask.size());
        auto& gx = logits.grad();
        for (std::size_t mi = 0; mi < mask.size(); ++mi) {
            const auto base = static_cast<std::size_t>(mask[mi]) * static_cast<std::size_t>(c);
            const auto lbl = static_cast<std::size_t>(labels[static_cast<std::size_t>(mask[mi])]);
            for (std::size_t j = 0; j < static_cast<std::size_t>(c); ++j) {
                double p = probs[mi * static_cast<std::size_t>(c) + j];
                if (j == lbl) p -= 1.0;
                gx[base + j] += g * p;
            }
        }
    });
    return out;
}

Tensor Tape::dropout(const Tensor& x, double rate, Rng& rng) {
    if (rate <= 0.0) return x;
    if (rate >= 1.0) throw ArgumentError("dropout: rate must be below 1, got " + std::to_string(rate));
    const double keep_scale = 1.0 / (1.0 - rate);
    std::vector<double> mask(x.values().size());
    for (auto& m : mask) m = rng.uniform() >= rate ? keep_scale : 0.0;
    Tensor out(x.rows(), x.cols());
    auto& ov = out.values();
    const auto& xv = x.values();
    for (std::size_t k = 0; k < xv.size(); ++k) ov[k] = xv[k] * mask[k];
    record("dropout", [x = x, out, mask]() mutable {
        const auto& g = out.grad();
        auto& gx = x.grad();
        for (std::size_t k = 0; k < g.size(); ++k) gx[k] += g[k] * mask[k];
    });
    return out;
}

void Tape::backward(Tensor& loss) {
    if (mode_ == Mode::kNoGrad) throw StateError("backward: tape was created in no-grad mode");
    if (mode_ == Mode::kFrozen) throw StateError("backward: tape is frozen; reset() to reuse it");
    if (loss.size() != 1)
        throw ArgumentError("backward: loss must be a 1x1 scalar, got " + loss.shape_str());
    loss.grad()[0] = 1.0;
    for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) it->fn();
    mode_ = Mode::kFrozen;
}

}  // namespace connsearch::ad
