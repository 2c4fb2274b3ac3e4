// Copyright (c) 2026 connsearch contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <string_view>
#include <vector>

#include "connsearch/ad/rng.hpp"
#include "connsearch/ad/tensor.hpp"

namespace connsearch::ad {

// Reverse-mode tape over dense tensors. Ops are tape methods: they compute
// the forward value and, while the tape is recording, push a node whose
// closure owns handles to the involved tensors plus any saved intermediates.
// backward() replays the nodes in reverse, so each tensor's gradient receives
// exactly one contribution per consumer.
//
// A tape is owned by one run. kNoGrad tapes execute forwards only and record
// nothing; they serve evaluation passes.
class Tape {
  public:
    enum class Mode { kRecording, kFrozen, kNoGrad };

    explicit Tape(Mode mode = Mode::kRecording) : initial_mode_(mode), mode_(mode) {}

    Mode mode() const { return mode_; }
    bool recording() const { return mode_ == Mode::kRecording; }
    std::size_t num_records() const { return nodes_.size(); }

    // Drops all records and re-arms the tape.
    void reset() {
        nodes_.clear();
        mode_ = initial_mode_;
    }

    // Extension point: modules may register custom differentiable ops by
    // computing the forward themselves and pushing the matching backward
    // closure here. No-op while not recording.
    void record(std::string_view op, std::function<void()> backward_fn) {
        if (recording()) nodes_.push_back({op, std::move(backward_fn)});
    }

    // --- core primitives -------------------------------------------------

    Tensor matmul(const Tensor& a, const Tensor& b);

    Tensor add(const Tensor& a, const Tensor& b);
    Tensor sub(const Tensor& a, const Tensor& b);
    Tensor mul(const Tensor& a, const Tensor& b);
    Tensor div(const Tensor& a, const Tensor& b);

    Tensor relu(const Tensor& x);
    Tensor leaky_relu(const Tensor& x, double slope);
    Tensor sigmoid(const Tensor& x);
    Tensor tanh(const Tensor& x);
    Tensor exp(const Tensor& x);
    Tensor log(const Tensor& x);
    Tensor elu(const Tensor& x);

    // axis 0: normalize down each column; axis 1: across each row.
    Tensor softmax(const Tensor& x, int axis);
    Tensor log_softmax(const Tensor& x, int axis);

    Tensor concat(const std::vector<Tensor>& xs, int axis);
    Tensor slice_cols(const Tensor& x, std::int64_t start, std::int64_t len);

    enum class Reduce { kSum, kMean, kMax };
    Tensor stack_reduce(Reduce op, const std::vector<Tensor>& xs);

    // Sum of all entries, as a 1x1 tensor.
    Tensor sum(const Tensor& x);

    // x scaled by a 1x1 tensor; gradient flows to both operands.
    Tensor scale(const Tensor& x, const Tensor& s);
    Tensor scale_const(const Tensor& x, double c);

    // Single entry of x as a 1x1 tensor.
    Tensor element(const Tensor& x, std::int64_t r, std::int64_t c);

    // Mean of -log softmax(logits)[label] over the rows listed in mask.
    Tensor cross_entropy(const Tensor& logits, const std::vector<int>& labels,
                         const std::vector<int>& mask);

    // Inverted-dropout with the keep-scale folded into the mask. rate <= 0
    // returns x untouched and draws nothing from rng.
    Tensor dropout(const Tensor& x, double rate, Rng& rng);

    // Seeds d(loss)/d(loss) = 1 and replays all records in reverse,
    // accumulating gradients. Freezes the tape until reset().
    void backward(Tensor& loss);

  private:
    struct Node {
        std::string_view op;
        std::function<void()> fn;
    };

    template <class Fwd, class Bwd>
    Tensor unary_op(std::string_view name, const Tensor& x, Fwd fwd, Bwd dfdx);
    Tensor binary_op(std::string_view name, const Tensor& a, const Tensor& b, int kind);

    Mode initial_mode_;
    Mode mode_;
    std::vector<Node> nodes_;
};

}  // namespace connsearch::ad
