#pragma once

#include <functional>
#include <vector>

#include "fashsent/tensor.hpp"

namespace fashsent {

// Elementwise, same shape.
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
// Multiply by a compile-time constant (not a graph node).
Tensor scale(const Tensor& a, double c);

// m [r x c] + row [1 x c], broadcast over rows.
Tensor add_rows(const Tensor& m, const Tensor& row);
// m + s where s is a size-1 tensor broadcast everywhere.
Tensor add_scalar(const Tensor& m, const Tensor& s);
// out[i][j] = col[i] + row[j]; col is [r x 1], row is [1 x c].
Tensor outer_sum(const Tensor& col, const Tensor& row);

// Standard matrix product, [m x k] * [k x n] -> [m x n].
Tensor matmul(const Tensor& a, const Tensor& b);
Tensor transpose(const Tensor& a);

Tensor tanh(const Tensor& a);
Tensor sigmoid(const Tensor& a);
Tensor relu(const Tensor& a);

Tensor concat_rows(const std::vector<Tensor>& parts);
Tensor concat_cols(const std::vector<Tensor>& parts);
Tensor slice_rows(const Tensor& a, int start, int count);
Tensor slice_cols(const Tensor& a, int start, int count);

// Zero out masked rows; gradients of masked rows are dropped.
Tensor mask_rows(const Tensor& a, const Mask& mask);

// Mean over unmasked rows -> [1 x n]. Accumulates each column's addends in
// sorted order so the result is bit-identical under row permutation. An
// all-masked (or empty) input pools to the zero vector.
Tensor masked_mean_rows(const Tensor& a, const Mask& mask);

// Softmax along `axis` (0 = down columns, 1 = along rows) of a rank-2 tensor.
// `mask` (optional) runs along the softmax axis and is shared by all slices;
// masked entries are exactly 0 in the output. DegenerateMaskError when every
// entry of the axis is masked.
Tensor masked_softmax(const Tensor& x, int axis, const Mask* mask = nullptr);
inline Tensor softmax(const Tensor& x, int axis) { return masked_softmax(x, axis, nullptr); }

// Per-row normalization over the last axis, then affine by gain/bias [1 x d].
Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& bias, double eps = 1e-5);

// loss = -log(score[gold] / sum(score)); score is a [1 x 3] (or length-3)
// vector of positive class scores. LabelError for gold outside {0,1,2}.
Tensor cross_entropy(const Tensor& score, int gold);

// y = x W + b with x [m x in], W [in x out], b [1 x out].
Tensor affine(const Tensor& x, const Tensor& w, const Tensor& b);

// Sum of all entries -> scalar.
Tensor sum_all(const Tensor& a);

// Observation hook: called with every masked_softmax output (tensor, axis,
// mask). Used by the test suites to audit attention-weight distributions
// produced anywhere in a model; no-op when unset.
using SoftmaxObserver = std::function<void(const Tensor&, int, const Mask*)>;
void set_softmax_observer(SoftmaxObserver observer);

} // namespace fashsent
