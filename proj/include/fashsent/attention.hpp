#pragma once

#include <string>
#include <vector>

#include "fashsent/ops.hpp"
#include "fashsent/params.hpp"

namespace fashsent {

struct AffineParams {
    Tensor w; // [in x out]
    Tensor b; // [1 x out]

    AffineParams() = default;
    AffineParams(ParamRegistry& reg, const std::string& prefix, int in, int out, DetRng& rng);
    Tensor apply(const Tensor& x) const { return affine(x, w, b); }
};

struct LayerNormParams {
    Tensor gain; // [1 x d]
    Tensor bias; // [1 x d]
    double eps = 1e-5;

    LayerNormParams() = default;
    LayerNormParams(ParamRegistry& reg, const std::string& prefix, int d, DetRng& rng);
    Tensor apply(const Tensor& x) const { return layer_norm(x, gain, bias, eps); }
};

// Projection weights of one multi-head attention; no projection biases.
struct MhaParams {
    Tensor wq; // [dq x dm]
    Tensor wk; // [dk x dm]
    Tensor wv; // [dk x dm]
    Tensor wo; // [dm x dm]
    int heads = 1;

    MhaParams() = default;
    MhaParams(ParamRegistry& reg, const std::string& prefix, int dq, int dk, int dm, int heads,
              DetRng& rng);
};

// Scaled dot-product attention over `heads` heads. Per head, weights are
// masked_softmax(Q K^T / sqrt(dm/heads)) over the keys; the concatenated head
// outputs go through the output projection. DegenerateMaskError when every
// key is masked.
Tensor multi_head_attention(const Tensor& query, const Tensor& key, const Tensor& value,
                            const MhaParams& params, const Mask* key_mask = nullptr);

// Position-wise feed-forward: affine to 2x width, rectified linear, affine back.
struct FfnParams {
    AffineParams inner;
    AffineParams outer;

    FfnParams() = default;
    FfnParams(ParamRegistry& reg, const std::string& prefix, int d, DetRng& rng);
    Tensor apply(const Tensor& x) const { return outer.apply(relu(inner.apply(x))); }
};

// One self-attention block: attention with residual then norm, feed-forward
// with residual then norm. Masked rows are zeroed on output.
struct SelfAttentionBlock {
    MhaParams mha;
    LayerNormParams ln_att;
    FfnParams ffn;
    LayerNormParams ln_ffn;

    SelfAttentionBlock() = default;
    SelfAttentionBlock(ParamRegistry& reg, const std::string& prefix, int d, int heads,
                       DetRng& rng);
    Tensor run(const Tensor& x, const Mask& mask) const;
};

// D chained blocks whose per-token outputs are averaged elementwise. An empty
// sequence passes through as an empty output.
struct SelfAttentionStack {
    std::vector<SelfAttentionBlock> blocks;

    SelfAttentionStack() = default;
    SelfAttentionStack(ParamRegistry& reg, const std::string& prefix, int d, int heads, int depth,
                       DetRng& rng);
    Tensor run(const Tensor& seq, const Mask& mask) const;
};

} // namespace fashsent
