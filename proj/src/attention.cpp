#include "fashsent/attention.hpp"

#include <cmath>

namespace fashsent {

AffineParams::AffineParams(ParamRegistry& reg, const std::string& prefix, int in, int out,
                           DetRng& rng) {
    w = reg.create(prefix + ".w", {in, out}, Init::xavier, rng);
    b = reg.create(prefix + ".b", {1, out}, Init::zeros, rng);
}

LayerNormParams::LayerNormParams(ParamRegistry& reg, const std::string& prefix, int d,
                                 DetRng& rng) {
    gain = reg.create(prefix + ".gain", {1, d}, Init::ones, rng);
    bias = reg.create(prefix + ".bias", {1, d}, Init::zeros, rng);
}

MhaParams::MhaParams(ParamRegistry& reg, const std::string& prefix, int dq, int dk, int dm,
                     int heads_, DetRng& rng)
    : heads(heads_) {
    if (dm % heads != 0)
        throw ConfigError("attention width " + std::to_string(dm) + " not divisible by " +
                          std::to_string(heads) + " heads");
    wq = reg.create(prefix + ".wq", {dq, dm}, Init::xavier, rng);
    wk = reg.create(prefix + ".wk", {dk, dm}, Init::xavier, rng);
    wv = reg.create(prefix + ".wv", {dk, dm}, Init::xavier, rng);
    wo = reg.create(prefix + ".wo", {dm, dm}, Init::xavier, rng);
}

Tensor multi_head_attention(const Tensor& query, const Tensor& key, const Tensor& value,
                            const MhaParams& params, const Mask* key_mask) {
    if (key.rows() != value.rows())
        throw ShapeError("multi_head_attention: key/value row mismatch");
    if (key_mask && !mask_any(*key_mask))
        throw DegenerateMaskError("multi_head_attention: every key is masked");
    const int dm = params.wq.cols();
    const int dh = dm / params.heads;
    const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(dh));

    Tensor q = matmul(query, params.wq);
    Tensor k = matmul(key, params.wk);
    Tensor v = matmul(value, params.wv);

    std::vector<Tensor> head_outputs;
    head_outputs.reserve(params.heads);
    for (int h = 0; h < params.heads; ++h) {
        Tensor qh = slice_cols(q, h * dh, dh);
        Tensor kh = slice_cols(k, h * dh, dh);
        Tensor vh = slice_cols(v, h * dh, dh);
        Tensor scores = scale(matmul(qh, transpose(kh)), inv_sqrt);
        Tensor weights = masked_softmax(scores, /*axis=*/1, key_mask);
        head_outputs.push_back(matmul(weights, vh));
    }
    return matmul(concat_cols(head_outputs), params.wo);
}

FfnParams::FfnParams(ParamRegistry& reg, const std::string& prefix, int d, DetRng& rng)
    : inner(reg, prefix + ".inner", d, 2 * d, rng), outer(reg, prefix + ".outer", 2 * d, d, rng) {}

SelfAttentionBlock::SelfAttentionBlock(ParamRegistry& reg, const std::string& prefix, int d,
                                       int heads, DetRng& rng)
    : mha(reg, prefix + ".mha", d, d, d, heads, rng),
      ln_att(reg, prefix + ".ln_att", d, rng),
      ffn(reg, prefix + ".ffn", d, rng),
      ln_ffn(reg, prefix + ".ln_ffn", d, rng) {}

Tensor SelfAttentionBlock::run(const Tensor& x, const Mask& mask) const {
    Tensor attended = multi_head_attention(x, x, x, mha, &mask);
    Tensor h = ln_att.apply(add(x, attended));
    Tensor out = ln_ffn.apply(add(h, ffn.apply(h)));
    return mask_rows(out, mask);
}

SelfAttentionStack::SelfAttentionStack(ParamRegistry& reg, const std::string& prefix, int d,
                                       int heads, int depth, DetRng& rng) {
    blocks.reserve(depth);
    for (int i = 0; i < depth; ++i)
        blocks.emplace_back(reg, prefix + ".block" + std::to_string(i), d, heads, rng);
}

Tensor SelfAttentionStack::run(const Tensor& seq, const Mask& mask) const {
    if (seq.rows() == 0) return seq;
    Tensor cur = seq;
    Tensor sum;
    for (const auto& block : blocks) {
        cur = block.run(cur, mask);
        sum = sum.defined() ? add(sum, cur) : cur;
    }
    return scale(sum, 1.0 / static_cast<double>(blocks.size()));
}

} // namespace fashsent
