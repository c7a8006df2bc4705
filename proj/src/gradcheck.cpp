#include "fashsent/gradcheck.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "fashsent/attention.hpp"
#include "fashsent/ops.hpp"
#include "fashsent/rng.hpp"

namespace fashsent {

const GradCheckGroup* GradCheckReport::find(const std::string& name) const {
    for (const auto& g : groups)
        if (g.name == name) return &g;
    return nullptr;
}

GradCheckReport check_gradients(const std::vector<std::pair<std::string, Tensor>>& groups,
                                const std::function<Tensor()>& loss_builder,
                                const GradCheckOptions& opts) {
    const auto t0 = std::chrono::steady_clock::now();
    GradCheckReport report;
    for (auto& [name, t] : groups) {
        Tensor handle = t;
        handle.zero_grad();
    }
    Tensor loss = loss_builder();
    loss.backward();

    std::vector<std::vector<double>> analytic;
    analytic.reserve(groups.size());
    for (const auto& [name, t] : groups) {
        analytic.push_back(t.grad());
        if (!opts.corrupt_group.empty() && name == opts.corrupt_group)
            for (auto& g : analytic.back()) g += 1.0;
    }

    DetRng rng(derive_seed(opts.seed, 0x9c));
    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
        const auto& name = groups[gi].first;
        Tensor t = groups[gi].second;
        GradCheckGroup group;
        group.name = name;
        auto& values = t.data();
        const std::size_t n = values.size();
        const int probes = static_cast<int>(std::min<std::size_t>(n, opts.probes_per_tensor));
        for (int p = 0; p < probes; ++p) {
            const std::size_t idx =
                probes == static_cast<int>(n) ? p : static_cast<std::size_t>(rng.next_below(n));
            const double saved = values[idx];
            values[idx] = saved + opts.eps;
            const double f_plus = loss_builder().value();
            values[idx] = saved - opts.eps;
            const double f_minus = loss_builder().value();
            values[idx] = saved;
            const double numeric = (f_plus - f_minus) / (2.0 * opts.eps);
            const double a = analytic[gi][idx];
            const double mag = std::max(std::abs(a), std::abs(numeric));
            const double rel = mag < 1e-8 ? 0.0 : std::abs(a - numeric) / mag;
            group.max_rel_err = std::max(group.max_rel_err, rel);
        }
        group.pass = group.max_rel_err < opts.tol;
        report.max_rel_err = std::max(report.max_rel_err, group.max_rel_err);
        report.all_pass = report.all_pass && group.pass;
        report.groups.push_back(std::move(group));
    }
    report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

namespace {

Tensor random_tensor(std::vector<int> shape, DetRng& rng, double lo = -1.0, double hi = 1.0) {
    Tensor t = Tensor::zeros(std::move(shape), /*requires_grad=*/true);
    for (auto& v : t.data()) v = rng.uniform(lo, hi);
    return t;
}

// fixed random weights, so the scalar loss samples the whole Jacobian
Tensor weighted_sum(const Tensor& out, DetRng& rng) {
    Tensor w = Tensor::zeros(out.shape());
    for (auto& v : w.data()) v = rng.uniform(-1.0, 1.0);
    return sum_all(mul(out, w));
}

Mask random_mask(int n, DetRng& rng) {
    Mask m(n, 0);
    for (auto& b : m) b = rng.next_double() < 0.7 ? 1 : 0;
    if (!mask_any(m)) m[static_cast<std::size_t>(rng.next_below(n))] = 1;
    return m;
}

void merge(GradCheckReport& into, const GradCheckReport& part) {
    for (const auto& g : part.groups) {
        into.groups.push_back(g);
        into.all_pass = into.all_pass && g.pass;
        into.max_rel_err = std::max(into.max_rel_err, g.max_rel_err);
    }
}

} // namespace

GradCheckReport grad_check_ops(const GradCheckOptions& opts) {
    const auto t0 = std::chrono::steady_clock::now();
    GradCheckReport report;
    DetRng rng(derive_seed(opts.seed, 0x0b5));

    auto check_binary = [&](const char* name, auto op, std::vector<int> sa, std::vector<int> sb) {
        Tensor a = random_tensor(sa, rng);
        Tensor b = random_tensor(sb, rng);
        DetRng wrng(derive_seed(opts.seed, fnv1a64(name)));
        auto loss = [&, wrng]() mutable {
            DetRng local = wrng;
            return weighted_sum(op(a, b), local);
        };
        merge(report, check_gradients({{std::string(name) + ".a", a}, {std::string(name) + ".b", b}},
                                      loss, opts));
    };
    auto check_unary = [&](const char* name, auto op, std::vector<int> sa, double lo = -1.0,
                           double hi = 1.0) {
        Tensor a = random_tensor(sa, rng, lo, hi);
        DetRng wrng(derive_seed(opts.seed, fnv1a64(name)));
        auto loss = [&, wrng]() mutable {
            DetRng local = wrng;
            return weighted_sum(op(a), local);
        };
        merge(report, check_gradients({{std::string(name) + ".x", a}}, loss, opts));
    };

    check_binary("add", [](const Tensor& a, const Tensor& b) { return add(a, b); }, {3, 4}, {3, 4});
    check_binary("sub", [](const Tensor& a, const Tensor& b) { return sub(a, b); }, {3, 4}, {3, 4});
    check_binary("mul", [](const Tensor& a, const Tensor& b) { return mul(a, b); }, {3, 4}, {3, 4});
    check_unary("scale", [](const Tensor& a) { return scale(a, -1.7); }, {2, 5});
    check_binary("add_rows", [](const Tensor& a, const Tensor& b) { return add_rows(a, b); },
                 {4, 3}, {1, 3});
    check_binary("add_scalar", [](const Tensor& a, const Tensor& b) { return add_scalar(a, b); },
                 {3, 3}, {1, 1});
    check_binary("outer_sum", [](const Tensor& a, const Tensor& b) { return outer_sum(a, b); },
                 {4, 1}, {1, 5});
    check_binary("matmul", [](const Tensor& a, const Tensor& b) { return matmul(a, b); }, {3, 4},
                 {4, 2});
    check_unary("transpose", [](const Tensor& a) { return transpose(a); }, {3, 5});
    check_unary("tanh", [](const Tensor& a) { return tanh(a); }, {3, 4});
    check_unary("sigmoid", [](const Tensor& a) { return sigmoid(a); }, {3, 4});
    // keep inputs away from the kink at zero: eps-ball there breaks the oracle
    check_unary("relu.pos", [](const Tensor& a) { return relu(a); }, {3, 4}, 0.05, 1.0);
    check_unary("relu.neg", [](const Tensor& a) { return relu(a); }, {3, 4}, -1.0, -0.05);
    check_binary("concat_rows",
                 [](const Tensor& a, const Tensor& b) {
                     return concat_rows({a, b});
                 },
                 {2, 4}, {3, 4});
    check_binary("concat_cols",
                 [](const Tensor& a, const Tensor& b) {
                     return concat_cols({a, b});
                 },
                 {3, 2}, {3, 4});
    check_unary("slice_rows", [](const Tensor& a) { return slice_rows(a, 1, 2); }, {4, 3});
    check_unary("slice_cols", [](const Tensor& a) { return slice_cols(a, 1, 3); }, {3, 5});
    check_unary("sum_all", [](const Tensor& a) { return scale(sum_all(a), 0.5); }, {3, 4});

    {
        Mask m = random_mask(5, rng);
        check_unary("mask_rows", [m](const Tensor& a) { return mask_rows(a, m); }, {5, 3});
        check_unary("masked_mean_rows",
                    [m](const Tensor& a) { return masked_mean_rows(a, m); }, {5, 3});
    }
    {
        Mask m = random_mask(6, rng);
        check_unary("masked_softmax.axis1",
                    [m](const Tensor& a) { return masked_softmax(a, 1, &m); }, {3, 6});
        check_unary("softmax.axis0", [](const Tensor& a) { return masked_softmax(a, 0, nullptr); },
                    {4, 3});
    }
    {
        Tensor x = random_tensor({3, 6}, rng);
        Tensor gain = random_tensor({1, 6}, rng, 0.5, 1.5);
        Tensor bias = random_tensor({1, 6}, rng);
        DetRng wrng(derive_seed(opts.seed, fnv1a64("layer_norm")));
        auto loss = [&, wrng]() mutable {
            DetRng local = wrng;
            return weighted_sum(layer_norm(x, gain, bias, 1e-5), local);
        };
        merge(report, check_gradients(
                          {{"layer_norm.x", x}, {"layer_norm.gain", gain}, {"layer_norm.bias", bias}},
                          loss, opts));
    }
    {
        Tensor score = random_tensor({1, 3}, rng, 0.1, 1.0);
        const int gold = static_cast<int>(rng.next_below(3));
        auto loss = [&]() { return cross_entropy(score, gold); };
        merge(report, check_gradients({{"cross_entropy.score", score}}, loss, opts));
    }
    {
        Tensor logits = random_tensor({1, 3}, rng);
        const int gold = static_cast<int>(rng.next_below(3));
        auto loss = [&]() { return cross_entropy(softmax(logits, 1), gold); };
        merge(report, check_gradients({{"cross_entropy.softmax_logits", logits}}, loss, opts));
    }
    {
        // composite op: full multi-head attention with a key mask
        ParamRegistry reg;
        DetRng prng(derive_seed(opts.seed, 0xa77));
        MhaParams mha(reg, "mha", 6, 4, 8, 2, prng);
        Tensor q = random_tensor({3, 6}, rng);
        Tensor k = random_tensor({5, 4}, rng);
        Tensor v = random_tensor({5, 4}, rng);
        Mask m = random_mask(5, rng);
        DetRng wrng(derive_seed(opts.seed, fnv1a64("mha")));
        auto loss = [&, wrng]() mutable {
            DetRng local = wrng;
            return weighted_sum(multi_head_attention(q, k, v, mha, &m), local);
        };
        std::vector<std::pair<std::string, Tensor>> groups = {
            {"mha.q", q}, {"mha.k", k}, {"mha.v", v}};
        for (const auto& item : reg.items()) groups.push_back(item);
        merge(report, check_gradients(groups, loss, opts));
    }

    report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

} // namespace fashsent
