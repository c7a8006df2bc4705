#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fashsent/attention.hpp"
#include "fashsent/gradcheck.hpp"
#include "fashsent/ops.hpp"
#include "fashsent/optimizer.hpp"
#include "testutil.hpp"

using namespace fashsent;
using testutil::bit_equal;
using testutil::random_tensor;

TEST_CASE("matmul identity, hand value, annihilator") {
    Tensor eye = Tensor::from({2, 2}, {1, 0, 0, 1});
    Tensor a = Tensor::from({2, 2}, {3.5, -1.25, 2.0, 7.0});
    CHECK(bit_equal(matmul(eye, a), a));

    Tensor b = Tensor::from({2, 2}, {1, 2, 3, 4});
    Tensor ones = Tensor::from({2, 1}, {1, 1});
    Tensor c = matmul(b, ones);
    CHECK(c.at(0, 0) == 3.0);
    CHECK(c.at(1, 0) == 7.0);

    Tensor zero = Tensor::zeros({2, 3});
    Tensor d = matmul(a, zero);
    for (double v : d.data()) CHECK(v == 0.0);
}

TEST_CASE("matmul shape mismatch names both shapes") {
    Tensor a = Tensor::zeros({2, 3});
    Tensor b = Tensor::zeros({4, 2});
    try {
        matmul(a, b);
        FAIL("expected ShapeError");
    } catch (const ShapeError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("[2x3]") != std::string::npos);
        CHECK(msg.find("[4x2]") != std::string::npos);
    }
}

TEST_CASE("masked_softmax uniform, shift invariance, hand value") {
    Tensor z = Tensor::row({0, 0, 0});
    Tensor s = softmax(z, 1);
    for (int j = 0; j < 3; ++j) CHECK(s.at(0, j) == doctest::Approx(1.0 / 3).epsilon(1e-12));

    DetRng rng(11);
    Tensor x = random_tensor({1, 6}, rng);
    Tensor shifted = Tensor::row(x.data());
    for (auto& v : shifted.data()) v += 3.75;
    CHECK(testutil::max_abs_diff(softmax(x, 1), softmax(shifted, 1)) < 1e-12);

    Mask m = {1, 1, 0};
    Tensor ones = Tensor::row({1, 1, 1});
    Tensor w = masked_softmax(ones, 1, &m);
    CHECK(w.at(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(w.at(0, 1) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(w.at(0, 2) == 0.0);
}

TEST_CASE("masked_softmax slice sums and degenerate mask") {
    DetRng rng(5);
    Tensor x = random_tensor({7, 9}, rng, -4.0, 4.0);
    Mask m(9, 0);
    m[2] = m[5] = m[8] = 1;
    Tensor w = masked_softmax(x, 1, &m);
    for (int i = 0; i < 7; ++i) {
        double sum = 0.0;
        for (int j = 0; j < 9; ++j) {
            sum += w.at(i, j);
            if (!m[j]) CHECK(w.at(i, j) == 0.0);
            else CHECK(w.at(i, j) > 0.0);
        }
        CHECK(std::abs(sum - 1.0) < 1e-9);
    }
    // axis 0 as well
    Tensor w0 = softmax(x, 0);
    for (int j = 0; j < 9; ++j) {
        double sum = 0.0;
        for (int i = 0; i < 7; ++i) sum += w0.at(i, j);
        CHECK(std::abs(sum - 1.0) < 1e-9);
    }

    Mask all0(9, 0);
    CHECK_THROWS_AS(masked_softmax(x, 1, &all0), DegenerateMaskError);
}

TEST_CASE("layer_norm constant row, analytic row, zero gain") {
    Tensor g1 = Tensor::row({1, 1});
    Tensor b0 = Tensor::row({0, 0});
    Tensor c = layer_norm(Tensor::row({1, 1}), g1, b0, 1e-5);
    CHECK(c.at(0, 0) == 0.0);
    CHECK(c.at(0, 1) == 0.0);

    Tensor d = layer_norm(Tensor::row({1, -1}), g1, b0, 1e-15);
    CHECK(d.at(0, 0) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(d.at(0, 1) == doctest::Approx(-1.0).epsilon(1e-9));

    Tensor gz = Tensor::row({0, 0});
    Tensor bias = Tensor::row({2.5, -3.5});
    Tensor e = layer_norm(Tensor::row({0.3, 0.9}), gz, bias, 1e-5);
    CHECK(e.at(0, 0) == 2.5);
    CHECK(e.at(0, 1) == -3.5);
}

TEST_CASE("layer_norm output statistics") {
    DetRng rng(23);
    Tensor x = random_tensor({6, 32}, rng);
    Tensor gain = Tensor::full({1, 32}, 1.0);
    Tensor bias = Tensor::zeros({1, 32});
    Tensor y = layer_norm(x, gain, bias, 1e-12);
    for (int i = 0; i < 6; ++i) {
        double mean = 0.0;
        for (int j = 0; j < 32; ++j) mean += y.at(i, j);
        mean /= 32;
        CHECK(std::abs(mean) < 1e-9);
        double var = 0.0;
        for (int j = 0; j < 32; ++j) var += (y.at(i, j) - mean) * (y.at(i, j) - mean);
        var /= 32;
        CHECK(std::abs(var - 1.0) < 1e-6);
    }
}

TEST_CASE("cross_entropy analytic values and label error") {
    Tensor uniform = Tensor::row({1.0 / 3, 1.0 / 3, 1.0 / 3});
    for (int gold = 0; gold < 3; ++gold)
        CHECK(cross_entropy(uniform, gold).value() == doctest::Approx(std::log(3.0)).epsilon(1e-12));

    // renormalization: scaled scores give the same loss
    Tensor scaled = Tensor::row({2.0 / 3, 2.0 / 3, 2.0 / 3});
    CHECK(cross_entropy(scaled, 1).value() == doctest::Approx(std::log(3.0)).epsilon(1e-12));

    Tensor certain = Tensor::row({1e-12, 1.0, 1e-12});
    CHECK(cross_entropy(certain, 1).value() == doctest::Approx(0.0).epsilon(1e-9));

    Tensor half = Tensor::row({0.5, 0.25, 0.25});
    CHECK(cross_entropy(half, 0).value() == doctest::Approx(std::log(2.0)).epsilon(1e-12));

    CHECK_THROWS_AS(cross_entropy(uniform, 3), LabelError);
    CHECK_THROWS_AS(cross_entropy(uniform, -1), LabelError);
}

TEST_CASE("backward: square, constant, non-scalar contract") {
    Tensor x = Tensor::scalar(3.0, true);
    Tensor y = mul(x, x);
    y.backward();
    CHECK(x.grad()[0] == doctest::Approx(6.0).epsilon(1e-14));

    Tensor c = Tensor::scalar(5.0); // no requires_grad
    Tensor x2 = Tensor::scalar(2.0, true);
    Tensor z = mul(add(x2, c), x2);
    z.backward();
    CHECK(c.grad()[0] == 0.0);

    Tensor vec = Tensor::row({1, 2, 3});
    CHECK_THROWS_AS(vec.backward(), ContractError);
}

TEST_CASE("graph introspection: acyclic, inputs precede outputs") {
    Tensor a = Tensor::scalar(1.5, true);
    Tensor b = Tensor::scalar(-0.5, true);
    Tensor loss = mul(add(a, b), sub(a, b));
    auto graph = graph_of(loss);
    CHECK(graph.size() >= 5);
    std::vector<std::uint64_t> seen;
    for (const auto& node : graph) {
        for (auto in : node.inputs) {
            bool found = false;
            for (auto s : seen)
                if (s == in) found = true;
            CHECK(found); // every input appears earlier in the order
        }
        for (auto s : seen) CHECK(s != node.id); // no repeats, hence acyclic
        seen.push_back(node.id);
    }
}

TEST_CASE("multi_head_attention: single key, identical keys, masked key") {
    ParamRegistry reg;
    DetRng rng(7);
    MhaParams mha(reg, "mha", 6, 6, 8, 2, rng);

    // one key: every query row maps to the same projected value row
    Tensor q = random_tensor({4, 6}, rng);
    Tensor kv = random_tensor({1, 6}, rng);
    Tensor out = multi_head_attention(q, kv, kv, mha);
    for (int i = 1; i < 4; ++i)
        for (int j = 0; j < 8; ++j) CHECK(out.at(i, j) == out.at(0, j));

    // query content does not matter with a single unmasked key
    Tensor q2 = random_tensor({4, 6}, rng);
    Tensor out2 = multi_head_attention(q2, kv, kv, mha);
    CHECK(bit_equal(out, out2));

    // identical keys: uniform weights over unmasked slots; masked exactly 0
    Tensor one_key = random_tensor({1, 6}, rng);
    std::vector<Tensor> reps(5, one_key);
    Tensor keys = concat_rows(reps);
    Mask mask = {1, 0, 1, 1, 0};
    std::vector<Tensor> captured;
    set_softmax_observer([&](const Tensor& w, int, const Mask*) { captured.push_back(w); });
    Tensor out3 = multi_head_attention(q, keys, keys, mha, &mask);
    set_softmax_observer(nullptr);
    REQUIRE(captured.size() == 2); // one weight matrix per head
    for (const Tensor& w : captured) {
        for (int i = 0; i < w.rows(); ++i) {
            CHECK(w.at(i, 0) == doctest::Approx(1.0 / 3).epsilon(1e-12));
            CHECK(w.at(i, 1) == 0.0);
            CHECK(w.at(i, 4) == 0.0);
        }
    }

    Mask all_masked(5, 0);
    CHECK_THROWS_AS(multi_head_attention(q, keys, keys, mha, &all_masked), DegenerateMaskError);
}

TEST_CASE("adamw: no-op, decay only, first-step magnitude, NaN abort") {
    DetRng rng(3);

    {
        ParamRegistry reg;
        Tensor p = reg.create("p", {1, 2}, Init::zeros, rng);
        p.data() = {1.0, -2.0};
        AdamwConfig cfg;
        cfg.weight_decay = 0.0;
        AdamwOptimizer opt(reg, cfg);
        p.zero_grad();
        opt.step(0.001);
        CHECK(p.data()[0] == 1.0);
        CHECK(p.data()[1] == -2.0);
    }
    {
        ParamRegistry reg;
        Tensor p = reg.create("p", {1, 2}, Init::zeros, rng);
        p.data() = {1.0, -2.0};
        AdamwConfig cfg;
        cfg.weight_decay = 0.25; // dyadic so the expected update is exact
        AdamwOptimizer opt(reg, cfg);
        p.zero_grad();
        opt.step(0.5);
        CHECK(p.data()[0] == 1.0 - 0.5 * 0.25 * 1.0);
        CHECK(p.data()[1] == -2.0 - 0.5 * 0.25 * -2.0);
    }
    {
        ParamRegistry reg;
        Tensor p = reg.create("p", {1, 1}, Init::zeros, rng);
        AdamwConfig cfg;
        cfg.weight_decay = 0.0;
        AdamwOptimizer opt(reg, cfg);
        p.grad_data()[0] = 0.3;
        opt.step(0.001);
        CHECK(p.data()[0] == doctest::Approx(-0.001).epsilon(1e-6));

        ParamRegistry reg2;
        Tensor p2 = reg2.create("p", {1, 1}, Init::zeros, rng);
        AdamwOptimizer opt2(reg2, cfg);
        p2.grad_data()[0] = -0.7;
        opt2.step(0.001);
        CHECK(p2.data()[0] == doctest::Approx(0.001).epsilon(1e-6));
    }
    {
        ParamRegistry reg;
        Tensor p = reg.create("va.gate", {1, 2}, Init::zeros, rng);
        AdamwOptimizer opt(reg, AdamwConfig{});
        p.grad_data()[1] = std::nan("");
        try {
            opt.step(0.001);
            FAIL("expected NumericError");
        } catch (const NumericError& e) {
            CHECK(std::string(e.what()).find("va.gate") != std::string::npos);
        }
    }
}

TEST_CASE("lr schedule exact drop values") {
    LrSchedule sched;
    CHECK(sched.at(0) == 0.001);
    CHECK(sched.at(9) == 0.001);
    CHECK(sched.at(10) == 0.00048);
    CHECK(sched.at(19) == 0.00048);
    CHECK(sched.at(20) == 0.0002304);
    CHECK_THROWS_AS(sched.at(-1), ContractError);
}

TEST_CASE("gradient property: every op passes finite differences over seeds") {
    for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
        GradCheckOptions opts;
        opts.seed = seed;
        auto report = grad_check_ops(opts);
        INFO("seed ", seed, " max_rel_err ", report.max_rel_err);
        CHECK(report.all_pass);
        CHECK(report.max_rel_err < 1e-4);
    }
}

TEST_CASE("gradcheck negative control: corrupted gradient fails by name") {
    GradCheckOptions opts;
    opts.seed = 9;
    opts.corrupt_group = "matmul.a";
    auto report = grad_check_ops(opts);
    CHECK_FALSE(report.all_pass);
    const auto* grp = report.find("matmul.a");
    REQUIRE(grp != nullptr);
    CHECK_FALSE(grp->pass);
    // everything else still passes
    for (const auto& g : report.groups)
        if (g.name != "matmul.a") CHECK(g.pass);
}

TEST_CASE("masked_mean_rows: permutation bit-exactness and degenerate pool") {
    DetRng rng(31);
    Tensor x = random_tensor({6, 5}, rng);
    Mask m = {1, 0, 1, 1, 0, 1};
    Tensor pooled = masked_mean_rows(x, m);

    // permute rows and mask together: bit-identical pooled vector
    std::vector<int> perm = {4, 2, 0, 5, 1, 3};
    Tensor px = Tensor::zeros({6, 5});
    Mask pm(6);
    for (int i = 0; i < 6; ++i) {
        pm[i] = m[perm[i]];
        for (int j = 0; j < 5; ++j) px.data()[i * 5 + j] = x.at(perm[i], j);
    }
    CHECK(bit_equal(pooled, masked_mean_rows(px, pm)));

    Mask none(6, 0);
    Tensor zero = masked_mean_rows(x, none);
    for (double v : zero.data()) CHECK(v == 0.0);
}

TEST_CASE("determinism: identical seeds give bit-identical results") {
    auto run = [](std::uint64_t seed) {
        DetRng rng(seed);
        ParamRegistry reg;
        MhaParams mha(reg, "m", 6, 6, 6, 3, rng);
        Tensor x = random_tensor({5, 6}, rng, -1, 1, true);
        Mask mask = {1, 1, 1, 0, 1};
        Tensor out = multi_head_attention(x, x, x, mha, &mask);
        Tensor loss = sum_all(layer_norm(out, Tensor::full({1, 6}, 1.0), Tensor::zeros({1, 6})));
        loss.backward();
        auto g = x.grad();
        auto d = out.data();
        d.insert(d.end(), g.begin(), g.end());
        d.push_back(loss.value());
        return d;
    };
    CHECK(run(42) == run(42));
    CHECK(run(42) != run(43));
}
