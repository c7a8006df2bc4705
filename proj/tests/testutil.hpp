#pragma once

#include <cmath>
#include <vector>

#include "fashsent/rng.hpp"
#include "fashsent/tensor.hpp"

namespace fashsent::testutil {

inline Tensor random_tensor(std::vector<int> shape, DetRng& rng, double lo = -1.0,
                            double hi = 1.0, bool requires_grad = false) {
    Tensor t = Tensor::zeros(std::move(shape), requires_grad);
    for (auto& v : t.data()) v = rng.uniform(lo, hi);
    return t;
}

inline bool bit_equal(const Tensor& a, const Tensor& b) {
    if (a.shape() != b.shape()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a.data()[i] != b.data()[i]) return false;
    return true;
}

inline double max_abs_diff(const Tensor& a, const Tensor& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
    return m;
}

} // namespace fashsent::testutil
