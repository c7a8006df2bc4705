#include "fashsent/params.hpp"

#include <cmath>

namespace fashsent {

void xavier_fill(Tensor& t, int fan_in, int fan_out, DetRng& rng) {
    const double bound = std::sqrt(6.0 / (fan_in + fan_out));
    for (auto& v : t.data()) v = rng.uniform(-bound, bound);
}

Tensor ParamRegistry::create(const std::string& name, std::vector<int> shape, Init init,
                             DetRng& rng) {
    if (contains(name)) throw DataError("parameter registered twice: " + name);
    Tensor t = Tensor::zeros(shape, /*requires_grad=*/true);
    switch (init) {
    case Init::xavier: {
        // weight matrices are stored [in x out]
        if (shape.size() != 2) throw ShapeError("xavier init expects a matrix: " + name);
        xavier_fill(t, shape[0], shape[1], rng);
        break;
    }
    case Init::zeros:
        break;
    case Init::ones:
        for (auto& v : t.data()) v = 1.0;
        break;
    }
    items_.emplace_back(name, t);
    return t;
}

Tensor ParamRegistry::find(const std::string& name) const {
    for (const auto& [n, t] : items_)
        if (n == name) return t;
    throw DataError("unknown parameter: " + name);
}

bool ParamRegistry::contains(const std::string& name) const {
    for (const auto& [n, t] : items_)
        if (n == name) return true;
    return false;
}

void ParamRegistry::zero_grads() {
    for (auto& [n, t] : items_) t.zero_grad();
}

std::size_t ParamRegistry::total_values() const {
    std::size_t n = 0;
    for (const auto& [name, t] : items_) n += t.size();
    return n;
}

std::vector<std::vector<double>> ParamRegistry::snapshot() const {
    std::vector<std::vector<double>> out;
    out.reserve(items_.size());
    for (const auto& [name, t] : items_) out.push_back(t.data());
    return out;
}

void ParamRegistry::restore(const std::vector<std::vector<double>>& snap) {
    if (snap.size() != items_.size())
        throw DataError("snapshot size does not match registry");
    for (std::size_t i = 0; i < snap.size(); ++i) {
        if (snap[i].size() != items_[i].second.size())
            throw DataError("snapshot tensor size mismatch at " + items_[i].first);
        items_[i].second.data() = snap[i];
    }
}

} // namespace fashsent
