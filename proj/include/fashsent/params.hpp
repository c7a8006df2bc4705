#pragma once

#include <string>
#include <utility>
#include <vector>

#include "fashsent/rng.hpp"
#include "fashsent/tensor.hpp"

namespace fashsent {

enum class Init { xavier, zeros, ones };

// Ordered collection of named learnable tensors. Registration order is the
// initialization-draw order, so a fixed seed reproduces identical weights.
class ParamRegistry {
public:
    Tensor create(const std::string& name, std::vector<int> shape, Init init, DetRng& rng);

    const std::vector<std::pair<std::string, Tensor>>& items() const { return items_; }
    Tensor find(const std::string& name) const; // DataError if absent
    bool contains(const std::string& name) const;

    void zero_grads();
    std::size_t total_values() const;

    // Flat copies of all parameter values, in registration order.
    std::vector<std::vector<double>> snapshot() const;
    void restore(const std::vector<std::vector<double>>& snap);

private:
    std::vector<std::pair<std::string, Tensor>> items_;
};

// Uniform in +-sqrt(6 / (fan_in + fan_out)); biases/gains handled by Init.
void xavier_fill(Tensor& t, int fan_in, int fan_out, DetRng& rng);

} // namespace fashsent
