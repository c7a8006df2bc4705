#pragma once

#include <cstdint>
#include <vector>

#include "fashsent/params.hpp"

namespace fashsent {

struct AdamwConfig {
    double beta1 = 0.55;
    double beta2 = 0.999;
    double eps = 1e-8;
    double weight_decay = 0.01;
    double base_lr = 0.001;
};

struct LrSchedule {
    double base_lr = 0.001;
    double decay_factor = 0.48;
    int decay_every = 10;

    // lr = base * factor^floor(epoch / every)
    double at(int epoch) const;
};

// Decoupled-weight-decay Adam over the tensors of a registry. Decay is
// applied to the parameter before the adaptive update. NumericError on a
// non-finite gradient, naming the offending parameter.
class AdamwOptimizer {
public:
    AdamwOptimizer(ParamRegistry& params, AdamwConfig config);

    void step(double lr);

    std::int64_t step_count() const { return step_count_; }
    const AdamwConfig& config() const { return config_; }
    // first/second moment of parameter i (registry order)
    const std::vector<double>& moment1(std::size_t i) const { return m_[i]; }
    const std::vector<double>& moment2(std::size_t i) const { return v_[i]; }

private:
    ParamRegistry& params_;
    AdamwConfig config_;
    std::int64_t step_count_ = 0;
    std::vector<std::vector<double>> m_;
    std::vector<std::vector<double>> v_;
};

} // namespace fashsent
