#include "fashsent/optimizer.hpp"

#include <cmath>

namespace fashsent {

double LrSchedule::at(int epoch) const {
    if (epoch < 0) throw ContractError("lr schedule: negative epoch");
    const int drops = epoch / decay_every;
    double factor = 1.0;
    for (int i = 0; i < drops; ++i) factor *= decay_factor;
    return base_lr * factor;
}

AdamwOptimizer::AdamwOptimizer(ParamRegistry& params, AdamwConfig config)
    : params_(params), config_(config) {
    m_.resize(params_.items().size());
    v_.resize(params_.items().size());
    for (std::size_t i = 0; i < m_.size(); ++i) {
        const std::size_t n = params_.items()[i].second.size();
        m_[i].assign(n, 0.0);
        v_[i].assign(n, 0.0);
    }
}

void AdamwOptimizer::step(double lr) {
    if (!(lr > 0.0)) throw ContractError("adamw step: learning rate must be positive");
    ++step_count_;
    const double b1 = config_.beta1, b2 = config_.beta2;
    const double bc1 = 1.0 - std::pow(b1, static_cast<double>(step_count_));
    const double bc2 = 1.0 - std::pow(b2, static_cast<double>(step_count_));
    for (std::size_t i = 0; i < params_.items().size(); ++i) {
        const auto& name = params_.items()[i].first;
        Tensor t = params_.items()[i].second; // shared handle
        auto& p = t.data();
        const auto& g = t.grad();
        auto& m = m_[i];
        auto& v = v_[i];
        for (std::size_t j = 0; j < p.size(); ++j) {
            if (!std::isfinite(g[j]))
                throw NumericError("adamw step: non-finite gradient in parameter '" + name +
                                   "' at index " + std::to_string(j));
            // decoupled decay first, then the adaptive update
            p[j] -= lr * config_.weight_decay * p[j];
            m[j] = b1 * m[j] + (1.0 - b1) * g[j];
            v[j] = b2 * v[j] + (1.0 - b2) * g[j] * g[j];
            const double mhat = m[j] / bc1;
            const double vhat = v[j] / bc2;
            p[j] -= lr * mhat / (std::sqrt(vhat) + config_.eps);
        }
    }
}

} // namespace fashsent
