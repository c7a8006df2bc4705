#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "fashsent/tensor.hpp"

namespace fashsent {

struct GradCheckOptions {
    double eps = 1e-5;
    double tol = 1e-4;
    int probes_per_tensor = 4;
    std::uint64_t seed = 0;
    // Test hook: the named group's analytic gradient is corrupted before the
    // comparison, so the check must fail there (negative control).
    std::string corrupt_group;
};

struct GradCheckGroup {
    std::string name;
    double max_rel_err = 0.0;
    bool pass = true;
};

struct GradCheckReport {
    std::vector<GradCheckGroup> groups;
    bool all_pass = true;
    double max_rel_err = 0.0;
    double seconds = 0.0;

    const GradCheckGroup* find(const std::string& name) const;
};

// Compares the reverse-mode gradient of loss_builder() w.r.t. each listed
// tensor against central finite differences at `probes_per_tensor` sampled
// coordinates. loss_builder must rebuild the forward graph from the tensors'
// current values on every call.
GradCheckReport check_gradients(const std::vector<std::pair<std::string, Tensor>>& groups,
                                const std::function<Tensor()>& loss_builder,
                                const GradCheckOptions& opts);

// Randomized gradient checks over every differentiable op.
GradCheckReport grad_check_ops(const GradCheckOptions& opts);

// One branch ("va", "ta", "vt", "fusion", "early", "late") end to end.
GradCheckReport grad_check_branch(const std::string& branch, const GradCheckOptions& opts);

// Full model cross-entropy over a small synthetic batch.
GradCheckReport grad_check_full(const GradCheckOptions& opts, int batch = 4);

} // namespace fashsent
