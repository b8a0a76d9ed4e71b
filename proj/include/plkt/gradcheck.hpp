#pragma once

#include <functional>
#include <string>
#include <vector>

#include "plkt/tensor.hpp"

namespace plkt {

struct GradCheckResult {
    double max_rel_error = 0.0;
    std::string worst_param;   // name of the parameter group with the worst error
    std::size_t worst_index = 0;
};

// Compares the analytic gradient of `fn` (a deterministic scalar function of
// `params`, evaluated by rebuilding its graph) against central differences
// with the given step. Relative error uses
// |analytic - numeric| / max(|analytic|, |numeric|, 1e-8).
GradCheckResult grad_check(const std::function<Tensor()>& fn,
                           std::vector<Tensor>& params, double step);

} // namespace plkt
