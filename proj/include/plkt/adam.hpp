#pragma once

#include <cstdint>
#include <vector>

#include "plkt/tensor.hpp"

namespace plkt {

// Standard Adam with bias correction. One state per parameter list; the
// moment buffers are laid out to mirror params order and shape.
struct AdamState {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    std::int64_t step_count = 0;
    std::vector<std::vector<double>> first_moment;
    std::vector<std::vector<double>> second_moment;

    static AdamState create(const std::vector<Tensor>& params, double learning_rate,
                            double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);
};

// Applies one Adam update from each parameter's accumulated .grad().
// Throws std::runtime_error naming the parameter on non-finite gradients.
void adam_step(AdamState& state, std::vector<Tensor>& params);

} // namespace plkt
