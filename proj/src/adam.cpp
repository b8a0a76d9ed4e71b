#include "plkt/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace plkt {

AdamState AdamState::create(const std::vector<Tensor>& params, double learning_rate,
                            double beta1, double beta2, double eps) {
    AdamState s;
    s.learning_rate = learning_rate;
    s.beta1 = beta1;
    s.beta2 = beta2;
    s.eps = eps;
    s.first_moment.reserve(params.size());
    s.second_moment.reserve(params.size());
    for (const auto& p : params) {
        s.first_moment.emplace_back(p.size(), 0.0);
        s.second_moment.emplace_back(p.size(), 0.0);
    }
    return s;
}

void adam_step(AdamState& state, std::vector<Tensor>& params) {
    if (params.size() != state.first_moment.size()) {
        throw std::invalid_argument("adam_step: state/param count mismatch");
    }
    state.step_count += 1;
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step_count));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step_count));
    for (std::size_t pi = 0; pi < params.size(); ++pi) {
        Tensor& p = params[pi];
        const auto& g = p.grad();
        if (g.size() != p.size()) {
            throw std::invalid_argument("adam_step: missing gradient for " + p.name());
        }
        auto& m = state.first_moment[pi];
        auto& v = state.second_moment[pi];
        auto& x = p.mutable_values();
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double gi = g[i];
            if (!std::isfinite(gi)) {
                throw std::runtime_error("adam_step: non-finite gradient in '" + p.name() + "'");
            }
            m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * gi;
            v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * gi * gi;
            const double mhat = m[i] / bc1;
            const double vhat = v[i] / bc2;
            x[i] -= state.learning_rate * mhat / (std::sqrt(vhat) + state.eps);
        }
    }
}

} // namespace plkt
