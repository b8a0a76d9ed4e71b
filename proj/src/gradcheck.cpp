#include "plkt/gradcheck.hpp"

#include <cmath>
#include <stdexcept>

namespace plkt {

GradCheckResult grad_check(const std::function<Tensor()>& fn,
                           std::vector<Tensor>& params, double step) {
    if (step <= 0.0) throw std::invalid_argument("grad_check: step must be positive");

    for (auto& p : params) p.zero_grad();
    Tensor loss = fn();
    backward(loss);

    std::vector<std::vector<double>> analytic;
    analytic.reserve(params.size());
    for (const auto& p : params) {
        if (p.grad().size() == p.size()) {
            analytic.push_back(p.grad());
        } else {
            analytic.emplace_back(p.size(), 0.0); // parameter unused by fn
        }
    }

    GradCheckResult result;
    NoGradGuard ng;
    for (std::size_t pi = 0; pi < params.size(); ++pi) {
        auto& values = params[pi].mutable_values();
        double diff_sq = 0.0, a_sq = 0.0, n_sq = 0.0;
        std::size_t worst_i = 0;
        double worst_diff = -1.0;
        for (std::size_t i = 0; i < values.size(); ++i) {
            const double saved = values[i];
            double fplus, fminus;
            try {
                values[i] = saved + step;
                fplus = fn().item();
                values[i] = saved - step;
                fminus = fn().item();
            } catch (const std::exception& e) {
                values[i] = saved;
                throw std::runtime_error("grad_check: non-finite evaluation while probing '" +
                                         params[pi].name() + "': " + e.what());
            }
            values[i] = saved;
            const double numeric = (fplus - fminus) / (2.0 * step);
            const double a = analytic[pi][i];
            diff_sq += (a - numeric) * (a - numeric);
            a_sq += a * a;
            n_sq += numeric * numeric;
            if (std::fabs(a - numeric) > worst_diff) {
                worst_diff = std::fabs(a - numeric);
                worst_i = i;
            }
        }
        // per-parameter ratio of norms; tiny groups fall back to the 1e-8 floor
        const double denom = std::max({std::sqrt(a_sq), std::sqrt(n_sq), 1e-8});
        const double rel = std::sqrt(diff_sq) / denom;
        if (rel > result.max_rel_error) {
            result.max_rel_error = rel;
            result.worst_param = params[pi].name();
            result.worst_index = worst_i;
        }
    }
    return result;
}

} // namespace plkt
