#pragma once

#include <string>

#include "plkt/context.hpp"
#include "plkt/rng.hpp"
#include "plkt/tensor.hpp"

namespace plkt {

// One-hidden-layer perceptron with tanh activation. Dropout, when active,
// applies to the hidden layer only.
struct MlpParams {
    Tensor w1; // [hidden, in]
    Tensor b1; // [hidden]
    Tensor w2; // [out, hidden]
    Tensor b2; // [out]

    int in_dim() const { return w1.cols(); }
    int hidden_dim() const { return w1.rows(); }
    int out_dim() const { return w2.rows(); }
};

inline MlpParams make_mlp(int in, int hidden, int out, Rng& rng, const std::string& name) {
    auto glorot = [&rng](int rows, int cols, const std::string& n) {
        const double std_dev = std::sqrt(2.0 / (rows + cols));
        std::vector<double> v(static_cast<std::size_t>(rows) * cols);
        for (auto& x : v) x = rng.gaussian(0.0, std_dev);
        return Tensor::leaf({rows, cols}, std::move(v), true, n);
    };
    MlpParams p;
    p.w1 = glorot(hidden, in, name + ".w1");
    p.b1 = Tensor::zeros({hidden}, true, name + ".b1");
    p.w2 = glorot(out, hidden, name + ".w2");
    p.b2 = Tensor::zeros({out}, true, name + ".b2");
    return p;
}

inline Tensor mlp_forward(const MlpParams& p, const Tensor& x, const ForwardCtx& ctx) {
    Tensor h = tanh(add(matvec(p.w1, x), p.b1));
    if (ctx.dropout_active()) h = dropout(h, ctx.dropout, *ctx.rng);
    return add(matvec(p.w2, h), p.b2);
}

} // namespace plkt
