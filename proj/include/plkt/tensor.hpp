#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace plkt {

// Dense double-precision arrays (rank 0..2) with an eager tape for
// reverse-mode differentiation. Every op computes its value immediately and,
// when gradients are enabled and some input requires them, records a
// backward closure. Node creation order is a topological order of the graph,
// so backward() just replays reachable closures by descending id.

namespace detail {

struct Node {
    std::int64_t id = 0;
    std::vector<int> shape;
    std::vector<double> values;
    std::vector<double> grad; // allocated lazily; same length as values
    bool requires_grad = false;
    const char* op = "leaf";
    std::string name; // set for named leaves (parameters)
    std::vector<std::shared_ptr<Node>> parents;
    std::function<void(Node&)> backward_fn;

    std::size_t size() const { return values.size(); }
    void ensure_grad() {
        if (grad.size() != values.size()) grad.assign(values.size(), 0.0);
    }
};

} // namespace detail

class Tensor {
public:
    Tensor() = default;
    explicit Tensor(std::shared_ptr<detail::Node> n) : node_(std::move(n)) {}

    static Tensor leaf(std::vector<int> shape, std::vector<double> values,
                       bool requires_grad = false, std::string name = {});
    static Tensor scalar(double v, bool requires_grad = false, std::string name = {});
    static Tensor zeros(std::vector<int> shape, bool requires_grad = false, std::string name = {});

    bool defined() const { return node_ != nullptr; }
    const std::vector<int>& shape() const { return node_->shape; }
    std::size_t size() const { return node_->values.size(); }
    int rows() const { return node_->shape.at(0); }
    int cols() const { return node_->shape.at(1); }

    const std::vector<double>& values() const { return node_->values; }
    std::vector<double>& mutable_values() { return node_->values; }
    const std::vector<double>& grad() const { return node_->grad; }
    std::vector<double>& mutable_grad() { node_->ensure_grad(); return node_->grad; }
    double item() const;
    double operator[](std::size_t i) const { return node_->values[i]; }

    bool requires_grad() const { return node_ && node_->requires_grad; }
    const std::string& name() const { return node_->name; }
    void set_name(std::string n) { node_->name = std::move(n); }
    void zero_grad();

    detail::Node* node() const { return node_.get(); }
    std::shared_ptr<detail::Node> share() const { return node_; }

private:
    std::shared_ptr<detail::Node> node_;
};

// Gradient recording toggle. Ops created while disabled produce constant
// nodes with no parents, which keeps evaluation passes cheap.
bool grad_enabled();
void set_grad_enabled(bool on);

struct NoGradGuard {
    NoGradGuard() : prev_(grad_enabled()) { set_grad_enabled(false); }
    ~NoGradGuard() { set_grad_enabled(prev_); }
private:
    bool prev_;
};

// Runtime check that every op output is finite; on by default. The thrown
// message names the op (and parameter, for leaves) that produced the value.
void set_finite_checks(bool on);
bool finite_checks();

// Populates gradients of every requires_grad tensor reachable from `loss`.
// `loss` must be scalar; `seed` is the incoming adjoint (default 1).
void backward(const Tensor& loss, double seed = 1.0);

// ---- elementwise / arithmetic ----
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor div(const Tensor& a, const Tensor& b);
Tensor neg(const Tensor& a);
Tensor scale(const Tensor& a, double c);
Tensor add_const(const Tensor& a, double c);
// a + c*b with constant c (vector fuse used by weight fusion)
Tensor axpy(const Tensor& a, double c, const Tensor& b);
// broadcast of a scalar tensor against a vector
Tensor sub_scalar_vec(const Tensor& s, const Tensor& v); // s - v_i
Tensor add_scalar_vec(const Tensor& s, const Tensor& v); // v_i + s

// ---- reductions / linear algebra ----
Tensor sum(const Tensor& a);
Tensor dot(const Tensor& a, const Tensor& b);
Tensor matvec(const Tensor& A, const Tensor& x);
Tensor vecmat(const Tensor& x, const Tensor& A); // x [m] * A [m,n] -> [n]
Tensor matmul(const Tensor& A, const Tensor& B);
Tensor rowsum(const Tensor& A); // [m,n] -> [m]
Tensor colsum(const Tensor& A); // [m,n] -> [n]

// ---- shape / indexing ----
Tensor concat(const Tensor& a, const Tensor& b); // 1-D
Tensor slice(const Tensor& v, int start, int len); // 1-D
Tensor rows_block(const Tensor& A, int start, int count);
Tensor first_rows(const Tensor& A, int r);
Tensor gather_row(const Tensor& A, int row);
Tensor stack_rows(const std::vector<Tensor>& rows);
Tensor flatten(const Tensor& a);

// ---- nonlinearities / special ----
Tensor softplus(const Tensor& a);
Tensor sigmoid(const Tensor& a);
Tensor tanh(const Tensor& a);
Tensor exp(const Tensor& a);
Tensor log(const Tensor& a);
Tensor lgamma(const Tensor& a);
Tensor digamma(const Tensor& a);
Tensor softmax(const Tensor& v);        // 1-D, max-subtracted
Tensor softmax_cols(const Tensor& A);   // softmax over rows within each column
Tensor clip(const Tensor& a, double lo, double hi); // zero gradient outside (lo, hi)

class Rng; // forward decl (rng.hpp)
// Inverted dropout; identity when rate == 0. Mask drawn once at op creation.
Tensor dropout(const Tensor& a, double rate, Rng& rng);

} // namespace plkt
