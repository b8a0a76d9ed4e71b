#include "plkt/tensor.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>

#include "plkt/rng.hpp"
#include "plkt/special.hpp"

namespace plkt {

namespace {

thread_local bool g_grad_enabled = true;
bool g_finite_checks = true;
std::atomic<std::int64_t> g_next_id{1};

using detail::Node;
using NodePtr = std::shared_ptr<Node>;

std::size_t shape_numel(const std::vector<int>& shape) {
    std::size_t n = 1;
    for (int s : shape) {
        if (s < 0) throw std::invalid_argument("negative dimension in shape");
        n *= static_cast<std::size_t>(s);
    }
    return n;
}

void check_finite(const Node& n) {
    if (!g_finite_checks) return;
    for (double v : n.values) {
        if (!std::isfinite(v)) {
            std::string where = n.name.empty() ? std::string(n.op) : n.name;
            throw std::runtime_error("non-finite value produced by '" + where + "'");
        }
    }
}

NodePtr make_node(std::vector<int> shape, std::vector<double> values,
                  std::vector<NodePtr> parents, const char* op,
                  std::function<void(Node&)> backward_fn) {
    auto n = std::make_shared<Node>();
    n->id = g_next_id.fetch_add(1, std::memory_order_relaxed);
    n->shape = std::move(shape);
    n->values = std::move(values);
    n->op = op;
    bool rg = false;
    if (g_grad_enabled) {
        for (const auto& p : parents) rg = rg || p->requires_grad;
    }
    n->requires_grad = rg;
    if (rg) {
        n->parents = std::move(parents);
        n->backward_fn = std::move(backward_fn);
    }
    check_finite(*n);
    return n;
}

void require_same_size(const Tensor& a, const Tensor& b, const char* op) {
    if (a.size() != b.size()) {
        throw std::invalid_argument(std::string(op) + ": size mismatch");
    }
}

} // namespace

// ---- Tensor basics ----

Tensor Tensor::leaf(std::vector<int> shape, std::vector<double> values,
                    bool requires_grad, std::string name) {
    if (shape_numel(shape) != values.size()) {
        throw std::invalid_argument("leaf: shape does not match value count");
    }
    auto n = std::make_shared<detail::Node>();
    n->id = g_next_id.fetch_add(1, std::memory_order_relaxed);
    n->shape = std::move(shape);
    n->values = std::move(values);
    n->requires_grad = requires_grad;
    n->name = std::move(name);
    if (requires_grad) n->ensure_grad();
    check_finite(*n);
    return Tensor(std::move(n));
}

Tensor Tensor::scalar(double v, bool requires_grad, std::string name) {
    return leaf({1}, {v}, requires_grad, std::move(name));
}

Tensor Tensor::zeros(std::vector<int> shape, bool requires_grad, std::string name) {
    std::vector<double> v(shape_numel(shape), 0.0);
    return leaf(std::move(shape), std::move(v), requires_grad, std::move(name));
}

double Tensor::item() const {
    if (size() != 1) throw std::logic_error("item(): tensor is not scalar");
    return node_->values[0];
}

void Tensor::zero_grad() {
    if (node_) std::fill(node_->grad.begin(), node_->grad.end(), 0.0);
}

bool grad_enabled() { return g_grad_enabled; }
void set_grad_enabled(bool on) { g_grad_enabled = on; }
void set_finite_checks(bool on) { g_finite_checks = on; }
bool finite_checks() { return g_finite_checks; }

// ---- backward ----

void backward(const Tensor& loss, double seed) {
    if (loss.size() != 1) {
        throw std::logic_error("backward: loss must be scalar");
    }
    Node* root = loss.node();
    if (!root->requires_grad) return;

    // Collect reachable grad-requiring nodes; creation ids give topo order.
    std::vector<Node*> order;
    std::vector<Node*> stack{root};
    // visited marks via sorted unique at the end would be O(n log n); use a
    // small set keyed by pointer.
    std::vector<Node*> seen;
    auto mark = [&seen](Node* n) {
        auto it = std::lower_bound(seen.begin(), seen.end(), n);
        if (it != seen.end() && *it == n) return false;
        seen.insert(it, n);
        return true;
    };
    mark(root);
    while (!stack.empty()) {
        Node* n = stack.back();
        stack.pop_back();
        order.push_back(n);
        n->ensure_grad();
        for (const auto& p : n->parents) {
            if (p->requires_grad && mark(p.get())) stack.push_back(p.get());
        }
    }
    std::sort(order.begin(), order.end(),
              [](const Node* a, const Node* b) { return a->id > b->id; });

    root->grad[0] += seed;
    for (Node* n : order) {
        if (n->backward_fn) n->backward_fn(*n);
    }
}

// ---- op helpers ----



// ---- elementwise ----

Tensor add(const Tensor& a, const Tensor& b) {
    require_same_size(a, b, "add");
    const auto& av = a.values();
    const auto& bv = b.values();
    std::vector<double> out(av.size());
    for (std::size_t i = 0; i < av.size(); ++i) out[i] = av[i] + bv[i];
    auto ap = a.share(), bp = b.share();
    return Tensor(make_node(a.shape(), std::move(out), {ap, bp}, "add",
        [ap, bp](Node& n) {
            if (ap->requires_grad) {
                ap->ensure_grad();
                for (std::size_t i = 0; i < n.grad.size(); ++i) ap->grad[i] += n.grad[i];
            }
            if (bp->requires_grad) {
                bp->ensure_grad();
                for (std::size_t i = 0; i < n.grad.size(); ++i) bp->grad[i] += n.grad[i];
            }
        }));
}

Tensor sub(const Tensor& a, const Tensor& b) {
    require_same_size(a, b, "sub");
    const auto& av = a.values();
    const auto& bv = b.values();
    std::vector<double> out(av.size());
    for (std::size_t i = 0; i < av.size(); ++i) out[i] = av[i] - bv[i];
    auto ap = a.share(), bp = b.share();
    return Tensor(make_node(a.shape(), std::move(out), {ap, bp}, "sub",
        [ap, bp](Node& n) {
            if (ap->requires_grad) {
                ap->ensure_grad();
                for (std::size_t i = 0; i < n.grad.size(); ++i) ap->grad[i] += n.grad[i];
            }
            if (bp->requires_grad) {
                bp->ensure_grad();
                for (std::size_t i = 0; i < n.grad.size(); ++i) bp->grad[i] -= n.grad[i];
            }
        }));
}

Tensor mul(const Tensor& a, const Tensor& b) {
    require_same_size(a, b, "mul");
    const auto& av = a.values();
    const auto& bv = b.values();
    std::vector<double> out(av.size());
    for (std::size_t i = 0; i < av.size(); ++i) out[i] = av[i] * bv[i];
    auto ap = a.share(), bp = b.share();
    return Tensor(make_node(a.shape(), std::move(out), {ap, bp}, "mul",
        [ap, bp](Node& n) {
            if (ap->requires_grad) {
                ap->ensure_grad();
                for (std::size_t i = 0; i < n.grad.size(); ++i)
                    ap->grad[i] += n.grad[i] * bp->values[i];
            }
            if (bp->requires_grad) {
                bp->ensure_grad();
                for (std::size_t i = 0; i < n.grad.size(); ++i)
                    bp->grad[i] += n.grad[i] * ap->values[i];
            }
        }));
}

Tensor div(const Tensor& a, const Tensor& b) {
    require_same_size(a, b, "div");
    const auto& av = a.values();
    const auto& bv = b.values();
    std::vector<double> out(av.size());
    for (std::size_t i = 0; i < av.size(); ++i) out[i] = av[i] / bv[i];
    auto ap = a.share(), bp = b.share();
    return Tensor(make_node(a.shape(), std::move(out), {ap, bp}, "div",
        [ap, bp](Node& n) {
            if (ap->requires_grad) {
                ap->ensure_grad();
                for (std::size_t i = 0; i < n.grad.size(); ++i)
                    ap->grad[i] += n.grad[i] / bp->values[i];
            }
            if (bp->requires_grad) {
                bp->ensure_grad();
                for (std::size_t i = 0; i < n.grad.size(); ++i)
                    bp->grad[i] -= n.grad[i] * n.values[i] / bp->values[i];
            }
        }));
}

Tensor neg(const Tensor& a) { return scale(a, -1.0); }

Tensor scale(const Tensor& a, double c) {
    const auto& av = a.values();
    std::vector<double> out(av.size());
    for (std::size_t i = 0; i < av.size(); ++i) out[i] = av[i] * c;
    auto ap = a.share();
    return Tensor(make_node(a.shape(), std::move(out), {ap}, "scale",
        [ap, c](Node& n) {
            ap->ensure_grad();
            for (std::size_t i = 0; i < n.grad.size(); ++i) ap->grad[i] += c * n.grad[i];
        }));
}

Tensor add_const(const Tensor& a, double c) {
    const auto& av = a.values();
    std::vector<double> out(av.size());
    for (std::size_t i = 0; i < av.size(); ++i) out[i] = av[i] + c;
    auto ap = a.share();
    return Tensor(make_node(a.shape(), std::move(out), {ap}, "add_const",
        [ap](Node& n) {
            ap->ensure_grad();
            for (std::size_t i = 0; i < n.grad.size(); ++i) ap->grad[i] += n.grad[i];
        }));
}

Tensor axpy(const Tensor& a, double c, const Tensor& b) {
    require_same_size(a, b, "axpy");
    const auto& av = a.values();
    const auto& bv = b.values();
    std::vector<double> out(av.size());
    for (std::size_t i = 0; i < av.size(); ++i) out[i] = av[i] + c * bv[i];
    auto ap = a.share(), bp = b.share();
    return Tensor(make_node(a.shape(), std::move(out), {ap, bp}, "axpy",
        [ap, bp, c](Node& n) {
            if (ap->requires_grad) {
                ap->ensure_grad();
                for (std::size_t i = 0; i < n.grad.size(); ++i) ap->grad[i] += n.grad[i];
            }
            if (bp->requires_grad) {
                bp->ensure_grad();
                for (std::size_t i = 0; i < n.grad.size(); ++i) bp->grad[i] += c * n.grad[i];
            }
        }));
}

Tensor sub_scalar_vec(const Tensor& s, const Tensor& v) {
    if (s.size() != 1) throw std::invalid_argument("sub_scalar_vec: s must be scalar");
    const double sv = s[0];
    const auto& vv = v.values();
    std::vector<double> out(vv.size());
    for (std::size_t i = 0; i < vv.size(); ++i) out[i] = sv - vv[i];
    auto sp = s.share(), vp = v.share();
    return Tensor(make_node(v.shape(), std::move(out), {sp, vp}, "sub_scalar_vec",
        [sp, vp](Node& n) {
            if (sp->requires_grad) {
                sp->ensure_grad();
                double g = 0.0;
                for (double gi : n.grad) g += gi;
                sp->grad[0] += g;
            }
            if (vp->requires_grad) {
                vp->ensure_grad();
                for (std::size_t i = 0; i < n.grad.size(); ++i) vp->grad[i] -= n.grad[i];
            }
        }));
}

Tensor add_scalar_vec(const Tensor& s, const Tensor& v) {
    if (s.size() != 1) throw std::invalid_argument("add_scalar_vec: s must be scalar");
    const double sv = s[0];
    const auto& vv = v.values();
    std::vector<double> out(vv.size());
    for (std::size_t i = 0; i < vv.size(); ++i) out[i] = vv[i] + sv;
    auto sp = s.share(), vp = v.share();
    return Tensor(make_node(v.shape(), std::move(out), {sp, vp}, "add_scalar_vec",
        [sp, vp](Node& n) {
            if (sp->requires_grad) {
                sp->ensure_grad();
                double g = 0.0;
                for (double gi : n.grad) g += gi;
                sp->grad[0] += g;
            }
            if (vp->requires_grad) {
                vp->ensure_grad();
                for (std::size_t i = 0; i < n.grad.size(); ++i) vp->grad[i] += n.grad[i];
            }
        }));
}

// ---- reductions / linear algebra ----

Tensor sum(const Tensor& a) {
    double s = 0.0;
    for (double v : a.values()) s += v;
    auto ap = a.share();
    return Tensor(make_node({1}, {s}, {ap}, "sum",
        [ap](Node& n) {
            ap->ensure_grad();
            for (double& g : ap->grad) g += n.grad[0];
        }));
}

Tensor dot(const Tensor& a, const Tensor& b) {
    require_same_size(a, b, "dot");
    const auto& av = a.values();
    const auto& bv = b.values();
    double s = 0.0;
    for (std::size_t i = 0; i < av.size(); ++i) s += av[i] * bv[i];
    auto ap = a.share(), bp = b.share();
    return Tensor(make_node({1}, {s}, {ap, bp}, "dot",
        [ap, bp](Node& n) {
            const double g = n.grad[0];
            if (ap->requires_grad) {
                ap->ensure_grad();
                for (std::size_t i = 0; i < ap->grad.size(); ++i)
                    ap->grad[i] += g * bp->values[i];
            }
            if (bp->requires_grad) {
                bp->ensure_grad();
                for (std::size_t i = 0; i < bp->grad.size(); ++i)
                    bp->grad[i] += g * ap->values[i];
            }
        }));
}

Tensor matvec(const Tensor& A, const Tensor& x) {
    if (A.shape().size() != 2 || x.shape().size() != 1 || A.cols() != static_cast<int>(x.size())) {
        throw std::invalid_argument("matvec: shape mismatch");
    }
    const int m = A.rows(), k = A.cols();
    const auto& av = A.values();
    const auto& xv = x.values();
    std::vector<double> out(static_cast<std::size_t>(m), 0.0);
    for (int i = 0; i < m; ++i) {
        const double* row = av.data() + static_cast<std::size_t>(i) * k;
        double s = 0.0;
        for (int j = 0; j < k; ++j) s += row[j] * xv[j];
        out[i] = s;
    }
    auto Ap = A.share(), xp = x.share();
    return Tensor(make_node({m}, std::move(out), {Ap, xp}, "matvec",
        [Ap, xp, m, k](Node& n) {
            if (Ap->requires_grad) {
                Ap->ensure_grad();
                for (int i = 0; i < m; ++i) {
                    const double g = n.grad[i];
                    if (g == 0.0) continue;
                    double* grow = Ap->grad.data() + static_cast<std::size_t>(i) * k;
                    for (int j = 0; j < k; ++j) grow[j] += g * xp->values[j];
                }
            }
            if (xp->requires_grad) {
                xp->ensure_grad();
                for (int i = 0; i < m; ++i) {
                    const double g = n.grad[i];
                    if (g == 0.0) continue;
                    const double* row = Ap->values.data() + static_cast<std::size_t>(i) * k;
                    for (int j = 0; j < k; ++j) xp->grad[j] += g * row[j];
                }
            }
        }));
}

Tensor vecmat(const Tensor& x, const Tensor& A) {
    if (A.shape().size() != 2 || x.shape().size() != 1 || A.rows() != static_cast<int>(x.size())) {
        throw std::invalid_argument("vecmat: shape mismatch");
    }
    const int m = A.rows(), n_ = A.cols();
    const auto& av = A.values();
    const auto& xv = x.values();
    std::vector<double> out(static_cast<std::size_t>(n_), 0.0);
    for (int i = 0; i < m; ++i) {
        const double xi = xv[i];
        if (xi == 0.0) continue;
        const double* row = av.data() + static_cast<std::size_t>(i) * n_;
        for (int j = 0; j < n_; ++j) out[j] += xi * row[j];
    }
    auto xp = x.share(), Ap = A.share();
    return Tensor(make_node({n_}, std::move(out), {xp, Ap}, "vecmat",
        [xp, Ap, m, n_](Node& n) {
            if (xp->requires_grad) {
                xp->ensure_grad();
                for (int i = 0; i < m; ++i) {
                    const double* row = Ap->values.data() + static_cast<std::size_t>(i) * n_;
                    double s = 0.0;
                    for (int j = 0; j < n_; ++j) s += row[j] * n.grad[j];
                    xp->grad[i] += s;
                }
            }
            if (Ap->requires_grad) {
                Ap->ensure_grad();
                for (int i = 0; i < m; ++i) {
                    const double xi = xp->values[i];
                    if (xi == 0.0) continue;
                    double* grow = Ap->grad.data() + static_cast<std::size_t>(i) * n_;
                    for (int j = 0; j < n_; ++j) grow[j] += xi * n.grad[j];
                }
            }
        }));
}

Tensor matmul(const Tensor& A, const Tensor& B) {
    if (A.shape().size() != 2 || B.shape().size() != 2 || A.cols() != B.rows()) {
        throw std::invalid_argument("matmul: shape mismatch");
    }
    const int m = A.rows(), k = A.cols(), n_ = B.cols();
    const auto& av = A.values();
    const auto& bv = B.values();
    std::vector<double> out(static_cast<std::size_t>(m) * n_, 0.0);
    for (int i = 0; i < m; ++i) {
        for (int p = 0; p < k; ++p) {
            const double a = av[static_cast<std::size_t>(i) * k + p];
            const double* brow = bv.data() + static_cast<std::size_t>(p) * n_;
            double* orow = out.data() + static_cast<std::size_t>(i) * n_;
            for (int j = 0; j < n_; ++j) orow[j] += a * brow[j];
        }
    }
    auto Ap = A.share(), Bp = B.share();
    return Tensor(make_node({m, n_}, std::move(out), {Ap, Bp}, "matmul",
        [Ap, Bp, m, k, n_](Node& n) {
            if (Ap->requires_grad) {
                Ap->ensure_grad();
                // gA = g . B^T
                for (int i = 0; i < m; ++i) {
                    for (int p = 0; p < k; ++p) {
                        double s = 0.0;
                        const double* grow = n.grad.data() + static_cast<std::size_t>(i) * n_;
                        const double* brow = Bp->values.data() + static_cast<std::size_t>(p) * n_;
                        for (int j = 0; j < n_; ++j) s += grow[j] * brow[j];
                        Ap->grad[static_cast<std::size_t>(i) * k + p] += s;
                    }
                }
            }
            if (Bp->requires_grad) {
                Bp->ensure_grad();
                // gB = A^T . g
                for (int p = 0; p < k; ++p) {
                    for (int i = 0; i < m; ++i) {
                        const double a = Ap->values[static_cast<std::size_t>(i) * k + p];
                        if (a == 0.0) continue;
                        const double* grow = n.grad.data() + static_cast<std::size_t>(i) * n_;
                        double* brow = Bp->grad.data() + static_cast<std::size_t>(p) * n_;
                        for (int j = 0; j < n_; ++j) brow[j] += a * grow[j];
                    }
                }
            }
        }));
}

Tensor rowsum(const Tensor& A) {
    if (A.shape().size() != 2) throw std::invalid_argument("rowsum: matrix required");
    const int m = A.rows(), k = A.cols();
    const auto& av = A.values();
    std::vector<double> out(static_cast<std::size_t>(m), 0.0);
    for (int i = 0; i < m; ++i) {
        const double* row = av.data() + static_cast<std::size_t>(i) * k;
        double s = 0.0;
        for (int j = 0; j < k; ++j) s += row[j];
        out[i] = s;
    }
    auto Ap = A.share();
    return Tensor(make_node({m}, std::move(out), {Ap}, "rowsum",
        [Ap, m, k](Node& n) {
            Ap->ensure_grad();
            for (int i = 0; i < m; ++i) {
                const double g = n.grad[i];
                if (g == 0.0) continue;
                double* grow = Ap->grad.data() + static_cast<std::size_t>(i) * k;
                for (int j = 0; j < k; ++j) grow[j] += g;
            }
        }));
}

Tensor colsum(const Tensor& A) {
    if (A.shape().size() != 2) throw std::invalid_argument("colsum: matrix required");
    const int m = A.rows(), k = A.cols();
    const auto& av = A.values();
    std::vector<double> out(static_cast<std::size_t>(k), 0.0);
    for (int i = 0; i < m; ++i) {
        const double* row = av.data() + static_cast<std::size_t>(i) * k;
        for (int j = 0; j < k; ++j) out[j] += row[j];
    }
    auto Ap = A.share();
    return Tensor(make_node({k}, std::move(out), {Ap}, "colsum",
        [Ap, m, k](Node& n) {
            Ap->ensure_grad();
            for (int i = 0; i < m; ++i) {
                double* grow = Ap->grad.data() + static_cast<std::size_t>(i) * k;
                for (int j = 0; j < k; ++j) grow[j] += n.grad[j];
            }
        }));
}

// ---- shape / indexing ----

Tensor concat(const Tensor& a, const Tensor& b) {
    if (a.shape().size() != 1 || b.shape().size() != 1) {
        throw std::invalid_argument("concat: 1-D tensors required");
    }
    std::vector<double> out;
    out.reserve(a.size() + b.size());
    out.insert(out.end(), a.values().begin(), a.values().end());
    out.insert(out.end(), b.values().begin(), b.values().end());
    const int asz = static_cast<int>(a.size());
    auto ap = a.share(), bp = b.share();
    return Tensor(make_node({static_cast<int>(out.size())}, std::move(out), {ap, bp}, "concat",
        [ap, bp, asz](Node& n) {
            if (ap->requires_grad) {
                ap->ensure_grad();
                for (int i = 0; i < asz; ++i) ap->grad[i] += n.grad[i];
            }
            if (bp->requires_grad) {
                bp->ensure_grad();
                for (std::size_t i = asz; i < n.grad.size(); ++i)
                    bp->grad[i - asz] += n.grad[i];
            }
        }));
}

Tensor slice(const Tensor& v, int start, int len) {
    if (v.shape().size() != 1 || start < 0 || len < 0 ||
        static_cast<std::size_t>(start + len) > v.size()) {
        throw std::invalid_argument("slice: out of range");
    }
    std::vector<double> out(v.values().begin() + start, v.values().begin() + start + len);
    auto vp = v.share();
    return Tensor(make_node({len}, std::move(out), {vp}, "slice",
        [vp, start](Node& n) {
            vp->ensure_grad();
            for (std::size_t i = 0; i < n.grad.size(); ++i) vp->grad[start + i] += n.grad[i];
        }));
}

Tensor rows_block(const Tensor& A, int start, int count) {
    if (A.shape().size() != 2 || start < 0 || count < 0 || start + count > A.rows()) {
        throw std::invalid_argument("rows_block: out of range");
    }
    const int k = A.cols();
    const std::size_t off = static_cast<std::size_t>(start) * k;
    std::vector<double> out(A.values().begin() + off,
                            A.values().begin() + off + static_cast<std::size_t>(count) * k);
    auto Ap = A.share();
    return Tensor(make_node({count, k}, std::move(out), {Ap}, "rows_block",
        [Ap, off](Node& n) {
            Ap->ensure_grad();
            for (std::size_t i = 0; i < n.grad.size(); ++i) Ap->grad[off + i] += n.grad[i];
        }));
}

Tensor first_rows(const Tensor& A, int r) { return rows_block(A, 0, r); }

Tensor gather_row(const Tensor& A, int row) {
    if (A.shape().size() != 2 || row < 0 || row >= A.rows()) {
        throw std::invalid_argument("gather_row: row out of range");
    }
    const int k = A.cols();
    const std::size_t off = static_cast<std::size_t>(row) * k;
    std::vector<double> out(A.values().begin() + off, A.values().begin() + off + k);
    auto Ap = A.share();
    return Tensor(make_node({k}, std::move(out), {Ap}, "gather_row",
        [Ap, off](Node& n) {
            Ap->ensure_grad();
            for (std::size_t i = 0; i < n.grad.size(); ++i) Ap->grad[off + i] += n.grad[i];
        }));
}

Tensor stack_rows(const std::vector<Tensor>& rows) {
    if (rows.empty()) throw std::invalid_argument("stack_rows: empty input");
    const std::size_t k = rows.front().size();
    std::vector<double> out;
    out.reserve(rows.size() * k);
    std::vector<NodePtr> parents;
    parents.reserve(rows.size());
    for (const auto& r : rows) {
        if (r.size() != k) throw std::invalid_argument("stack_rows: ragged rows");
        out.insert(out.end(), r.values().begin(), r.values().end());
        parents.push_back(r.share());
    }
    auto ps = parents; // captured copy
    return Tensor(make_node({static_cast<int>(rows.size()), static_cast<int>(k)},
                               std::move(out), std::move(parents), "stack_rows",
        [ps, k](Node& n) {
            for (std::size_t r = 0; r < ps.size(); ++r) {
                if (!ps[r]->requires_grad) continue;
                ps[r]->ensure_grad();
                const double* g = n.grad.data() + r * k;
                for (std::size_t j = 0; j < k; ++j) ps[r]->grad[j] += g[j];
            }
        }));
}

Tensor flatten(const Tensor& a) {
    auto ap = a.share();
    std::vector<double> out = a.values();
    return Tensor(make_node({static_cast<int>(out.size())}, std::move(out), {ap}, "flatten",
        [ap](Node& n) {
            ap->ensure_grad();
            for (std::size_t i = 0; i < n.grad.size(); ++i) ap->grad[i] += n.grad[i];
        }));
}

// ---- nonlinearities ----

namespace {

double softplus_val(double x) {
    if (x > 30.0) return x;
    if (x < -30.0) return std::exp(x);
    return std::log1p(std::exp(x));
}

double sigmoid_val(double x) {
    if (x >= 0.0) {
        double e = std::exp(-x);
        return 1.0 / (1.0 + e);
    }
    double e = std::exp(x);
    return e / (1.0 + e);
}

template <typename FwdFn, typename GradFn>
Tensor unary_op(const Tensor& a, const char* name, FwdFn fwd, GradFn dfn) {
    const auto& av = a.values();
    std::vector<double> out(av.size());
    for (std::size_t i = 0; i < av.size(); ++i) out[i] = fwd(av[i]);
    auto ap = a.share();
    return Tensor(make_node(a.shape(), std::move(out), {ap}, name,
        [ap, dfn](Node& n) {
            ap->ensure_grad();
            for (std::size_t i = 0; i < n.grad.size(); ++i) {
                ap->grad[i] += n.grad[i] * dfn(ap->values[i], n.values[i]);
            }
        }));
}

} // namespace

Tensor softplus(const Tensor& a) {
    return unary_op(a, "softplus", softplus_val,
                    [](double x, double) { return sigmoid_val(x); });
}

Tensor sigmoid(const Tensor& a) {
    return unary_op(a, "sigmoid", sigmoid_val,
                    [](double, double y) { return y * (1.0 - y); });
}

Tensor tanh(const Tensor& a) {
    return unary_op(a, "tanh", [](double x) { return std::tanh(x); },
                    [](double, double y) { return 1.0 - y * y; });
}

Tensor exp(const Tensor& a) {
    return unary_op(a, "exp", [](double x) { return std::exp(x); },
                    [](double, double y) { return y; });
}

Tensor log(const Tensor& a) {
    return unary_op(a, "log", [](double x) { return std::log(x); },
                    [](double x, double) { return 1.0 / x; });
}

Tensor lgamma(const Tensor& a) {
    return unary_op(a, "lgamma", [](double x) { return plkt::lgamma(x); },
                    [](double x, double) { return plkt::digamma(x); });
}

Tensor digamma(const Tensor& a) {
    return unary_op(a, "digamma", [](double x) { return plkt::digamma(x); },
                    [](double x, double) { return plkt::trigamma(x); });
}

Tensor softmax(const Tensor& v) {
    if (v.shape().size() != 1 || v.size() == 0) {
        throw std::invalid_argument("softmax: nonempty 1-D tensor required");
    }
    const auto& x = v.values();
    double m = x[0];
    for (double xi : x) m = std::max(m, xi);
    std::vector<double> out(x.size());
    double z = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        out[i] = std::exp(x[i] - m);
        z += out[i];
    }
    for (double& o : out) o /= z;
    auto vp = v.share();
    return Tensor(make_node(v.shape(), std::move(out), {vp}, "softmax",
        [vp](Node& n) {
            vp->ensure_grad();
            double gy = 0.0;
            for (std::size_t i = 0; i < n.grad.size(); ++i) gy += n.grad[i] * n.values[i];
            for (std::size_t i = 0; i < n.grad.size(); ++i) {
                vp->grad[i] += n.values[i] * (n.grad[i] - gy);
            }
        }));
}

Tensor softmax_cols(const Tensor& A) {
    if (A.shape().size() != 2) throw std::invalid_argument("softmax_cols: matrix required");
    const int m = A.rows(), k = A.cols();
    const auto& x = A.values();
    std::vector<double> out(x.size());
    for (int j = 0; j < k; ++j) {
        double mx = x[j];
        for (int i = 1; i < m; ++i) mx = std::max(mx, x[static_cast<std::size_t>(i) * k + j]);
        double z = 0.0;
        for (int i = 0; i < m; ++i) {
            double e = std::exp(x[static_cast<std::size_t>(i) * k + j] - mx);
            out[static_cast<std::size_t>(i) * k + j] = e;
            z += e;
        }
        for (int i = 0; i < m; ++i) out[static_cast<std::size_t>(i) * k + j] /= z;
    }
    auto Ap = A.share();
    return Tensor(make_node(A.shape(), std::move(out), {Ap}, "softmax_cols",
        [Ap, m, k](Node& n) {
            Ap->ensure_grad();
            for (int j = 0; j < k; ++j) {
                double gy = 0.0;
                for (int i = 0; i < m; ++i) {
                    const std::size_t idx = static_cast<std::size_t>(i) * k + j;
                    gy += n.grad[idx] * n.values[idx];
                }
                for (int i = 0; i < m; ++i) {
                    const std::size_t idx = static_cast<std::size_t>(i) * k + j;
                    Ap->grad[idx] += n.values[idx] * (n.grad[idx] - gy);
                }
            }
        }));
}

Tensor clip(const Tensor& a, double lo, double hi) {
    const auto& av = a.values();
    std::vector<double> out(av.size());
    for (std::size_t i = 0; i < av.size(); ++i) out[i] = std::min(std::max(av[i], lo), hi);
    auto ap = a.share();
    return Tensor(make_node(a.shape(), std::move(out), {ap}, "clip",
        [ap, lo, hi](Node& n) {
            ap->ensure_grad();
            for (std::size_t i = 0; i < n.grad.size(); ++i) {
                const double x = ap->values[i];
                if (x > lo && x < hi) ap->grad[i] += n.grad[i];
            }
        }));
}

Tensor dropout(const Tensor& a, double rate, Rng& rng) {
    if (rate <= 0.0) return a;
    if (rate >= 1.0) throw std::invalid_argument("dropout: rate must be < 1");
    const double keep = 1.0 - rate;
    const auto& av = a.values();
    auto mask = std::make_shared<std::vector<double>>(av.size());
    std::vector<double> out(av.size());
    for (std::size_t i = 0; i < av.size(); ++i) {
        const double m = rng.bernoulli(rate) ? 0.0 : 1.0 / keep;
        (*mask)[i] = m;
        out[i] = av[i] * m;
    }
    auto ap = a.share();
    return Tensor(make_node(a.shape(), std::move(out), {ap}, "dropout",
        [ap, mask](Node& n) {
            ap->ensure_grad();
            for (std::size_t i = 0; i < n.grad.size(); ++i)
                ap->grad[i] += n.grad[i] * (*mask)[i];
        }));
}

} // namespace plkt
