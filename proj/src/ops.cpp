#include "fashsent/ops.hpp"

#include <algorithm>
#include <cblas.h>
#include <cmath>
#include <limits>
#include <mutex>

extern "C" void openblas_set_num_threads(int);

namespace fashsent {

namespace {

SoftmaxObserver g_softmax_observer;

void ensure_blas_single_threaded() {
    static std::once_flag once;
    // one BLAS thread keeps results bit-reproducible and avoids oversubscription
    std::call_once(once, [] { openblas_set_num_threads(1); });
}

bool any_grad(const Tensor& a) { return a.requires_grad(); }
bool any_grad(const Tensor& a, const Tensor& b) { return a.requires_grad() || b.requires_grad(); }

Tensor make_out(std::vector<int> shape, const char* op, std::initializer_list<Tensor> parents,
                bool requires_grad) {
    auto node = detail::make_node(std::move(shape), op);
    node->requires_grad = requires_grad;
    if (requires_grad)
        for (const Tensor& p : parents) node->parents.push_back(p.node_ptr());
    return Tensor(std::move(node));
}

void check_same_shape(const Tensor& a, const Tensor& b, const char* op) {
    if (a.shape() != b.shape())
        throw ShapeError(std::string(op) + ": shape mismatch " + detail::shape_str(a.shape()) +
                         " vs " + detail::shape_str(b.shape()));
}

void check_rank2(const Tensor& a, const char* op) {
    if (a.rank() != 2)
        throw ShapeError(std::string(op) + ": expected a matrix, got " +
                         detail::shape_str(a.shape()));
}

// dC = [m x n]; accumulate dA += dC * B^T, dB += A^T * dC
void dgemm_acc(CBLAS_TRANSPOSE ta, CBLAS_TRANSPOSE tb, int m, int n, int k, const double* a,
               int lda, const double* b, int ldb, double* c, int ldc) {
    ensure_blas_single_threaded();
    cblas_dgemm(CblasRowMajor, ta, tb, m, n, k, 1.0, a, lda, b, ldb, 1.0, c, ldc);
}

} // namespace

void set_softmax_observer(SoftmaxObserver observer) { g_softmax_observer = std::move(observer); }

Tensor add(const Tensor& a, const Tensor& b) {
    check_same_shape(a, b, "add");
    Tensor out = make_out(a.shape(), "add", {a, b}, any_grad(a, b));
    const auto& av = a.data();
    const auto& bv = b.data();
    auto& ov = out.data();
    for (std::size_t i = 0; i < ov.size(); ++i) ov[i] = av[i] + bv[i];
    if (out.requires_grad()) {
        out.node()->backward_fn = [](TensorNode& n) {
            for (int p = 0; p < 2; ++p) {
                TensorNode* parent = n.parents[p].get();
                if (!parent->requires_grad) continue;
                parent->ensure_grad();
                for (std::size_t i = 0; i < n.grad.size(); ++i) parent->grad[i] += n.grad[i];
            }
        };
    }
    return out;
}

Tensor sub(const Tensor& a, const Tensor& b) {
    check_same_shape(a, b, "sub");
    Tensor out = make_out(a.shape(), "sub", {a, b}, any_grad(a, b));
    const auto& av = a.data();
    const auto& bv = b.data();
    auto& ov = out.data();
    for (std::size_t i = 0; i < ov.size(); ++i) ov[i] = av[i] - bv[i];
    if (out.requires_grad()) {
        out.node()->backward_fn = [](TensorNode& n) {
            TensorNode* pa = n.parents[0].get();
            TensorNode* pb = n.parents[1].get();
            if (pa->requires_grad) {
                pa->ensure_grad();
                for (std::size_t i = 0; i < n.grad.size(); ++i) pa->grad[i] += n.grad[i];
            }
            if (pb->requires_grad) {
                pb->ensure_grad();
                for (std::size_t i = 0; i < n.grad.size(); ++i) pb->grad[i] -= n.grad[i];
            }
        };
    }
    return out;
}

Tensor mul(const Tensor& a, const Tensor& b) {
    check_same_shape(a, b, "mul");
    Tensor out = make_out(a.shape(), "mul", {a, b}, any_grad(a, b));
    const auto& av = a.data();
    const auto& bv = b.data();
    auto& ov = out.data();
    for (std::size_t i = 0; i < ov.size(); ++i) ov[i] = av[i] * bv[i];
    if (out.requires_grad()) {
        out.node()->backward_fn = [](TensorNode& n) {
            TensorNode* pa = n.parents[0].get();
            TensorNode* pb = n.parents[1].get();
            if (pa->requires_grad) {
                pa->ensure_grad();
                for (std::size_t i = 0; i < n.grad.size(); ++i)
                    pa->grad[i] += n.grad[i] * pb->data[i];
            }
            if (pb->requires_grad) {
                pb->ensure_grad();
                for (std::size_t i = 0; i < n.grad.size(); ++i)
                    pb->grad[i] += n.grad[i] * pa->data[i];
            }
        };
    }
    return out;
}

Tensor scale(const Tensor& a, double c) {
    Tensor out = make_out(a.shape(), "scale", {a}, any_grad(a));
    const auto& av = a.data();
    auto& ov = out.data();
    for (std::size_t i = 0; i < ov.size(); ++i) ov[i] = av[i] * c;
    if (out.requires_grad()) {
        out.node()->backward_fn = [c](TensorNode& n) {
            TensorNode* pa = n.parents[0].get();
            if (!pa->requires_grad) return;
            pa->ensure_grad();
            for (std::size_t i = 0; i < n.grad.size(); ++i) pa->grad[i] += n.grad[i] * c;
        };
    }
    return out;
}

Tensor add_rows(const Tensor& m, const Tensor& row) {
    check_rank2(m, "add_rows");
    check_rank2(row, "add_rows");
    if (row.rows() != 1 || row.cols() != m.cols())
        throw ShapeError("add_rows: row " + detail::shape_str(row.shape()) +
                         " incompatible with " + detail::shape_str(m.shape()));
    const int r = m.rows(), c = m.cols();
    Tensor out = make_out({r, c}, "add_rows", {m, row}, any_grad(m, row));
    const auto& mv = m.data();
    const auto& rv = row.data();
    auto& ov = out.data();
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) ov[i * c + j] = mv[i * c + j] + rv[j];
    if (out.requires_grad()) {
        out.node()->backward_fn = [r, c](TensorNode& n) {
            TensorNode* pm = n.parents[0].get();
            TensorNode* pr = n.parents[1].get();
            if (pm->requires_grad) {
                pm->ensure_grad();
                for (std::size_t i = 0; i < n.grad.size(); ++i) pm->grad[i] += n.grad[i];
            }
            if (pr->requires_grad) {
                pr->ensure_grad();
                for (int i = 0; i < r; ++i)
                    for (int j = 0; j < c; ++j) pr->grad[j] += n.grad[i * c + j];
            }
        };
    }
    return out;
}

Tensor add_scalar(const Tensor& m, const Tensor& s) {
    if (s.size() != 1) throw ShapeError("add_scalar: addend must have size 1");
    Tensor out = make_out(m.shape(), "add_scalar", {m, s}, any_grad(m, s));
    const auto& mv = m.data();
    const double sv = s.data()[0];
    auto& ov = out.data();
    for (std::size_t i = 0; i < ov.size(); ++i) ov[i] = mv[i] + sv;
    if (out.requires_grad()) {
        out.node()->backward_fn = [](TensorNode& n) {
            TensorNode* pm = n.parents[0].get();
            TensorNode* ps = n.parents[1].get();
            if (pm->requires_grad) {
                pm->ensure_grad();
                for (std::size_t i = 0; i < n.grad.size(); ++i) pm->grad[i] += n.grad[i];
            }
            if (ps->requires_grad) {
                ps->ensure_grad();
                double acc = 0.0;
                for (double g : n.grad) acc += g;
                ps->grad[0] += acc;
            }
        };
    }
    return out;
}

Tensor outer_sum(const Tensor& col, const Tensor& row) {
    check_rank2(col, "outer_sum");
    check_rank2(row, "outer_sum");
    if (col.cols() != 1 || row.rows() != 1)
        throw ShapeError("outer_sum: expected [r x 1] and [1 x c], got " +
                         detail::shape_str(col.shape()) + " and " + detail::shape_str(row.shape()));
    const int r = col.rows(), c = row.cols();
    Tensor out = make_out({r, c}, "outer_sum", {col, row}, any_grad(col, row));
    const auto& cv = col.data();
    const auto& rv = row.data();
    auto& ov = out.data();
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) ov[i * c + j] = cv[i] + rv[j];
    if (out.requires_grad()) {
        out.node()->backward_fn = [r, c](TensorNode& n) {
            TensorNode* pc = n.parents[0].get();
            TensorNode* pr = n.parents[1].get();
            if (pc->requires_grad) {
                pc->ensure_grad();
                for (int i = 0; i < r; ++i) {
                    double acc = 0.0;
                    for (int j = 0; j < c; ++j) acc += n.grad[i * c + j];
                    pc->grad[i] += acc;
                }
            }
            if (pr->requires_grad) {
                pr->ensure_grad();
                for (int i = 0; i < r; ++i)
                    for (int j = 0; j < c; ++j) pr->grad[j] += n.grad[i * c + j];
            }
        };
    }
    return out;
}

Tensor matmul(const Tensor& a, const Tensor& b) {
    check_rank2(a, "matmul");
    check_rank2(b, "matmul");
    if (a.cols() != b.rows())
        throw ShapeError("matmul: inner extents differ, " + detail::shape_str(a.shape()) + " * " +
                         detail::shape_str(b.shape()));
    const int m = a.rows(), k = a.cols(), n = b.cols();
    Tensor out = make_out({m, n}, "matmul", {a, b}, any_grad(a, b));
    if (m > 0 && n > 0 && k > 0) {
        ensure_blas_single_threaded();
        cblas_dgemm(CblasRowMajor, CblasNoTrans, CblasNoTrans, m, n, k, 1.0, a.data().data(), k,
                    b.data().data(), n, 0.0, out.data().data(), n);
    }
    if (out.requires_grad()) {
        out.node()->backward_fn = [m, k, n](TensorNode& node) {
            if (m == 0 || n == 0 || k == 0) return;
            TensorNode* pa = node.parents[0].get();
            TensorNode* pb = node.parents[1].get();
            if (pa->requires_grad) {
                pa->ensure_grad();
                // dA += dC * B^T : [m x n] * [n x k]
                dgemm_acc(CblasNoTrans, CblasTrans, m, k, n, node.grad.data(), n, pb->data.data(),
                          n, pa->grad.data(), k);
            }
            if (pb->requires_grad) {
                pb->ensure_grad();
                // dB += A^T * dC : [k x m] * [m x n]
                dgemm_acc(CblasTrans, CblasNoTrans, k, n, m, pa->data.data(), k, node.grad.data(),
                          n, pb->grad.data(), n);
            }
        };
    }
    return out;
}

Tensor transpose(const Tensor& a) {
    check_rank2(a, "transpose");
    const int r = a.rows(), c = a.cols();
    Tensor out = make_out({c, r}, "transpose", {a}, any_grad(a));
    const auto& av = a.data();
    auto& ov = out.data();
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) ov[j * r + i] = av[i * c + j];
    if (out.requires_grad()) {
        out.node()->backward_fn = [r, c](TensorNode& n) {
            TensorNode* pa = n.parents[0].get();
            if (!pa->requires_grad) return;
            pa->ensure_grad();
            for (int i = 0; i < r; ++i)
                for (int j = 0; j < c; ++j) pa->grad[i * c + j] += n.grad[j * r + i];
        };
    }
    return out;
}

namespace {

template <typename Fwd, typename Dydx>
Tensor unary_elementwise(const Tensor& a, const char* op, Fwd fwd, Dydx dydx) {
    Tensor out = make_out(a.shape(), op, {a}, a.requires_grad());
    const auto& av = a.data();
    auto& ov = out.data();
    for (std::size_t i = 0; i < ov.size(); ++i) ov[i] = fwd(av[i]);
    if (out.requires_grad()) {
        out.node()->backward_fn = [dydx](TensorNode& n) {
            TensorNode* pa = n.parents[0].get();
            if (!pa->requires_grad) return;
            pa->ensure_grad();
            for (std::size_t i = 0; i < n.grad.size(); ++i)
                pa->grad[i] += n.grad[i] * dydx(pa->data[i], n.data[i]);
        };
    }
    return out;
}

} // namespace

Tensor tanh(const Tensor& a) {
    return unary_elementwise(
        a, "tanh", [](double x) { return std::tanh(x); },
        [](double, double y) { return 1.0 - y * y; });
}

Tensor sigmoid(const Tensor& a) {
    return unary_elementwise(
        a, "sigmoid",
        [](double x) { return x >= 0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x)); },
        [](double, double y) { return y * (1.0 - y); });
}

Tensor relu(const Tensor& a) {
    return unary_elementwise(
        a, "relu", [](double x) { return x > 0 ? x : 0.0; },
        [](double x, double) { return x > 0 ? 1.0 : 0.0; });
}

Tensor concat_rows(const std::vector<Tensor>& parts) {
    if (parts.empty()) throw ShapeError("concat_rows: no parts");
    int cols = -1, total = 0;
    bool grad = false;
    for (const Tensor& p : parts) {
        check_rank2(p, "concat_rows");
        if (cols < 0) cols = p.cols();
        if (p.cols() != cols)
            throw ShapeError("concat_rows: column mismatch " + detail::shape_str(p.shape()));
        total += p.rows();
        grad = grad || p.requires_grad();
    }
    auto node = detail::make_node({total, cols}, "concat_rows");
    node->requires_grad = grad;
    std::size_t off = 0;
    for (const Tensor& p : parts) {
        std::copy(p.data().begin(), p.data().end(), node->data.begin() + off);
        off += p.size();
        if (grad) node->parents.push_back(p.node_ptr());
    }
    if (grad) {
        node->backward_fn = [](TensorNode& n) {
            std::size_t off2 = 0;
            for (auto& pp : n.parents) {
                TensorNode* p = pp.get();
                if (p->requires_grad) {
                    p->ensure_grad();
                    for (std::size_t i = 0; i < p->data.size(); ++i) p->grad[i] += n.grad[off2 + i];
                }
                off2 += p->data.size();
            }
        };
    }
    return Tensor(std::move(node));
}

Tensor concat_cols(const std::vector<Tensor>& parts) {
    if (parts.empty()) throw ShapeError("concat_cols: no parts");
    int rows = -1, total = 0;
    bool grad = false;
    for (const Tensor& p : parts) {
        check_rank2(p, "concat_cols");
        if (rows < 0) rows = p.rows();
        if (p.rows() != rows)
            throw ShapeError("concat_cols: row mismatch " + detail::shape_str(p.shape()));
        total += p.cols();
        grad = grad || p.requires_grad();
    }
    auto node = detail::make_node({rows, total}, "concat_cols");
    node->requires_grad = grad;
    int col_off = 0;
    for (const Tensor& p : parts) {
        const int pc = p.cols();
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < pc; ++j)
                node->data[static_cast<std::size_t>(i) * total + col_off + j] = p.at(i, j);
        col_off += pc;
        if (grad) node->parents.push_back(p.node_ptr());
    }
    if (grad) {
        node->backward_fn = [rows, total](TensorNode& n) {
            int off2 = 0;
            for (auto& pp : n.parents) {
                TensorNode* p = pp.get();
                const int pc = p->shape[1];
                if (p->requires_grad) {
                    p->ensure_grad();
                    for (int i = 0; i < rows; ++i)
                        for (int j = 0; j < pc; ++j)
                            p->grad[static_cast<std::size_t>(i) * pc + j] +=
                                n.grad[static_cast<std::size_t>(i) * total + off2 + j];
                }
                off2 += pc;
            }
        };
    }
    return Tensor(std::move(node));
}

Tensor slice_rows(const Tensor& a, int start, int count) {
    check_rank2(a, "slice_rows");
    if (start < 0 || count < 0 || start + count > a.rows())
        throw ShapeError("slice_rows: range [" + std::to_string(start) + ", " +
                         std::to_string(start + count) + ") outside " +
                         detail::shape_str(a.shape()));
    const int c = a.cols();
    Tensor out = make_out({count, c}, "slice_rows", {a}, a.requires_grad());
    const auto& av = a.data();
    auto& ov = out.data();
    std::copy(av.begin() + static_cast<std::size_t>(start) * c,
              av.begin() + static_cast<std::size_t>(start + count) * c, ov.begin());
    if (out.requires_grad()) {
        out.node()->backward_fn = [start, c](TensorNode& n) {
            TensorNode* pa = n.parents[0].get();
            if (!pa->requires_grad) return;
            pa->ensure_grad();
            const std::size_t off = static_cast<std::size_t>(start) * c;
            for (std::size_t i = 0; i < n.grad.size(); ++i) pa->grad[off + i] += n.grad[i];
        };
    }
    return out;
}

Tensor slice_cols(const Tensor& a, int start, int count) {
    check_rank2(a, "slice_cols");
    if (start < 0 || count < 0 || start + count > a.cols())
        throw ShapeError("slice_cols: range [" + std::to_string(start) + ", " +
                         std::to_string(start + count) + ") outside " +
                         detail::shape_str(a.shape()));
    const int r = a.rows(), c = a.cols();
    Tensor out = make_out({r, count}, "slice_cols", {a}, a.requires_grad());
    const auto& av = a.data();
    auto& ov = out.data();
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < count; ++j)
            ov[static_cast<std::size_t>(i) * count + j] =
                av[static_cast<std::size_t>(i) * c + start + j];
    if (out.requires_grad()) {
        out.node()->backward_fn = [r, c, start, count](TensorNode& n) {
            TensorNode* pa = n.parents[0].get();
            if (!pa->requires_grad) return;
            pa->ensure_grad();
            for (int i = 0; i < r; ++i)
                for (int j = 0; j < count; ++j)
                    pa->grad[static_cast<std::size_t>(i) * c + start + j] +=
                        n.grad[static_cast<std::size_t>(i) * count + j];
        };
    }
    return out;
}

Tensor mask_rows(const Tensor& a, const Mask& mask) {
    check_rank2(a, "mask_rows");
    if (static_cast<int>(mask.size()) != a.rows())
        throw ShapeError("mask_rows: mask length " + std::to_string(mask.size()) +
                         " does not match rows of " + detail::shape_str(a.shape()));
    const int r = a.rows(), c = a.cols();
    Tensor out = make_out({r, c}, "mask_rows", {a}, a.requires_grad());
    const auto& av = a.data();
    auto& ov = out.data();
    for (int i = 0; i < r; ++i) {
        if (!mask[i]) continue;
        std::copy(av.begin() + static_cast<std::size_t>(i) * c,
                  av.begin() + static_cast<std::size_t>(i + 1) * c,
                  ov.begin() + static_cast<std::size_t>(i) * c);
    }
    if (out.requires_grad()) {
        Mask m = mask;
        out.node()->backward_fn = [m = std::move(m), r, c](TensorNode& n) {
            TensorNode* pa = n.parents[0].get();
            if (!pa->requires_grad) return;
            pa->ensure_grad();
            for (int i = 0; i < r; ++i) {
                if (!m[i]) continue;
                for (int j = 0; j < c; ++j)
                    pa->grad[static_cast<std::size_t>(i) * c + j] +=
                        n.grad[static_cast<std::size_t>(i) * c + j];
            }
        };
    }
    return out;
}

Tensor masked_mean_rows(const Tensor& a, const Mask& mask) {
    check_rank2(a, "masked_mean_rows");
    if (static_cast<int>(mask.size()) != a.rows())
        throw ShapeError("masked_mean_rows: mask length " + std::to_string(mask.size()) +
                         " does not match rows of " + detail::shape_str(a.shape()));
    const int r = a.rows(), c = a.cols();
    const int cnt = mask_count(mask);
    if (cnt == 0) {
        // degenerate input pools to the zero vector; no gradient flows
        return Tensor::zeros({1, c});
    }
    Tensor out = make_out({1, c}, "masked_mean_rows", {a}, a.requires_grad());
    const auto& av = a.data();
    auto& ov = out.data();
    // sorted accumulation per column: bit-identical under row permutation
    std::vector<double> addends;
    addends.reserve(cnt);
    for (int j = 0; j < c; ++j) {
        addends.clear();
        for (int i = 0; i < r; ++i)
            if (mask[i]) addends.push_back(av[static_cast<std::size_t>(i) * c + j]);
        std::sort(addends.begin(), addends.end());
        double acc = 0.0;
        for (double v : addends) acc += v;
        ov[j] = acc / cnt;
    }
    if (out.requires_grad()) {
        Mask m = mask;
        out.node()->backward_fn = [m = std::move(m), r, c, cnt](TensorNode& n) {
            TensorNode* pa = n.parents[0].get();
            if (!pa->requires_grad) return;
            pa->ensure_grad();
            for (int i = 0; i < r; ++i) {
                if (!m[i]) continue;
                for (int j = 0; j < c; ++j)
                    pa->grad[static_cast<std::size_t>(i) * c + j] += n.grad[j] / cnt;
            }
        };
    }
    return out;
}

Tensor masked_softmax(const Tensor& x, int axis, const Mask* mask) {
    check_rank2(x, "masked_softmax");
    if (axis != 0 && axis != 1) throw ShapeError("masked_softmax: axis must be 0 or 1");
    const int r = x.rows(), c = x.cols();
    const int axis_len = axis == 1 ? c : r;
    const int slices = axis == 1 ? r : c;
    if (mask && static_cast<int>(mask->size()) != axis_len)
        throw ShapeError("masked_softmax: mask length " + std::to_string(mask->size()) +
                         " does not match axis extent " + std::to_string(axis_len));
    int unmasked = axis_len;
    if (mask) unmasked = mask_count(*mask);
    if (unmasked == 0)
        throw DegenerateMaskError("masked_softmax: every slot along the axis is masked");

    Tensor out = make_out({r, c}, "masked_softmax", {x}, x.requires_grad());
    const auto& xv = x.data();
    auto& ov = out.data();
    auto idx = [&](int s, int t) {
        // s indexes the slice, t the position along the softmax axis
        return axis == 1 ? static_cast<std::size_t>(s) * c + t
                         : static_cast<std::size_t>(t) * c + s;
    };
    for (int s = 0; s < slices; ++s) {
        double mx = -std::numeric_limits<double>::infinity();
        for (int t = 0; t < axis_len; ++t) {
            if (mask && !(*mask)[t]) continue;
            mx = std::max(mx, xv[idx(s, t)]);
        }
        double z = 0.0;
        for (int t = 0; t < axis_len; ++t) {
            if (mask && !(*mask)[t]) {
                ov[idx(s, t)] = 0.0;
                continue;
            }
            const double e = std::exp(xv[idx(s, t)] - mx);
            ov[idx(s, t)] = e;
            z += e;
        }
        for (int t = 0; t < axis_len; ++t) {
            if (mask && !(*mask)[t]) continue;
            ov[idx(s, t)] /= z;
        }
    }
    if (out.requires_grad()) {
        Mask m = mask ? *mask : Mask{};
        out.node()->backward_fn = [m = std::move(m), axis, r, c, axis_len,
                                   slices](TensorNode& n) {
            TensorNode* pa = n.parents[0].get();
            if (!pa->requires_grad) return;
            pa->ensure_grad();
            auto idx2 = [&](int s, int t) {
                return axis == 1 ? static_cast<std::size_t>(s) * c + t
                                 : static_cast<std::size_t>(t) * c + s;
            };
            for (int s = 0; s < slices; ++s) {
                double dot = 0.0;
                for (int t = 0; t < axis_len; ++t) {
                    if (!m.empty() && !m[t]) continue;
                    dot += n.grad[idx2(s, t)] * n.data[idx2(s, t)];
                }
                for (int t = 0; t < axis_len; ++t) {
                    if (!m.empty() && !m[t]) continue;
                    pa->grad[idx2(s, t)] += n.data[idx2(s, t)] * (n.grad[idx2(s, t)] - dot);
                }
            }
        };
    }
    if (g_softmax_observer) g_softmax_observer(out, axis, mask);
    return out;
}

Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& bias, double eps) {
    check_rank2(x, "layer_norm");
    const int r = x.rows(), d = x.cols();
    if (gain.rank() != 2 || gain.rows() != 1 || gain.cols() != d)
        throw ShapeError("layer_norm: gain must be [1 x " + std::to_string(d) + "], got " +
                         detail::shape_str(gain.shape()));
    if (bias.rank() != 2 || bias.rows() != 1 || bias.cols() != d)
        throw ShapeError("layer_norm: bias must be [1 x " + std::to_string(d) + "], got " +
                         detail::shape_str(bias.shape()));
    bool grad = x.requires_grad() || gain.requires_grad() || bias.requires_grad();
    Tensor out = make_out({r, d}, "layer_norm", {x, gain, bias}, grad);
    const auto& xv = x.data();
    const auto& gv = gain.data();
    const auto& bv = bias.data();
    auto& ov = out.data();
    // stash per-row mean and inverse stddev for the backward pass
    auto stats = std::make_shared<std::vector<double>>(static_cast<std::size_t>(r) * 2);
    for (int i = 0; i < r; ++i) {
        const double* xr = &xv[static_cast<std::size_t>(i) * d];
        double mean = 0.0;
        for (int j = 0; j < d; ++j) mean += xr[j];
        mean /= d;
        double var = 0.0;
        for (int j = 0; j < d; ++j) var += (xr[j] - mean) * (xr[j] - mean);
        var /= d;
        const double inv = 1.0 / std::sqrt(var + eps);
        (*stats)[i * 2] = mean;
        (*stats)[i * 2 + 1] = inv;
        for (int j = 0; j < d; ++j)
            ov[static_cast<std::size_t>(i) * d + j] = gv[j] * (xr[j] - mean) * inv + bv[j];
    }
    if (grad) {
        out.node()->backward_fn = [stats, r, d](TensorNode& n) {
            TensorNode* px = n.parents[0].get();
            TensorNode* pg = n.parents[1].get();
            TensorNode* pb = n.parents[2].get();
            if (px->requires_grad) px->ensure_grad();
            if (pg->requires_grad) pg->ensure_grad();
            if (pb->requires_grad) pb->ensure_grad();
            for (int i = 0; i < r; ++i) {
                const double mean = (*stats)[i * 2];
                const double inv = (*stats)[i * 2 + 1];
                const double* xr = &px->data[static_cast<std::size_t>(i) * d];
                const double* gr = &n.grad[static_cast<std::size_t>(i) * d];
                if (pg->requires_grad || pb->requires_grad) {
                    for (int j = 0; j < d; ++j) {
                        const double xhat = (xr[j] - mean) * inv;
                        if (pg->requires_grad) pg->grad[j] += gr[j] * xhat;
                        if (pb->requires_grad) pb->grad[j] += gr[j];
                    }
                }
                if (px->requires_grad) {
                    // dxhat = g * gain; dx = inv * (dxhat - mean(dxhat) - xhat * mean(dxhat*xhat))
                    double sum_dxhat = 0.0, sum_dxhat_xhat = 0.0;
                    for (int j = 0; j < d; ++j) {
                        const double xhat = (xr[j] - mean) * inv;
                        const double dxhat = gr[j] * pg->data[j];
                        sum_dxhat += dxhat;
                        sum_dxhat_xhat += dxhat * xhat;
                    }
                    const double m1 = sum_dxhat / d;
                    const double m2 = sum_dxhat_xhat / d;
                    for (int j = 0; j < d; ++j) {
                        const double xhat = (xr[j] - mean) * inv;
                        const double dxhat = gr[j] * pg->data[j];
                        px->grad[static_cast<std::size_t>(i) * d + j] +=
                            inv * (dxhat - m1 - xhat * m2);
                    }
                }
            }
        };
    }
    return out;
}

Tensor cross_entropy(const Tensor& score, int gold) {
    if (gold < 0 || gold >= kClassCount)
        throw LabelError("cross_entropy: gold label " + std::to_string(gold) + " outside {0,1,2}");
    if (score.size() != static_cast<std::size_t>(kClassCount))
        throw ShapeError("cross_entropy: expected a 3-entry score vector, got " +
                         detail::shape_str(score.shape()));
    const auto& sv = score.data();
    double total = 0.0;
    for (double v : sv) {
        if (!(v > 0.0))
            throw ContractError("cross_entropy: score entries must be positive; got " +
                                std::to_string(v));
        total += v;
    }
    Tensor out = make_out({}, "cross_entropy", {score}, score.requires_grad());
    out.data()[0] = std::log(total) - std::log(sv[gold]);
    if (out.requires_grad()) {
        const double tot = total;
        out.node()->backward_fn = [gold, tot](TensorNode& n) {
            TensorNode* ps = n.parents[0].get();
            if (!ps->requires_grad) return;
            ps->ensure_grad();
            const double g = n.grad[0];
            for (int i = 0; i < kClassCount; ++i) {
                double d = 1.0 / tot;
                if (i == gold) d -= 1.0 / ps->data[i];
                ps->grad[i] += g * d;
            }
        };
    }
    return out;
}

Tensor affine(const Tensor& x, const Tensor& w, const Tensor& b) {
    return add_rows(matmul(x, w), b);
}

Tensor sum_all(const Tensor& a) {
    Tensor out = make_out({}, "sum_all", {a}, a.requires_grad());
    double acc = 0.0;
    for (double v : a.data()) acc += v;
    out.data()[0] = acc;
    if (out.requires_grad()) {
        out.node()->backward_fn = [](TensorNode& n) {
            TensorNode* pa = n.parents[0].get();
            if (!pa->requires_grad) return;
            pa->ensure_grad();
            const double g = n.grad[0];
            for (auto& gv : pa->grad) gv += g;
        };
    }
    return out;
}

} // namespace fashsent
