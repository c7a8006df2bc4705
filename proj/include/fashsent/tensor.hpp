#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "fashsent/common.hpp"

namespace fashsent {

// Row mask used by attention and pooling; 1 = present, 0 = padded/absent.
using Mask = std::vector<std::uint8_t>;

inline bool mask_any(const Mask& m) {
    for (auto b : m)
        if (b) return true;
    return false;
}

inline int mask_count(const Mask& m) {
    int n = 0;
    for (auto b : m) n += b ? 1 : 0;
    return n;
}

struct TensorNode;

// Dense 64-bit real tensor with reverse-mode differentiation. A Tensor is a
// shared handle to its node; ops record parents and a backward closure on the
// output node (define-by-run). Values are treated as immutable once created;
// only parameter updates (optimizer) rewrite data in place, between graphs.
class Tensor {
public:
    Tensor() = default;

    static Tensor zeros(std::vector<int> shape, bool requires_grad = false);
    static Tensor full(std::vector<int> shape, double value, bool requires_grad = false);
    static Tensor from(std::vector<int> shape, std::vector<double> values, bool requires_grad = false);
    static Tensor scalar(double value, bool requires_grad = false);
    // [1 x n] row matrix
    static Tensor row(std::vector<double> values, bool requires_grad = false);

    bool defined() const { return node_ != nullptr; }
    const std::vector<int>& shape() const;
    int rank() const;
    int extent(int axis) const;
    // rank-2 accessors
    int rows() const;
    int cols() const;
    std::size_t size() const;

    double value() const; // size-1 tensors only
    double at(std::size_t i) const;
    double at(int r, int c) const;

    std::vector<double>& data();
    const std::vector<double>& data() const;

    bool requires_grad() const;
    // Gradient accumulated by backward(); zeros if none has been accumulated.
    const std::vector<double>& grad() const;
    std::vector<double>& grad_data();
    void zero_grad();

    // Reverse-mode sweep from this (size-1) tensor through every reachable
    // node. ContractError if the tensor is not a scalar.
    void backward() const;

    std::uint64_t id() const;
    const char* op() const;

    TensorNode* node() const { return node_.get(); }
    std::shared_ptr<TensorNode> node_ptr() const { return node_; }

    explicit Tensor(std::shared_ptr<TensorNode> node) : node_(std::move(node)) {}

private:
    std::shared_ptr<TensorNode> node_;
};

struct TensorNode {
    std::vector<int> shape;
    std::vector<double> data;
    std::vector<double> grad; // lazily allocated, same length as data
    bool requires_grad = false;
    const char* op = "leaf";
    std::uint64_t id = 0;
    std::vector<std::shared_ptr<TensorNode>> parents;
    // Reads this->grad, accumulates into parents' grads.
    std::function<void(TensorNode&)> backward_fn;

    std::size_t numel() const { return data.size(); }
    void ensure_grad() {
        if (grad.size() != data.size()) grad.assign(data.size(), 0.0);
    }
};

// Forward-op record of the graph reaching a tensor, in topological order
// (every node's inputs appear before it).
struct GraphNodeInfo {
    std::uint64_t id;
    const char* op;
    std::vector<std::uint64_t> inputs;
};

std::vector<GraphNodeInfo> graph_of(const Tensor& t);

namespace detail {
std::shared_ptr<TensorNode> make_node(std::vector<int> shape, const char* op);
std::string shape_str(const std::vector<int>& shape);
// flat extent product with overflow-free desk-scale assumption
std::size_t shape_numel(const std::vector<int>& shape);
} // namespace detail

} // namespace fashsent
