#include "fashsent/tensor.hpp"

#include <atomic>
#include <sstream>
#include <unordered_set>

namespace fashsent {

namespace {

std::atomic<std::uint64_t> g_next_id{1};

} // namespace

namespace detail {

std::size_t shape_numel(const std::vector<int>& shape) {
    std::size_t n = 1;
    for (int e : shape) {
        if (e < 0) throw ShapeError("negative extent in shape " + shape_str(shape));
        n *= static_cast<std::size_t>(e);
    }
    return n;
}

std::string shape_str(const std::vector<int>& shape) {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) os << 'x';
        os << shape[i];
    }
    os << ']';
    return os.str();
}

std::shared_ptr<TensorNode> make_node(std::vector<int> shape, const char* op) {
    auto node = std::make_shared<TensorNode>();
    node->data.assign(shape_numel(shape), 0.0);
    node->shape = std::move(shape);
    node->op = op;
    node->id = g_next_id.fetch_add(1, std::memory_order_relaxed);
    return node;
}

} // namespace detail

Tensor Tensor::zeros(std::vector<int> shape, bool requires_grad) {
    auto node = detail::make_node(std::move(shape), "leaf");
    node->requires_grad = requires_grad;
    return Tensor(std::move(node));
}

Tensor Tensor::full(std::vector<int> shape, double value, bool requires_grad) {
    Tensor t = zeros(std::move(shape), requires_grad);
    for (auto& v : t.data()) v = value;
    return t;
}

Tensor Tensor::from(std::vector<int> shape, std::vector<double> values, bool requires_grad) {
    if (values.size() != detail::shape_numel(shape))
        throw ShapeError("value count " + std::to_string(values.size()) +
                         " does not match shape " + detail::shape_str(shape));
    auto node = detail::make_node(std::move(shape), "leaf");
    node->data = std::move(values);
    node->requires_grad = requires_grad;
    return Tensor(std::move(node));
}

Tensor Tensor::scalar(double value, bool requires_grad) {
    return from({}, {value}, requires_grad);
}

Tensor Tensor::row(std::vector<double> values, bool requires_grad) {
    int n = static_cast<int>(values.size());
    return from({1, n}, std::move(values), requires_grad);
}

const std::vector<int>& Tensor::shape() const { return node_->shape; }
int Tensor::rank() const { return static_cast<int>(node_->shape.size()); }

int Tensor::extent(int axis) const {
    if (axis < 0 || axis >= rank()) throw ShapeError("axis out of range");
    return node_->shape[axis];
}

int Tensor::rows() const {
    if (rank() != 2) throw ShapeError("rows() on non-matrix " + detail::shape_str(shape()));
    return node_->shape[0];
}

int Tensor::cols() const {
    if (rank() != 2) throw ShapeError("cols() on non-matrix " + detail::shape_str(shape()));
    return node_->shape[1];
}

std::size_t Tensor::size() const { return node_->data.size(); }

double Tensor::value() const {
    if (size() != 1) throw ContractError("value() on tensor of size " + std::to_string(size()));
    return node_->data[0];
}

double Tensor::at(std::size_t i) const { return node_->data.at(i); }

double Tensor::at(int r, int c) const {
    return node_->data.at(static_cast<std::size_t>(r) * cols() + c);
}

std::vector<double>& Tensor::data() { return node_->data; }
const std::vector<double>& Tensor::data() const { return node_->data; }

bool Tensor::requires_grad() const { return node_->requires_grad; }

const std::vector<double>& Tensor::grad() const {
    node_->ensure_grad();
    return node_->grad;
}

std::vector<double>& Tensor::grad_data() {
    node_->ensure_grad();
    return node_->grad;
}

void Tensor::zero_grad() {
    if (!node_->grad.empty()) node_->grad.assign(node_->data.size(), 0.0);
}

std::uint64_t Tensor::id() const { return node_->id; }
const char* Tensor::op() const { return node_->op; }

namespace {

// Iterative post-order DFS; every node's parents precede it in `order`.
void topo_sort(TensorNode* root, std::vector<TensorNode*>& order) {
    std::unordered_set<TensorNode*> visited;
    std::vector<std::pair<TensorNode*, std::size_t>> stack;
    stack.emplace_back(root, 0);
    visited.insert(root);
    while (!stack.empty()) {
        auto& [node, next] = stack.back();
        if (next < node->parents.size()) {
            TensorNode* parent = node->parents[next].get();
            ++next;
            if (visited.insert(parent).second) stack.emplace_back(parent, 0);
        } else {
            order.push_back(node);
            stack.pop_back();
        }
    }
}

} // namespace

void Tensor::backward() const {
    if (!node_) throw ContractError("backward() on undefined tensor");
    if (size() != 1)
        throw ContractError("backward() requires a scalar loss; got shape " +
                            detail::shape_str(shape()));
    std::vector<TensorNode*> order;
    topo_sort(node_.get(), order);
    node_->ensure_grad();
    node_->grad[0] = 1.0;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        TensorNode* n = *it;
        if (n->backward_fn && n->requires_grad) {
            n->ensure_grad();
            n->backward_fn(*n);
        }
    }
}

std::vector<GraphNodeInfo> graph_of(const Tensor& t) {
    std::vector<TensorNode*> order;
    topo_sort(t.node(), order);
    std::vector<GraphNodeInfo> out;
    out.reserve(order.size());
    for (TensorNode* n : order) {
        GraphNodeInfo info;
        info.id = n->id;
        info.op = n->op;
        for (auto& p : n->parents) info.inputs.push_back(p->id);
        out.push_back(std::move(info));
    }
    return out;
}

} // namespace fashsent
