#pragma once

#include <map>
#include <string>
#include <vector>

#include "folio/ndcore/tensor.hpp"

namespace folio::nd {

using NodeId = int;
using TensorMap = std::map<std::string, Tensor>;
using GradMap = std::map<std::string, Tensor>;

enum class OpKind {
    Input,
    Param,
    Dense,
    Conv1d,
    Relu,
    Tanh,
    Softmax,
    Log,
    Abs,
    Add,
    Sub,
    Mul,
    Sum,
    Mean,
    Reshape,
    Softplus,
    BiasAt,
};

const char* op_name(OpKind k);

struct Node {
    OpKind kind;
    std::vector<NodeId> inputs;
    Shape shape;
    std::string name{};     // inputs, params and outputs carry names
    std::size_t aux_index = 0; // BiasAt target element
    double aux_value = 0.0;    // Softplus floor
};

// Static computation graph with reverse-mode differentiation. Nodes are
// appended in topological order at build time; forward/backward walk the
// node list. One Graph owns its parameter storage; copying a Graph deep-
// copies parameters (used for DDPG target networks).
class Graph {
public:
    NodeId input(const std::string& name, Shape shape);
    NodeId param(const std::string& name, Tensor init);

    // y = x W^T + b with x:(B,In), w:(Out,In), b:(Out) -> (B,Out)
    NodeId dense(NodeId x, NodeId w, NodeId b);
    // Same-padded stride-1 convolution over the trailing (time) axis.
    // x:(B,Ci,T), k:(Co,Ci,K) with K odd, b:(Co) -> (B,Co,T)
    NodeId conv1d(NodeId x, NodeId k, NodeId b);
    NodeId relu(NodeId x);
    NodeId tanh(NodeId x);
    // Row-wise softmax over the trailing axis, max-subtracted.
    NodeId softmax(NodeId x);
    NodeId log(NodeId x);
    NodeId abs(NodeId x);
    NodeId add(NodeId a, NodeId b);
    NodeId sub(NodeId a, NodeId b);
    NodeId mul(NodeId a, NodeId b);
    NodeId sum(NodeId x);
    NodeId mean(NodeId x);
    NodeId reshape(NodeId x, Shape target);
    // log(1+e^x) + floor; strictly positive for floor >= 0
    NodeId softplus(NodeId x, double floor = 0.0);
    // out = x except out[index] += p (p scalar); used for the cash bias
    NodeId bias_at(NodeId x, NodeId p, std::size_t index);

    void mark_output(const std::string& name, NodeId id);

    // --- execution ---
    void set_input(const std::string& name, const Tensor& value);
    void run();
    void forward(const TensorMap& inputs);

    const Tensor& value(NodeId id) const;
    const Tensor& output(const std::string& name) const;
    NodeId output_id(const std::string& name) const;

    // Seeds the named outputs with the given cotangents and propagates to
    // all parameters and inputs. Requires run() on this instance first.
    GradMap backward(const TensorMap& output_seeds);
    // Accumulates scale * gradient into acc (missing entries are created).
    void backward_into(const TensorMap& output_seeds, GradMap& acc, double scale = 1.0);
    const Tensor& input_grad(const std::string& name) const;

    // --- parameters ---
    Tensor& param_value(const std::string& name);
    const Tensor& param_value(const std::string& name) const;
    bool has_param(const std::string& name) const;
    const std::vector<std::string>& param_names() const { return param_order_; }
    std::size_t param_scalar_count() const;

    const std::vector<Node>& nodes() const { return nodes_; }

private:
    NodeId add_node(Node n);
    void check_built_input(NodeId id) const;
    void eval_node(NodeId id);
    void backprop_node(NodeId id);
    void run_backward();

    std::vector<Node> nodes_;
    std::vector<Tensor> values_;
    std::vector<Tensor> adjoints_;
    std::map<std::string, NodeId> inputs_;
    std::map<std::string, NodeId> params_;
    std::vector<std::string> param_order_;
    std::map<std::string, NodeId> outputs_;
    std::vector<bool> input_set_;
    bool ran_forward_ = false;
};

// Numerically stable softmax used where weights are formed outside a graph
// (exploration-perturbed logits, sampled PPO actions).
std::vector<double> stable_softmax(const std::vector<double>& logits);

} // namespace folio::nd
