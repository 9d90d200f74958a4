#include "folio/ndcore/graph.hpp"

#include <algorithm>
#include <cmath>

#include "folio/ndcore/kernels.hpp"

namespace folio::nd {

namespace {
const kernels::KernelTable& K() { return kernels::active(); }

double sigmoid(double x) {
    return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}
} // namespace

const char* op_name(OpKind k) {
    switch (k) {
    case OpKind::Input: return "input";
    case OpKind::Param: return "param";
    case OpKind::Dense: return "dense";
    case OpKind::Conv1d: return "conv1d";
    case OpKind::Relu: return "relu";
    case OpKind::Tanh: return "tanh";
    case OpKind::Softmax: return "softmax";
    case OpKind::Log: return "log";
    case OpKind::Abs: return "abs";
    case OpKind::Add: return "add";
    case OpKind::Sub: return "sub";
    case OpKind::Mul: return "mul";
    case OpKind::Sum: return "sum";
    case OpKind::Mean: return "mean";
    case OpKind::Reshape: return "reshape";
    case OpKind::Softplus: return "softplus";
    case OpKind::BiasAt: return "bias_at";
    }
    return "?";
}

NodeId Graph::add_node(Node n) {
    const NodeId id = static_cast<NodeId>(nodes_.size());
    values_.emplace_back(n.shape);
    adjoints_.emplace_back(n.shape);
    nodes_.push_back(std::move(n));
    return id;
}

void Graph::check_built_input(NodeId id) const {
    require(id >= 0 && id < static_cast<NodeId>(nodes_.size()),
            "graph: node id ", id, " out of range");
}

NodeId Graph::input(const std::string& name, Shape shape) {
    require(!inputs_.count(name), "graph: duplicate input '", name, "'");
    require(shape_numel(shape) > 0, "graph: input '", name, "' has empty shape");
    Node n{OpKind::Input, {}, std::move(shape), name};
    const NodeId id = add_node(std::move(n));
    inputs_[name] = id;
    input_set_.resize(nodes_.size(), false);
    return id;
}

NodeId Graph::param(const std::string& name, Tensor init) {
    require(!params_.count(name), "graph: duplicate parameter '", name, "'");
    require(init.numel() > 0, "graph: parameter '", name, "' is empty");
    Node n{OpKind::Param, {}, init.shape, name};
    const NodeId id = add_node(std::move(n));
    values_[id] = std::move(init);
    params_[name] = id;
    param_order_.push_back(name);
    return id;
}

NodeId Graph::dense(NodeId x, NodeId w, NodeId b) {
    check_built_input(x);
    check_built_input(w);
    check_built_input(b);
    const Shape& xs = nodes_[x].shape;
    const Shape& ws = nodes_[w].shape;
    const Shape& bs = nodes_[b].shape;
    require(xs.size() == 2, "dense: expected rank-2 input, got ", shape_str(xs));
    require(ws.size() == 2 && ws[1] == xs[1], "dense: weight ", shape_str(ws),
            " incompatible with input ", shape_str(xs));
    require(bs.size() == 1 && bs[0] == ws[0], "dense: bias ", shape_str(bs),
            " incompatible with weight ", shape_str(ws));
    return add_node({OpKind::Dense, {x, w, b}, {xs[0], ws[0]}});
}

NodeId Graph::conv1d(NodeId x, NodeId k, NodeId b) {
    check_built_input(x);
    check_built_input(k);
    check_built_input(b);
    const Shape& xs = nodes_[x].shape;
    const Shape& ks = nodes_[k].shape;
    const Shape& bs = nodes_[b].shape;
    require(xs.size() == 3, "conv1d: expected rank-3 input, got ", shape_str(xs));
    require(ks.size() == 3 && ks[1] == xs[1], "conv1d: kernel ", shape_str(ks),
            " incompatible with input ", shape_str(xs));
    require(ks[2] % 2 == 1, "conv1d: kernel width must be odd, got ", ks[2]);
    require(bs.size() == 1 && bs[0] == ks[0], "conv1d: bias ", shape_str(bs),
            " incompatible with kernel ", shape_str(ks));
    return add_node({OpKind::Conv1d, {x, k, b}, {xs[0], ks[0], xs[2]}});
}

NodeId Graph::relu(NodeId x) {
    check_built_input(x);
    return add_node({OpKind::Relu, {x}, nodes_[x].shape});
}

NodeId Graph::tanh(NodeId x) {
    check_built_input(x);
    return add_node({OpKind::Tanh, {x}, nodes_[x].shape});
}

NodeId Graph::softmax(NodeId x) {
    check_built_input(x);
    require(!nodes_[x].shape.empty(), "softmax: scalar input");
    return add_node({OpKind::Softmax, {x}, nodes_[x].shape});
}

NodeId Graph::log(NodeId x) {
    check_built_input(x);
    return add_node({OpKind::Log, {x}, nodes_[x].shape});
}

NodeId Graph::abs(NodeId x) {
    check_built_input(x);
    return add_node({OpKind::Abs, {x}, nodes_[x].shape});
}

NodeId Graph::add(NodeId a, NodeId b) {
    check_built_input(a);
    check_built_input(b);
    require(nodes_[a].shape == nodes_[b].shape, "add: shape mismatch ",
            shape_str(nodes_[a].shape), " vs ", shape_str(nodes_[b].shape));
    return add_node({OpKind::Add, {a, b}, nodes_[a].shape});
}

NodeId Graph::sub(NodeId a, NodeId b) {
    check_built_input(a);
    check_built_input(b);
    require(nodes_[a].shape == nodes_[b].shape, "sub: shape mismatch ",
            shape_str(nodes_[a].shape), " vs ", shape_str(nodes_[b].shape));
    return add_node({OpKind::Sub, {a, b}, nodes_[a].shape});
}

NodeId Graph::mul(NodeId a, NodeId b) {
    check_built_input(a);
    check_built_input(b);
    require(nodes_[a].shape == nodes_[b].shape, "mul: shape mismatch ",
            shape_str(nodes_[a].shape), " vs ", shape_str(nodes_[b].shape));
    return add_node({OpKind::Mul, {a, b}, nodes_[a].shape});
}

NodeId Graph::sum(NodeId x) {
    check_built_input(x);
    return add_node({OpKind::Sum, {x}, {1}});
}

NodeId Graph::mean(NodeId x) {
    check_built_input(x);
    return add_node({OpKind::Mean, {x}, {1}});
}

NodeId Graph::reshape(NodeId x, Shape target) {
    check_built_input(x);
    require(shape_numel(target) == shape_numel(nodes_[x].shape),
            "reshape: element count mismatch ", shape_str(nodes_[x].shape), " -> ",
            shape_str(target));
    return add_node({OpKind::Reshape, {x}, std::move(target)});
}

NodeId Graph::softplus(NodeId x, double floor) {
    check_built_input(x);
    require(floor >= 0.0, "softplus: negative floor");
    Node n{OpKind::Softplus, {x}, nodes_[x].shape};
    n.aux_value = floor;
    return add_node(std::move(n));
}

NodeId Graph::bias_at(NodeId x, NodeId p, std::size_t index) {
    check_built_input(x);
    check_built_input(p);
    require(nodes_[p].shape == Shape{1}, "bias_at: bias parameter must be scalar");
    require(index < shape_numel(nodes_[x].shape), "bias_at: index ", index,
            " out of range for ", shape_str(nodes_[x].shape));
    Node n{OpKind::BiasAt, {x, p}, nodes_[x].shape};
    n.aux_index = index;
    return add_node(std::move(n));
}

void Graph::mark_output(const std::string& name, NodeId id) {
    check_built_input(id);
    require(!outputs_.count(name), "graph: duplicate output '", name, "'");
    outputs_[name] = id;
}

void Graph::set_input(const std::string& name, const Tensor& value) {
    auto it = inputs_.find(name);
    require(it != inputs_.end(), "graph: unknown input '", name, "'");
    const NodeId id = it->second;
    require(value.shape == nodes_[id].shape, "graph: input '", name, "' expects shape ",
            shape_str(nodes_[id].shape), ", got ", shape_str(value.shape));
    values_[id].data = value.data;
    input_set_[id] = true;
}

void Graph::run() {
    for (const auto& [name, id] : inputs_)
        require(input_set_[id], "graph: input '", name, "' not set before run");
    for (NodeId id = 0; id < static_cast<NodeId>(nodes_.size()); ++id) eval_node(id);
    ran_forward_ = true;
}

void Graph::forward(const TensorMap& inputs) {
    for (const auto& [name, t] : inputs) set_input(name, t);
    run();
}

const Tensor& Graph::value(NodeId id) const {
    check_built_input(id);
    return values_[id];
}

NodeId Graph::output_id(const std::string& name) const {
    auto it = outputs_.find(name);
    require(it != outputs_.end(), "graph: unknown output '", name, "'");
    return it->second;
}

const Tensor& Graph::output(const std::string& name) const {
    require(ran_forward_, "graph: output requested before forward");
    return values_[output_id(name)];
}

void Graph::eval_node(NodeId id) {
    Node& n = nodes_[id];
    Tensor& out = values_[id];
    const std::size_t cnt = out.numel();
    switch (n.kind) {
    case OpKind::Input:
    case OpKind::Param:
        break;
    case OpKind::Dense: {
        const Tensor& x = values_[n.inputs[0]];
        const Tensor& w = values_[n.inputs[1]];
        const Tensor& b = values_[n.inputs[2]];
        const std::size_t B = x.shape[0], in = x.shape[1], outdim = w.shape[0];
        for (std::size_t r = 0; r < B; ++r)
            for (std::size_t o = 0; o < outdim; ++o)
                out.data[r * outdim + o] =
                    K().dot(&x.data[r * in], &w.data[o * in], in) + b.data[o];
        break;
    }
    case OpKind::Conv1d: {
        const Tensor& x = values_[n.inputs[0]];
        const Tensor& k = values_[n.inputs[1]];
        const Tensor& b = values_[n.inputs[2]];
        const std::size_t B = x.shape[0], ci = x.shape[1], T = x.shape[2];
        const std::size_t co = k.shape[0], kw = k.shape[2];
        const long pad = static_cast<long>(kw - 1) / 2;
        for (std::size_t batch = 0; batch < B; ++batch)
            for (std::size_t oc = 0; oc < co; ++oc) {
                double* yrow = &out.data[(batch * co + oc) * T];
                std::fill(yrow, yrow + T, b.data[oc]);
                for (std::size_t ic = 0; ic < ci; ++ic) {
                    const double* xrow = &x.data[(batch * ci + ic) * T];
                    for (std::size_t u = 0; u < kw; ++u) {
                        const long s = static_cast<long>(u) - pad;
                        const long t0 = std::max(0L, -s);
                        const long t1 = std::min(static_cast<long>(T),
                                                 static_cast<long>(T) - s);
                        if (t1 <= t0) continue;
                        K().axpy(k.data[(oc * ci + ic) * kw + u], xrow + t0 + s,
                                 yrow + t0, static_cast<std::size_t>(t1 - t0));
                    }
                }
            }
        break;
    }
    case OpKind::Relu:
        K().relu(values_[n.inputs[0]].data.data(), out.data.data(), cnt);
        break;
    case OpKind::Tanh: {
        const Tensor& x = values_[n.inputs[0]];
        for (std::size_t i = 0; i < cnt; ++i) out.data[i] = std::tanh(x.data[i]);
        break;
    }
    case OpKind::Softmax: {
        const Tensor& x = values_[n.inputs[0]];
        const std::size_t width = n.shape.back();
        const std::size_t rows = cnt / width;
        for (std::size_t r = 0; r < rows; ++r) {
            const double* xr = &x.data[r * width];
            double* yr = &out.data[r * width];
            const double mx = *std::max_element(xr, xr + width);
            double denom = 0.0;
            for (std::size_t i = 0; i < width; ++i) {
                yr[i] = std::exp(xr[i] - mx);
                denom += yr[i];
            }
            for (std::size_t i = 0; i < width; ++i) yr[i] /= denom;
        }
        break;
    }
    case OpKind::Log: {
        const Tensor& x = values_[n.inputs[0]];
        for (std::size_t i = 0; i < cnt; ++i) out.data[i] = std::log(x.data[i]);
        break;
    }
    case OpKind::Abs: {
        const Tensor& x = values_[n.inputs[0]];
        for (std::size_t i = 0; i < cnt; ++i) out.data[i] = std::fabs(x.data[i]);
        break;
    }
    case OpKind::Add:
        K().add(values_[n.inputs[0]].data.data(), values_[n.inputs[1]].data.data(),
                out.data.data(), cnt);
        break;
    case OpKind::Sub:
        K().sub(values_[n.inputs[0]].data.data(), values_[n.inputs[1]].data.data(),
                out.data.data(), cnt);
        break;
    case OpKind::Mul:
        K().mul(values_[n.inputs[0]].data.data(), values_[n.inputs[1]].data.data(),
                out.data.data(), cnt);
        break;
    case OpKind::Sum: {
        const Tensor& x = values_[n.inputs[0]];
        out.data[0] = K().sum(x.data.data(), x.numel());
        break;
    }
    case OpKind::Mean: {
        const Tensor& x = values_[n.inputs[0]];
        out.data[0] = K().sum(x.data.data(), x.numel()) / static_cast<double>(x.numel());
        break;
    }
    case OpKind::Reshape:
        out.data = values_[n.inputs[0]].data;
        break;
    case OpKind::Softplus: {
        const Tensor& x = values_[n.inputs[0]];
        for (std::size_t i = 0; i < cnt; ++i) {
            const double v = x.data[i];
            const double sp = v > 0.0 ? v + std::log1p(std::exp(-v)) : std::log1p(std::exp(v));
            out.data[i] = sp + n.aux_value;
        }
        break;
    }
    case OpKind::BiasAt: {
        const Tensor& x = values_[n.inputs[0]];
        out.data = x.data;
        out.data[n.aux_index] += values_[n.inputs[1]].data[0];
        break;
    }
    }
}

void Graph::backprop_node(NodeId id) {
    const Node& n = nodes_[id];
    const Tensor& dy = adjoints_[id];
    const std::size_t cnt = dy.numel();
    switch (n.kind) {
    case OpKind::Input:
    case OpKind::Param:
        break;
    case OpKind::Dense: {
        const Tensor& x = values_[n.inputs[0]];
        const Tensor& w = values_[n.inputs[1]];
        Tensor& dx = adjoints_[n.inputs[0]];
        Tensor& dw = adjoints_[n.inputs[1]];
        Tensor& db = adjoints_[n.inputs[2]];
        const std::size_t B = x.shape[0], in = x.shape[1], outdim = w.shape[0];
        for (std::size_t r = 0; r < B; ++r)
            for (std::size_t o = 0; o < outdim; ++o) {
                const double g = dy.data[r * outdim + o];
                if (g == 0.0) continue;
                K().axpy(g, &w.data[o * in], &dx.data[r * in], in);
                K().axpy(g, &x.data[r * in], &dw.data[o * in], in);
                db.data[o] += g;
            }
        break;
    }
    case OpKind::Conv1d: {
        const Tensor& x = values_[n.inputs[0]];
        const Tensor& k = values_[n.inputs[1]];
        Tensor& dx = adjoints_[n.inputs[0]];
        Tensor& dk = adjoints_[n.inputs[1]];
        Tensor& db = adjoints_[n.inputs[2]];
        const std::size_t B = x.shape[0], ci = x.shape[1], T = x.shape[2];
        const std::size_t co = k.shape[0], kw = k.shape[2];
        const long pad = static_cast<long>(kw - 1) / 2;
        for (std::size_t batch = 0; batch < B; ++batch)
            for (std::size_t oc = 0; oc < co; ++oc) {
                const double* dyrow = &dy.data[(batch * co + oc) * T];
                db.data[oc] += K().sum(dyrow, T);
                for (std::size_t ic = 0; ic < ci; ++ic) {
                    const double* xrow = &x.data[(batch * ci + ic) * T];
                    double* dxrow = &dx.data[(batch * ci + ic) * T];
                    for (std::size_t u = 0; u < kw; ++u) {
                        const long s = static_cast<long>(u) - pad;
                        const long t0 = std::max(0L, -s);
                        const long t1 = std::min(static_cast<long>(T),
                                                 static_cast<long>(T) - s);
                        if (t1 <= t0) continue;
                        const std::size_t len = static_cast<std::size_t>(t1 - t0);
                        K().axpy(k.data[(oc * ci + ic) * kw + u], dyrow + t0,
                                 dxrow + t0 + s, len);
                        dk.data[(oc * ci + ic) * kw + u] +=
                            K().dot(dyrow + t0, xrow + t0 + s, len);
                    }
                }
            }
        break;
    }
    case OpKind::Relu:
        K().relu_backward(values_[n.inputs[0]].data.data(), dy.data.data(),
                          adjoints_[n.inputs[0]].data.data(), cnt);
        break;
    case OpKind::Tanh: {
        const Tensor& y = values_[id];
        Tensor& dx = adjoints_[n.inputs[0]];
        for (std::size_t i = 0; i < cnt; ++i)
            dx.data[i] += dy.data[i] * (1.0 - y.data[i] * y.data[i]);
        break;
    }
    case OpKind::Softmax: {
        const Tensor& y = values_[id];
        Tensor& dx = adjoints_[n.inputs[0]];
        const std::size_t width = n.shape.back();
        const std::size_t rows = cnt / width;
        for (std::size_t r = 0; r < rows; ++r) {
            const double* yr = &y.data[r * width];
            const double* dyr = &dy.data[r * width];
            double inner = 0.0;
            for (std::size_t i = 0; i < width; ++i) inner += dyr[i] * yr[i];
            double* dxr = &dx.data[r * width];
            for (std::size_t i = 0; i < width; ++i) dxr[i] += yr[i] * (dyr[i] - inner);
        }
        break;
    }
    case OpKind::Log: {
        const Tensor& x = values_[n.inputs[0]];
        Tensor& dx = adjoints_[n.inputs[0]];
        for (std::size_t i = 0; i < cnt; ++i) dx.data[i] += dy.data[i] / x.data[i];
        break;
    }
    case OpKind::Abs: {
        const Tensor& x = values_[n.inputs[0]];
        Tensor& dx = adjoints_[n.inputs[0]];
        for (std::size_t i = 0; i < cnt; ++i) {
            if (x.data[i] > 0.0) dx.data[i] += dy.data[i];
            else if (x.data[i] < 0.0) dx.data[i] -= dy.data[i];
        }
        break;
    }
    case OpKind::Add:
        K().axpy(1.0, dy.data.data(), adjoints_[n.inputs[0]].data.data(), cnt);
        K().axpy(1.0, dy.data.data(), adjoints_[n.inputs[1]].data.data(), cnt);
        break;
    case OpKind::Sub:
        K().axpy(1.0, dy.data.data(), adjoints_[n.inputs[0]].data.data(), cnt);
        K().axpy(-1.0, dy.data.data(), adjoints_[n.inputs[1]].data.data(), cnt);
        break;
    case OpKind::Mul: {
        const Tensor& a = values_[n.inputs[0]];
        const Tensor& b = values_[n.inputs[1]];
        Tensor& da = adjoints_[n.inputs[0]];
        Tensor& db = adjoints_[n.inputs[1]];
        for (std::size_t i = 0; i < cnt; ++i) {
            da.data[i] += dy.data[i] * b.data[i];
            db.data[i] += dy.data[i] * a.data[i];
        }
        break;
    }
    case OpKind::Sum: {
        Tensor& dx = adjoints_[n.inputs[0]];
        const double g = dy.data[0];
        for (std::size_t i = 0; i < dx.numel(); ++i) dx.data[i] += g;
        break;
    }
    case OpKind::Mean: {
        Tensor& dx = adjoints_[n.inputs[0]];
        const double g = dy.data[0] / static_cast<double>(dx.numel());
        for (std::size_t i = 0; i < dx.numel(); ++i) dx.data[i] += g;
        break;
    }
    case OpKind::Reshape:
        K().axpy(1.0, dy.data.data(), adjoints_[n.inputs[0]].data.data(), cnt);
        break;
    case OpKind::Softplus: {
        const Tensor& x = values_[n.inputs[0]];
        Tensor& dx = adjoints_[n.inputs[0]];
        for (std::size_t i = 0; i < cnt; ++i) dx.data[i] += dy.data[i] * sigmoid(x.data[i]);
        break;
    }
    case OpKind::BiasAt:
        K().axpy(1.0, dy.data.data(), adjoints_[n.inputs[0]].data.data(), cnt);
        adjoints_[n.inputs[1]].data[0] += dy.data[n.aux_index];
        break;
    }
}

void Graph::run_backward() {
    for (NodeId id = static_cast<NodeId>(nodes_.size()) - 1; id >= 0; --id)
        backprop_node(id);
}

GradMap Graph::backward(const TensorMap& output_seeds) {
    GradMap grads;
    backward_into(output_seeds, grads, 1.0);
    return grads;
}

void Graph::backward_into(const TensorMap& output_seeds, GradMap& acc, double scale) {
    require(ran_forward_, "graph: backward before forward");
    for (Tensor& a : adjoints_) a.fill(0.0);
    for (const auto& [name, seed] : output_seeds) {
        const NodeId id = output_id(name);
        require(seed.shape == nodes_[id].shape, "graph: seed for output '", name,
                "' expects shape ", shape_str(nodes_[id].shape), ", got ",
                shape_str(seed.shape));
        K().axpy(1.0, seed.data.data(), adjoints_[id].data.data(), seed.numel());
    }
    run_backward();
    for (const auto& name : param_order_) {
        const NodeId id = params_.at(name);
        auto it = acc.find(name);
        if (it == acc.end()) it = acc.emplace(name, Tensor(nodes_[id].shape)).first;
        K().axpy(scale, adjoints_[id].data.data(), it->second.data.data(),
                 it->second.numel());
    }
}

const Tensor& Graph::input_grad(const std::string& name) const {
    auto it = inputs_.find(name);
    require(it != inputs_.end(), "graph: unknown input '", name, "'");
    return adjoints_[it->second];
}

Tensor& Graph::param_value(const std::string& name) {
    auto it = params_.find(name);
    require(it != params_.end(), "graph: unknown parameter '", name, "'");
    return values_[it->second];
}

const Tensor& Graph::param_value(const std::string& name) const {
    auto it = params_.find(name);
    require(it != params_.end(), "graph: unknown parameter '", name, "'");
    return values_[it->second];
}

bool Graph::has_param(const std::string& name) const { return params_.count(name) > 0; }

std::size_t Graph::param_scalar_count() const {
    std::size_t n = 0;
    for (const auto& name : param_order_) n += param_value(name).numel();
    return n;
}

std::vector<double> stable_softmax(const std::vector<double>& logits) {
    require(!logits.empty(), "softmax: empty input");
    const double mx = *std::max_element(logits.begin(), logits.end());
    std::vector<double> out(logits.size());
    double denom = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        out[i] = std::exp(logits[i] - mx);
        denom += out[i];
    }
    for (double& v : out) v /= denom;
    return out;
}

} // namespace folio::nd
