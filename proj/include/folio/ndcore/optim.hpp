#pragma once

#include <map>
#include <string>

#include "folio/ndcore/graph.hpp"
#include "folio/ndcore/tensor.hpp"

namespace folio::nd {

enum class OptKind { Sgd, Adam };

// Optimizer state over a graph's named parameters. Moment tensors are
// created lazily and shape-match their parameters.
struct OptState {
    OptKind kind = OptKind::Sgd;
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    long step = 0;
    std::map<std::string, Tensor> m1;
    std::map<std::string, Tensor> m2;

    static OptState sgd(double lr);
    static OptState adam(double lr, double beta1 = 0.9, double beta2 = 0.999,
                         double epsilon = 1e-8);
};

// Applies one update to every parameter named in grads. maximize flips the
// step direction (gradient ascent). Non-finite gradients fail naming the
// parameter.
void opt_step(OptState& state, Graph& graph, const GradMap& grads, bool maximize = false);

} // namespace folio::nd
