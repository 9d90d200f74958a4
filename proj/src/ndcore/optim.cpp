#include "folio/ndcore/optim.hpp"

#include <cmath>

#include "folio/ndcore/kernels.hpp"

namespace folio::nd {

OptState OptState::sgd(double lr) {
    require(lr > 0.0, "sgd: learning rate must be positive");
    OptState s;
    s.kind = OptKind::Sgd;
    s.learning_rate = lr;
    return s;
}

OptState OptState::adam(double lr, double beta1, double beta2, double epsilon) {
    require(lr > 0.0, "adam: learning rate must be positive");
    require(beta1 > 0.0 && beta1 < 1.0, "adam: beta1 must be in (0,1)");
    require(beta2 > 0.0 && beta2 < 1.0, "adam: beta2 must be in (0,1)");
    OptState s;
    s.kind = OptKind::Adam;
    s.learning_rate = lr;
    s.beta1 = beta1;
    s.beta2 = beta2;
    s.epsilon = epsilon;
    return s;
}

void opt_step(OptState& state, Graph& graph, const GradMap& grads, bool maximize) {
    const int direction = maximize ? +1 : -1;
    state.step += 1;
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
    const auto& K = kernels::active();
    for (const auto& [name, g] : grads) {
        Tensor& p = graph.param_value(name);
        require(g.same_shape(p), "opt_step: gradient shape ", shape_str(g.shape),
                " does not match parameter '", name, "' ", shape_str(p.shape));
        require(g.all_finite(), "opt_step: non-finite gradient for parameter '", name, "'");
        if (state.kind == OptKind::Sgd) {
            K.sgd_update(p.data.data(), g.data.data(), p.numel(), state.learning_rate,
                         direction);
        } else {
            auto m = state.m1.find(name);
            if (m == state.m1.end()) m = state.m1.emplace(name, Tensor(p.shape)).first;
            auto v = state.m2.find(name);
            if (v == state.m2.end()) v = state.m2.emplace(name, Tensor(p.shape)).first;
            K.adam_update(p.data.data(), g.data.data(), m->second.data.data(),
                          v->second.data.data(), p.numel(), state.learning_rate,
                          state.beta1, state.beta2, state.epsilon, bc1, bc2, direction);
        }
    }
}

} // namespace folio::nd
