#pragma once

#include "folio/ndcore/graph.hpp"

namespace folio::agent {

// Blends every parameter of `online` into `target`:
// theta_target = tau * theta_online + (1 - tau) * theta_target.
// Requires 0 < tau <= 1 and identical parameter sets.
void soft_update(nd::Graph& target, const nd::Graph& online, double tau);

// A lagged copy of an online network, updated by soft blending.
class TargetNet {
public:
    TargetNet(const nd::Graph& online, double tau);

    void update_from(const nd::Graph& online) { soft_update(net, online, tau_); }
    double tau() const { return tau_; }

    nd::Graph net;

private:
    double tau_;
};

} // namespace folio::agent
