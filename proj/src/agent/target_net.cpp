#include "folio/agent/target_net.hpp"

#include "folio/common.hpp"

namespace folio::agent {

void soft_update(nd::Graph& target, const nd::Graph& online, double tau) {
    require(tau > 0.0 && tau <= 1.0, "soft_update: tau must be in (0, 1], got ", tau);
    for (const auto& name : online.param_names()) {
        require(target.has_param(name), "soft_update: target is missing parameter ", name);
        const nd::Tensor& src = online.param_value(name);
        nd::Tensor& dst = target.param_value(name);
        require(src.shape == dst.shape, "soft_update: shape mismatch for parameter ", name);
        for (std::size_t i = 0; i < src.data.size(); ++i)
            dst.data[i] = tau * src.data[i] + (1.0 - tau) * dst.data[i];
    }
}

TargetNet::TargetNet(const nd::Graph& online, double tau) : net(online), tau_(tau) {
    require(tau > 0.0 && tau <= 1.0, "TargetNet: tau must be in (0, 1], got ", tau);
}

} // namespace folio::agent
