#include "folio/agent/ou_noise.hpp"

#include <cmath>

#include "folio/common.hpp"

namespace folio::agent {

OUProcess::OUProcess(std::size_t dim, double theta, double sigma, double dt)
    : theta_(theta), sigma_(sigma), dt_(dt), x_(dim, 0.0) {
    require(dim >= 1, "OUProcess: dimension must be at least 1");
    require(theta >= 0.0, "OUProcess: negative theta");
    require(sigma >= 0.0, "OUProcess: negative sigma");
    require(dt > 0.0, "OUProcess: dt must be positive");
}

void OUProcess::reset() {
    std::fill(x_.begin(), x_.end(), 0.0);
}

const std::vector<double>& OUProcess::step(Rng& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double diff = sigma_ * std::sqrt(dt_);
    for (auto& x : x_) x += theta_ * (0.0 - x) * dt_ + diff * gauss(rng);
    return x_;
}

} // namespace folio::agent
