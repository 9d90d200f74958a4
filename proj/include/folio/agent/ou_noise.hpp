#pragma once

#include <vector>

#include "folio/market/panel.hpp"

namespace folio::agent {

// Ornstein-Uhlenbeck exploration noise, mean-reverting to zero:
// x += theta * (0 - x) * dt + sigma * sqrt(dt) * xi,  xi ~ N(0, I).
class OUProcess {
public:
    OUProcess(std::size_t dim, double theta = 0.15, double sigma = 0.2, double dt = 1.0);

    void reset();
    const std::vector<double>& step(Rng& rng);
    const std::vector<double>& value() const { return x_; }

private:
    double theta_, sigma_, dt_;
    std::vector<double> x_;
};

} // namespace folio::agent
