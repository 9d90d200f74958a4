#pragma once

#include "folio/market/panel.hpp"
#include "folio/ndcore/tensor.hpp"

namespace folio::market {

// Observation at decision time t: a (num_assets, num_features, window)
// tensor of trailing history, price features divided by the asset's close
// at t (so the close entry at the last lag is exactly 1) and volume divided
// by its in-window maximum.
struct StateTensor {
    nd::Tensor values; // shape (m, F, W)
    std::vector<Feature> features;

    std::size_t num_assets() const { return values.shape[0]; }
    std::size_t num_features() const { return values.shape[1]; }
    std::size_t window() const { return values.shape[2]; }
};

// Builds the normalized observation ending at day t (inclusive).
// Requires window >= 1 and t >= window - 1.
StateTensor normalize_window(const Panel& panel, std::size_t t, std::size_t window,
                             const std::vector<Feature>& features);

} // namespace folio::market
