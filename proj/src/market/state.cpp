#include "folio/market/state.hpp"

#include <algorithm>

#include "folio/common.hpp"

namespace folio::market {

StateTensor normalize_window(const Panel& panel, std::size_t t, std::size_t window,
                             const std::vector<Feature>& features) {
    require(window >= 1, "normalize_window: window must be at least 1");
    require(!features.empty(), "normalize_window: empty feature set");
    require(t < panel.num_days(), "normalize_window: t=", t, " out of range for ",
            panel.num_days(), " days");
    require(t + 1 >= window, "normalize_window: t=", t, " has fewer than window=", window,
            " days of history");

    const std::size_t m = panel.num_assets();
    const std::size_t T = panel.num_days();
    const std::size_t F = features.size();
    const std::size_t begin = t + 1 - window;

    StateTensor s;
    s.features = features;
    s.values = nd::Tensor::zeros({m, F, window});

    for (std::size_t a = 0; a < m; ++a) {
        const double ref_close = panel.close[a * T + t];
        require(ref_close > 0.0, "normalize_window: nonpositive close for ",
                panel.asset_ids[a], " at t=", t);
        for (std::size_t f = 0; f < F; ++f) {
            const std::vector<double>& col = panel.feature(features[f]);
            if (features[f] == Feature::Volume) {
                double vmax = 0.0;
                for (std::size_t l = 0; l < window; ++l)
                    vmax = std::max(vmax, col[a * T + begin + l]);
                for (std::size_t l = 0; l < window; ++l)
                    s.values.at3(a, f, l) = vmax > 0.0 ? col[a * T + begin + l] / vmax : 0.0;
            } else {
                for (std::size_t l = 0; l < window; ++l)
                    s.values.at3(a, f, l) = col[a * T + begin + l] / ref_close;
            }
        }
    }
    return s;
}

} // namespace folio::market
