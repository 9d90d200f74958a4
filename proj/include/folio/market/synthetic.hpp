#pragma once

#include "folio/market/panel.hpp"

namespace folio::market {

struct SyntheticAsset {
    std::string asset_id;
    double init_price = 100.0;
    double drift = 0.0;      // per-day log-price drift
    double volatility = 0.0; // per-day log-price standard deviation
    double base_volume = 1e6;
};

struct SyntheticSpec {
    std::vector<SyntheticAsset> assets;
    Date start{16437}; // 2015-01-02
    double intraday_range = 0.002;
};

// Generates a geometric-Brownian panel: day 0 closes at init_price, and each
// later close multiplies by exp(drift - vol^2/2 + vol * xi) with xi ~ N(0,1),
// so E[close_T] = init_price * exp(drift * T). Opens equal the previous
// close; highs/lows bracket open/close by the intraday_range factor; volumes
// are positive and uniformly jittered around base_volume.
Panel gen_synthetic(const SyntheticSpec& spec, std::size_t days, Rng& rng);

} // namespace folio::market
