#include "folio/market/synthetic.hpp"

#include <cmath>

#include "folio/common.hpp"

namespace folio::market {

Panel gen_synthetic(const SyntheticSpec& spec, std::size_t days, Rng& rng) {
    require(!spec.assets.empty(), "gen_synthetic: no assets in spec");
    require(days >= 2, "gen_synthetic: days must be at least 2");
    require(spec.intraday_range >= 0.0, "gen_synthetic: negative intraday_range");

    Panel p;
    p.calendar.resize(days);
    for (std::size_t t = 0; t < days; ++t) p.calendar[t] = Date{spec.start.serial + static_cast<int>(t)};

    const std::size_t T = days;
    const std::size_t m = spec.assets.size();
    p.open.assign(m * T, 0.0);
    p.high.assign(m * T, 0.0);
    p.low.assign(m * T, 0.0);
    p.close.assign(m * T, 0.0);
    p.volume.assign(m * T, 0.0);

    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> jitter(0.5, 1.5);

    for (std::size_t a = 0; a < m; ++a) {
        const SyntheticAsset& sa = spec.assets[a];
        require(!sa.asset_id.empty(), "gen_synthetic: asset ", a, " has empty id");
        require(sa.init_price > 0.0, "gen_synthetic: nonpositive init_price for ", sa.asset_id);
        require(sa.volatility >= 0.0, "gen_synthetic: negative volatility for ", sa.asset_id);
        require(sa.base_volume > 0.0, "gen_synthetic: nonpositive base_volume for ", sa.asset_id);
        p.asset_ids.push_back(sa.asset_id);

        double close = sa.init_price;
        for (std::size_t t = 0; t < T; ++t) {
            double open = close; // previous close; init_price on day 0
            if (t > 0) {
                double step = sa.drift - 0.5 * sa.volatility * sa.volatility +
                              sa.volatility * gauss(rng);
                close = close * std::exp(step);
            }
            double hi = std::max(open, close) * (1.0 + spec.intraday_range);
            double lo = std::min(open, close) / (1.0 + spec.intraday_range);
            p.open[a * T + t] = open;
            p.high[a * T + t] = hi;
            p.low[a * T + t] = lo;
            p.close[a * T + t] = close;
            p.volume[a * T + t] = sa.base_volume * jitter(rng);
        }
    }
    return p;
}

} // namespace folio::market
