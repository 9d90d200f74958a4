#pragma once

#include <random>
#include <vector>

#include "folio/market/series.hpp"

namespace folio {
using Rng = std::mt19937_64;
}

namespace folio::market {

enum class Feature { Open, High, Low, Close, Volume };

const char* feature_name(Feature f);

// Parses a feature-set string: "close", "close+high", "close+open",
// "close+low", each optionally "+volume". Close is always present.
std::vector<Feature> parse_features(const std::string& s);
std::string format_features(const std::vector<Feature>& fs);

// Aligned multi-asset OHLCV history over one trading calendar. Feature
// matrices are m x T row-major; no missing cells.
struct Panel {
    std::vector<std::string> asset_ids;
    std::vector<Date> calendar;
    std::vector<double> open, high, low, close, volume;

    std::size_t num_assets() const { return asset_ids.size(); }
    std::size_t num_days() const { return calendar.size(); }

    double at(Feature f, std::size_t asset, std::size_t t) const {
        return feature(f)[asset * num_days() + t];
    }
    const std::vector<double>& feature(Feature f) const;
    std::vector<double>& feature(Feature f);

    // Index of the first calendar date >= d / last date <= d.
    std::size_t index_at_or_after(Date d) const;
    std::size_t index_at_or_before(Date d) const;
};

// Aligns series to the union calendar over their common span
// [max(first dates), min(last dates)]. Dates where an asset has no row are
// filled with the previous close (open=high=low=close) and volume 0.
Panel align_and_fill(const std::vector<AssetSeries>& series);

// Draws random m-subsets of the pool until one aligns to at least min_days
// trading days; fails after max_draws unsuccessful draws.
Panel select_portfolio(const std::vector<AssetSeries>& pool, std::size_t m,
                       std::size_t min_days, Rng& rng, std::size_t max_draws = 10000);

// Price relatives y_t of length m+1: component 0 (cash) is exactly 1,
// component i is close_{i,t} / close_{i,t-1}. Requires t >= 1.
std::vector<double> price_relatives(const Panel& panel, std::size_t t);

// Copy of the panel restricted to calendar indices [begin, end).
Panel slice_panel(const Panel& panel, std::size_t begin, std::size_t end);

} // namespace folio::market
