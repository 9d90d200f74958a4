#include "folio/market/panel.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

#include "folio/common.hpp"

namespace folio::market {

const char* feature_name(Feature f) {
    switch (f) {
        case Feature::Open: return "open";
        case Feature::High: return "high";
        case Feature::Low: return "low";
        case Feature::Close: return "close";
        case Feature::Volume: return "volume";
    }
    fail("unknown feature enum value");
}

std::vector<Feature> parse_features(const std::string& s) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : s) {
        if (c == '+') {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        }
    }
    parts.push_back(cur);

    bool close = false, volume = false;
    std::vector<std::string> price_extras;
    for (const auto& p : parts) {
        if (p == "close") {
            require(!close, "feature set '", s, "': duplicate 'close'");
            close = true;
        } else if (p == "volume") {
            require(!volume, "feature set '", s, "': duplicate 'volume'");
            volume = true;
        } else if (p == "open" || p == "high" || p == "low") {
            price_extras.push_back(p);
        } else {
            fail("feature set '", s, "': unknown feature '", p,
                 "' (expected close, open, high, low, volume)");
        }
    }
    require(close, "feature set '", s, "' must include 'close'");
    require(price_extras.size() <= 1, "feature set '", s,
            "' may include at most one of open/high/low alongside close");

    std::vector<Feature> out;
    out.push_back(Feature::Close);
    if (!price_extras.empty()) {
        if (price_extras[0] == "open") out.push_back(Feature::Open);
        if (price_extras[0] == "high") out.push_back(Feature::High);
        if (price_extras[0] == "low") out.push_back(Feature::Low);
    }
    if (volume) out.push_back(Feature::Volume);
    return out;
}

std::string format_features(const std::vector<Feature>& fs) {
    std::string out;
    for (std::size_t i = 0; i < fs.size(); ++i) {
        if (i) out += '+';
        out += feature_name(fs[i]);
    }
    return out;
}

const std::vector<double>& Panel::feature(Feature f) const {
    switch (f) {
        case Feature::Open: return open;
        case Feature::High: return high;
        case Feature::Low: return low;
        case Feature::Close: return close;
        case Feature::Volume: return volume;
    }
    fail("unknown feature enum value");
}

std::vector<double>& Panel::feature(Feature f) {
    return const_cast<std::vector<double>&>(static_cast<const Panel&>(*this).feature(f));
}

std::size_t Panel::index_at_or_after(Date d) const {
    auto it = std::lower_bound(calendar.begin(), calendar.end(), d);
    require(it != calendar.end(), "date ", format_date(d), " is after the last panel date ",
            format_date(calendar.back()));
    return static_cast<std::size_t>(it - calendar.begin());
}

std::size_t Panel::index_at_or_before(Date d) const {
    auto it = std::upper_bound(calendar.begin(), calendar.end(), d);
    require(it != calendar.begin(), "date ", format_date(d), " is before the first panel date ",
            format_date(calendar.front()));
    return static_cast<std::size_t>(it - calendar.begin()) - 1;
}

Panel align_and_fill(const std::vector<AssetSeries>& series) {
    require(!series.empty(), "align_and_fill: no asset series given");
    Date lo = series[0].first_date();
    Date hi = series[0].last_date();
    for (const auto& s : series) {
        require(!s.rows.empty(), "align_and_fill: asset ", s.asset_id, " has no rows");
        lo = std::max(lo, s.first_date());
        hi = std::min(hi, s.last_date());
    }
    require(lo <= hi, "align_and_fill: assets share no common date span (span would start ",
            format_date(lo), " and end ", format_date(hi), ")");

    std::set<Date> dates;
    for (const auto& s : series)
        for (const auto& r : s.rows)
            if (lo <= r.date && r.date <= hi) dates.insert(r.date);

    Panel p;
    p.calendar.assign(dates.begin(), dates.end());
    const std::size_t T = p.calendar.size();
    const std::size_t m = series.size();
    p.open.assign(m * T, 0.0);
    p.high.assign(m * T, 0.0);
    p.low.assign(m * T, 0.0);
    p.close.assign(m * T, 0.0);
    p.volume.assign(m * T, 0.0);

    for (std::size_t a = 0; a < m; ++a) {
        const auto& s = series[a];
        p.asset_ids.push_back(s.asset_id);
        std::map<Date, const OhlcvRow*> by_date;
        for (const auto& r : s.rows) by_date[r.date] = &r;

        // The asset is guaranteed to have a row at or before `lo`, so the
        // first calendar day always has a fill source.
        double prev_close = 0.0;
        for (const auto& r : s.rows)
            if (r.date <= p.calendar.front()) prev_close = r.close;

        for (std::size_t t = 0; t < T; ++t) {
            auto it = by_date.find(p.calendar[t]);
            if (it != by_date.end()) {
                const OhlcvRow& r = *it->second;
                p.open[a * T + t] = r.open;
                p.high[a * T + t] = r.high;
                p.low[a * T + t] = r.low;
                p.close[a * T + t] = r.close;
                p.volume[a * T + t] = r.volume;
                prev_close = r.close;
            } else {
                p.open[a * T + t] = prev_close;
                p.high[a * T + t] = prev_close;
                p.low[a * T + t] = prev_close;
                p.close[a * T + t] = prev_close;
                p.volume[a * T + t] = 0.0;
            }
        }
    }
    return p;
}

Panel select_portfolio(const std::vector<AssetSeries>& pool, std::size_t m,
                       std::size_t min_days, Rng& rng, std::size_t max_draws) {
    require(m >= 1, "select_portfolio: m must be at least 1, got ", m);
    require(pool.size() >= m, "select_portfolio: pool has ", pool.size(),
            " assets, fewer than the requested ", m);

    std::vector<std::size_t> idx(pool.size());
    for (std::size_t draw = 0; draw < max_draws; ++draw) {
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        // Partial Fisher-Yates: the first m entries become a uniform
        // m-subset in random order.
        for (std::size_t i = 0; i < m; ++i) {
            std::uniform_int_distribution<std::size_t> pick(i, idx.size() - 1);
            std::swap(idx[i], idx[pick(rng)]);
        }
        std::vector<AssetSeries> subset;
        subset.reserve(m);
        for (std::size_t i = 0; i < m; ++i) subset.push_back(pool[idx[i]]);
        try {
            Panel p = align_and_fill(subset);
            if (p.num_days() >= min_days) return p;
        } catch (const Error&) {
            // Disjoint spans: treat as a failed draw and keep going.
        }
    }
    fail("select_portfolio: no ", m, "-asset subset with at least ", min_days,
         " aligned trading days found in ", max_draws, " draws");
}

Panel slice_panel(const Panel& panel, std::size_t begin, std::size_t end) {
    require(begin < end && end <= panel.num_days(), "slice_panel: bad range [", begin,
            ", ", end, ") for ", panel.num_days(), " days");
    Panel out;
    out.asset_ids = panel.asset_ids;
    out.calendar.assign(panel.calendar.begin() + static_cast<std::ptrdiff_t>(begin),
                        panel.calendar.begin() + static_cast<std::ptrdiff_t>(end));
    const std::size_t T = panel.num_days();
    const std::size_t n = end - begin;
    for (Feature f : {Feature::Open, Feature::High, Feature::Low, Feature::Close,
                      Feature::Volume}) {
        const std::vector<double>& src = panel.feature(f);
        std::vector<double>& dst = out.feature(f);
        dst.resize(panel.num_assets() * n);
        for (std::size_t a = 0; a < panel.num_assets(); ++a)
            std::copy(src.begin() + static_cast<std::ptrdiff_t>(a * T + begin),
                      src.begin() + static_cast<std::ptrdiff_t>(a * T + end),
                      dst.begin() + static_cast<std::ptrdiff_t>(a * n));
    }
    return out;
}

std::vector<double> price_relatives(const Panel& panel, std::size_t t) {
    require(t >= 1, "price_relatives: t must be at least 1 (needs a previous close)");
    require(t < panel.num_days(), "price_relatives: t=", t, " out of range for ",
            panel.num_days(), " days");
    const std::size_t m = panel.num_assets();
    const std::size_t T = panel.num_days();
    std::vector<double> y(m + 1);
    y[0] = 1.0;
    for (std::size_t a = 0; a < m; ++a) {
        double prev = panel.close[a * T + t - 1];
        double cur = panel.close[a * T + t];
        require(prev > 0.0, "price_relatives: nonpositive close for ", panel.asset_ids[a],
                " at t=", t - 1);
        y[a + 1] = cur / prev;
    }
    return y;
}

} // namespace folio::market
