#pragma once

#include <string>
#include <vector>

#include "folio/common.hpp"

namespace folio::market {

// Calendar date stored as days since 1970-01-01. Parsed from and formatted
// as ISO-8601 (YYYY-MM-DD).
struct Date {
    int serial = 0;

    auto operator<=>(const Date&) const = default;
    Date next_day() const { return Date{serial + 1}; }
};

Date parse_date(const std::string& iso);
std::string format_date(Date d);

struct OhlcvRow {
    Date date;
    double open = 0.0;
    double high = 0.0;
    double low = 0.0;
    double close = 0.0;
    double volume = 0.0;
};

// One asset's dated OHLCV history, strictly increasing dates, prices > 0,
// volume >= 0.
struct AssetSeries {
    std::string asset_id;
    std::vector<OhlcvRow> rows;

    Date first_date() const {
        require(!rows.empty(), "series '", asset_id, "' is empty");
        return rows.front().date;
    }
    Date last_date() const {
        require(!rows.empty(), "series '", asset_id, "' is empty");
        return rows.back().date;
    }
};

// Reads a CSV file with header date,open,high,low,close,volume. Rows are
// sorted ascending by date on return; duplicate dates, malformed rows
// (reported with line number) and nonpositive prices are rejected.
AssetSeries load_ohlcv(const std::string& path);

} // namespace folio::market
