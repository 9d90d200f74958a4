#include "folio/market/series.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace folio::market {

Date parse_date(const std::string& iso) {
    int y = 0, m = 0, d = 0;
    char tail = 0;
    if (std::sscanf(iso.c_str(), "%4d-%2d-%2d%c", &y, &m, &d, &tail) != 3)
        fail("invalid ISO-8601 date '", iso, "'");
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{unsigned(m)},
                                          std::chrono::day{unsigned(d)}};
    require(ymd.ok(), "invalid calendar date '", iso, "'");
    const std::chrono::sys_days days{ymd};
    return Date{static_cast<int>(days.time_since_epoch().count())};
}

std::string format_date(Date d) {
    const std::chrono::sys_days days{std::chrono::days{d.serial}};
    const std::chrono::year_month_day ymd{days};
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", int(ymd.year()),
                  unsigned(ymd.month()), unsigned(ymd.day()));
    return buf;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

double parse_field(const std::string& s, const std::string& path, std::size_t lineno,
                   const char* what) {
    double v = 0.0;
    const char* begin = s.data();
    const char* end = begin + s.size();
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc{} || ptr != end || !std::isfinite(v))
        fail(path, ":", lineno, ": malformed ", what, " field '", s, "'");
    return v;
}

} // namespace

AssetSeries load_ohlcv(const std::string& path) {
    std::ifstream in(path);
    require(in.good(), "cannot open OHLCV file '", path, "'");

    AssetSeries series;
    series.asset_id = std::filesystem::path(path).stem().string();

    std::string line;
    require(static_cast<bool>(std::getline(in, line)), path, ": empty file");
    {
        auto header = split_csv_line(line);
        require(header == std::vector<std::string>{"date", "open", "high", "low", "close",
                                                   "volume"},
                path, ":1: expected header 'date,open,high,low,close,volume'");
    }

    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto fields = split_csv_line(line);
        require(fields.size() == 6, path, ":", lineno, ": expected 6 fields, got ",
                fields.size());
        OhlcvRow row;
        try {
            row.date = parse_date(fields[0]);
        } catch (const Error& e) {
            fail(path, ":", lineno, ": ", e.what());
        }
        row.open = parse_field(fields[1], path, lineno, "open");
        row.high = parse_field(fields[2], path, lineno, "high");
        row.low = parse_field(fields[3], path, lineno, "low");
        row.close = parse_field(fields[4], path, lineno, "close");
        row.volume = parse_field(fields[5], path, lineno, "volume");
        require(row.open > 0.0 && row.high > 0.0 && row.low > 0.0 && row.close > 0.0,
                path, ":", lineno, ": nonpositive price");
        require(row.volume >= 0.0, path, ":", lineno, ": negative volume");
        series.rows.push_back(row);
    }
    require(!series.rows.empty(), path, ": no data rows");

    std::stable_sort(series.rows.begin(), series.rows.end(),
                     [](const OhlcvRow& a, const OhlcvRow& b) { return a.date < b.date; });
    for (std::size_t i = 1; i < series.rows.size(); ++i)
        require(series.rows[i].date != series.rows[i - 1].date, path,
                ": duplicate date ", format_date(series.rows[i].date));
    return series;
}

} // namespace folio::market
