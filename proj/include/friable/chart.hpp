#pragma once

// Minimal CSV reader and a fixed-template SVG line chart for sweep output.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "friable/error.hpp"

namespace friable::chart {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(std::string_view name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        fail(ErrorKind::MissingColumn, "column '" + std::string(name) + "' not in CSV header");
    }
};

/// Cells split on commas; a cell wrapped in double quotes may contain commas
/// and "" for a literal quote.
inline std::vector<std::string> split_line(std::string_view line) {
    std::vector<std::string> cells(1);
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c != '"') cells.back() += c;
            else if (i + 1 < line.size() && line[i + 1] == '"') cells.back() += '"', ++i;
            else quoted = false;
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            cells.emplace_back();
        } else {
            cells.back() += c;
        }
    }
    if (quoted) fail(ErrorKind::InvalidArgument, "unterminated quote in CSV line");
    return cells;
}

/// Header row plus comma-separated rows; blank lines and trailing \r ignored.
inline CsvTable parse_csv(std::string_view text) {
    CsvTable table;
    std::istringstream in{std::string(text)};
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (!have_header) {
            table.header = split_line(line);
            have_header = true;
            continue;
        }
        auto cells = split_line(line);
        if (cells.size() != table.header.size())
            fail(ErrorKind::InvalidArgument, "CSV row has " + std::to_string(cells.size()) + " cells, header has " +
                                                 std::to_string(table.header.size()));
        table.rows.push_back(std::move(cells));
    }
    if (!have_header) fail(ErrorKind::MissingData, "CSV input is empty");
    if (table.rows.empty()) fail(ErrorKind::MissingData, "CSV has a header but no data rows");
    return table;
}

inline double parse_number(const std::string& cell) {
    double v = std::numeric_limits<double>::quiet_NaN();
    const auto* end = cell.data() + cell.size();
    const auto [ptr, ec] = std::from_chars(cell.data(), end, v);
    if (ec != std::errc() || ptr != end) return std::numeric_limits<double>::quiet_NaN();
    return v;
}

namespace detail {

inline std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

inline std::string label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

inline std::string escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

inline constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

} // namespace detail

/// Line chart of y_cols against x_col.  Rows whose cells are not numbers
/// (or not positive, with log_y) are skipped.  Output is byte-identical for
/// identical input.
inline std::string render_svg(const CsvTable& table, const std::string& x_col, const std::vector<std::string>& y_cols,
                              bool log_y = false) {
    if (table.rows.empty()) fail(ErrorKind::MissingData, "no rows to chart");
    if (y_cols.empty()) fail(ErrorKind::MissingColumn, "no y columns requested");
    const std::size_t xi = table.column(x_col);
    std::vector<std::size_t> yi;
    for (const auto& c : y_cols) yi.push_back(table.column(c));

    struct Series {
        std::vector<std::pair<double, double>> pts;
    };
    std::vector<Series> series(yi.size());
    double x_lo = INFINITY, x_hi = -INFINITY, y_lo = INFINITY, y_hi = -INFINITY;
    for (const auto& row : table.rows) {
        const double x = parse_number(row[xi]);
        if (!std::isfinite(x)) continue;
        for (std::size_t s = 0; s < yi.size(); ++s) {
            double y = parse_number(row[yi[s]]);
            if (!std::isfinite(y) || (log_y && y <= 0)) continue;
            if (log_y) y = std::log10(y);
            series[s].pts.emplace_back(x, y);
            x_lo = std::min(x_lo, x), x_hi = std::max(x_hi, x);
            y_lo = std::min(y_lo, y), y_hi = std::max(y_hi, y);
        }
    }
    if (!std::isfinite(x_lo) || !std::isfinite(y_lo)) fail(ErrorKind::MissingData, "no numeric points to chart");
    if (x_hi == x_lo) x_hi = x_lo + 1;
    if (y_hi == y_lo) y_hi = y_lo + 1;

    constexpr double W = 720, H = 440, L = 80, R = 160, T = 30, B = 50;
    auto sx = [&](double x) { return L + (x - x_lo) / (x_hi - x_lo) * (W - L - R); };
    auto sy = [&](double y) { return H - B - (y - y_lo) / (y_hi - y_lo) * (H - T - B); };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
        << ' ' << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double xv = x_lo + (x_hi - x_lo) * k / 4.0;
        const double yv = y_lo + (y_hi - y_lo) * k / 4.0;
        svg << "<text x=\"" << detail::num(sx(xv)) << "\" y=\"" << H - B + 18 << "\" text-anchor=\"middle\">"
            << detail::label(xv) << "</text>\n";
        svg << "<text x=\"" << L - 6 << "\" y=\"" << detail::num(sy(yv) + 4) << "\" text-anchor=\"end\">"
            << (log_y ? "1e" + detail::label(yv) : detail::label(yv)) << "</text>\n";
    }
    svg << "<text x=\"" << detail::num((L + W - R) / 2) << "\" y=\"" << H - 10 << "\" text-anchor=\"middle\">"
        << detail::escape(x_col) << "</text>\n";
    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* colour = detail::kPalette[s % std::size(detail::kPalette)];
        svg << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < series[s].pts.size(); ++i) {
            if (i) svg << ' ';
            svg << detail::num(sx(series[s].pts[i].first)) << ',' << detail::num(sy(series[s].pts[i].second));
        }
        svg << "\"/>\n";
        svg << "<text x=\"" << W - R + 10 << "\" y=\"" << T + 16 * (s + 1) << "\" fill=\"" << colour << "\">"
            << detail::escape(y_cols[s]) << (log_y ? " (log10)" : "") << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

} // namespace friable::chart
