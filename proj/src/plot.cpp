#include "imtosc/plot.hpp"

#include "imtosc/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace imtosc {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 480.0;
constexpr double kMargin = 50.0;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

std::string escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();

    void add(double v) {
        if (std::isnan(v)) return;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void finish() {
        if (!(lo <= hi)) lo = 0.0, hi = 1.0;
        if (hi == lo) lo -= 0.5, hi += 0.5;
    }
    [[nodiscard]] double norm(double v) const { return (v - lo) / (hi - lo); }
};

std::string header(const std::string& title) {
    std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" +
                      num(kHeight) + "\" viewBox=\"0 0 " + num(kWidth) + " " + num(kHeight) + "\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!title.empty()) {
        out += "<text x=\"" + num(kWidth / 2) + "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" +
               escape(title) + "</text>\n";
    }
    return out;
}

std::string axes(const Range& x, const Range& y, const std::string& xl, const std::string& yl) {
    const double x0 = kMargin, x1 = kWidth - kMargin, y0 = kHeight - kMargin, y1 = kMargin;
    std::string out = "<rect x=\"" + num(x0) + "\" y=\"" + num(y1) + "\" width=\"" + num(x1 - x0) + "\" height=\"" +
                      num(y0 - y1) + "\" fill=\"none\" stroke=\"black\"/>\n";
    out += "<text x=\"" + num(x0) + "\" y=\"" + num(y0 + 15) + "\" font-size=\"10\">" + label(x.lo) + "</text>\n";
    out += "<text x=\"" + num(x1) + "\" y=\"" + num(y0 + 15) + "\" font-size=\"10\" text-anchor=\"end\">" +
           label(x.hi) + "</text>\n";
    out += "<text x=\"" + num(x0 - 4) + "\" y=\"" + num(y0) + "\" font-size=\"10\" text-anchor=\"end\">" +
           label(y.lo) + "</text>\n";
    out += "<text x=\"" + num(x0 - 4) + "\" y=\"" + num(y1 + 10) + "\" font-size=\"10\" text-anchor=\"end\">" +
           label(y.hi) + "</text>\n";
    out += "<text x=\"" + num(kWidth / 2) + "\" y=\"" + num(kHeight - 12) +
           "\" font-size=\"12\" text-anchor=\"middle\">" + escape(xl) + "</text>\n";
    out += "<text x=\"14\" y=\"" + num(kHeight / 2) + "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 14 " +
           num(kHeight / 2) + ")\">" + escape(yl) + "</text>\n";
    return out;
}

double px(const Range& r, double v) { return kMargin + r.norm(v) * (kWidth - 2 * kMargin); }
double py(const Range& r, double v) { return kHeight - kMargin - r.norm(v) * (kHeight - 2 * kMargin); }

std::string heatmap(const CsvTable& t, const PlotOptions& opts) {
    if (t.header.size() < 2 || t.rows.empty()) throw IoError("heatmap: matrix CSV needs at least one row and column");
    const std::size_t rows = t.rows.size();
    const std::size_t cols = t.header.size() - 1;
    Range v;
    for (const auto& r : t.rows)
        for (std::size_t c = 1; c < r.size(); ++c) v.add(r[c]);
    v.finish();
    std::string out = header(opts.title);
    const double cw = (kWidth - 2 * kMargin) / static_cast<double>(cols);
    const double ch = (kHeight - 2 * kMargin) / static_cast<double>(rows);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            const double val = t.rows[r][c + 1];
            std::string fill = "#ff00ff";
            if (!std::isnan(val)) {
                const int g = static_cast<int>(std::lround(255.0 * std::clamp(v.norm(val), 0.0, 1.0)));
                char buf[8];
                std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", g, g, g);
                fill = buf;
            }
            // Row 0 at the bottom so the first axis grows upwards.
            out += "<rect x=\"" + num(kMargin + static_cast<double>(c) * cw) + "\" y=\"" +
                   num(kHeight - kMargin - static_cast<double>(r + 1) * ch) + "\" width=\"" + num(cw) +
                   "\" height=\"" + num(ch) + "\" fill=\"" + fill + "\"/>\n";
        }
    }
    Range xr, yr;
    for (std::size_t c = 1; c < t.header.size(); ++c) {
        try {
            xr.add(std::stod(t.header[c]));
        } catch (const std::exception&) {
            throw IoError("heatmap: column header '" + t.header[c] + "' is not a number");
        }
    }
    for (const auto& r : t.rows) yr.add(r[0]);
    xr.finish();
    yr.finish();
    const auto slash = t.header[0].find('\\');
    const std::string row_name = slash == std::string::npos ? t.header[0] : t.header[0].substr(0, slash);
    const std::string col_name = slash == std::string::npos ? "" : t.header[0].substr(slash + 1);
    out += axes(xr, yr, col_name, row_name);
    out += "<text x=\"" + num(kWidth - kMargin) + "\" y=\"" + num(kMargin - 8) +
           "\" font-size=\"10\" text-anchor=\"end\">black=" + label(v.lo) + " white=" + label(v.hi) + "</text>\n";
    return out + "</svg>\n";
}

std::string timeseries(const CsvTable& t, const PlotOptions& opts) {
    const int tc = t.column("time");
    if (tc < 0) throw IoError("timeseries: CSV has no 'time' column");
    std::vector<std::size_t> series;
    for (std::size_t c = 0; c < t.header.size(); ++c) {
        const auto& h = t.header[c];
        if ((h.size() > 1 && h[0] == 'v') || h.rfind("theta", 0) == 0) series.push_back(c);
    }
    if (series.empty()) throw IoError("timeseries: CSV has no v<i> or theta<i> columns");
    if (t.rows.empty()) throw IoError("timeseries: CSV has no data rows");
    Range xr, yr;
    for (const auto& r : t.rows) {
        xr.add(r[static_cast<std::size_t>(tc)]);
        for (auto c : series) yr.add(r[c]);
    }
    xr.finish();
    yr.finish();
    std::string out = header(opts.title) + axes(xr, yr, "time", "value");
    for (std::size_t k = 0; k < series.size(); ++k) {
        out += "<polyline fill=\"none\" stroke-width=\"1\" stroke=\"" + std::string(kPalette[k % 8]) +
               "\" data-series=\"" + escape(t.header[series[k]]) + "\" points=\"";
        for (std::size_t r = 0; r < t.rows.size(); ++r) {
            if (r) out.push_back(' ');
            out += num(px(xr, t.rows[r][static_cast<std::size_t>(tc)])) + "," + num(py(yr, t.rows[r][series[k]]));
        }
        out += "\"/>\n";
    }
    return out + "</svg>\n";
}

std::string scatter(const CsvTable& t, const PlotOptions& opts) {
    const int xc = t.column(opts.x_column);
    const int yc = t.column(opts.y_column);
    if (xc < 0 || yc < 0) {
        throw IoError("scatter: CSV lacks column '" + (xc < 0 ? opts.x_column : opts.y_column) + "'");
    }
    if (t.rows.empty()) throw IoError("scatter: CSV has no data rows");
    Range xr, yr;
    for (const auto& r : t.rows) {
        xr.add(r[static_cast<std::size_t>(xc)]);
        yr.add(r[static_cast<std::size_t>(yc)]);
    }
    xr.finish();
    yr.finish();
    std::string out = header(opts.title) + axes(xr, yr, opts.x_column, opts.y_column);
    for (const auto& r : t.rows) {
        out += "<circle r=\"1.5\" fill=\"#1f77b4\" cx=\"" + num(px(xr, r[static_cast<std::size_t>(xc)])) + "\" cy=\"" +
               num(py(yr, r[static_cast<std::size_t>(yc)])) + "\"/>\n";
    }
    return out + "</svg>\n";
}

}  // namespace

PlotKind plot_kind_from_string(std::string_view s) {
    if (s == "heatmap") return PlotKind::Heatmap;
    if (s == "timeseries") return PlotKind::Timeseries;
    if (s == "scatter") return PlotKind::Scatter;
    throw std::invalid_argument("unknown plot kind '" + std::string(s) + "' (heatmap, timeseries, scatter)");
}

std::string emit_plot(std::string_view csv, PlotKind kind, const PlotOptions& opts) {
    const CsvTable t = parse_numeric_csv(csv);
    switch (kind) {
        case PlotKind::Heatmap: return heatmap(t, opts);
        case PlotKind::Timeseries: return timeseries(t, opts);
        case PlotKind::Scatter: return scatter(t, opts);
    }
    return {};
}

}  // namespace imtosc
