#pragma once

#include <string>
#include <string_view>

namespace imtosc {

enum class PlotKind { Heatmap, Timeseries, Scatter };

/// Parses "heatmap", "timeseries" or "scatter".
[[nodiscard]] PlotKind plot_kind_from_string(std::string_view s);

struct PlotOptions {
    std::string title;
    std::string x_column = "v1";  ///< scatter only
    std::string y_column = "v2";  ///< scatter only
};

/// Renders an artifact CSV as SVG. Heatmaps read a matrix CSV (lower values
/// are darker), timeseries draw one polyline per voltage or phase column
/// against time, scatter plots one column against another. Output depends
/// only on the input bytes and options. Throws IoError on malformed CSV.
[[nodiscard]] std::string emit_plot(std::string_view csv, PlotKind kind, const PlotOptions& opts = {});

}  // namespace imtosc
