#include "imtosc/io.hpp"
#include "imtosc/plot.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>

using namespace imtosc;

namespace {

std::size_t count(const std::string& s, const std::string& needle) {
    std::size_t n = 0;
    for (auto pos = s.find(needle); pos != std::string::npos; pos = s.find(needle, pos + 1)) ++n;
    return n;
}

std::string abs_diff_surface(std::size_t n) {
    std::vector<double> g;
    for (std::size_t k = 0; k < n; ++k) g.push_back(static_cast<double>(k));
    Matrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = std::abs(static_cast<double>(i - j));
    return matrix_csv("vgs1", "vgs2", g, g, m);
}

}  // namespace

TEST_CASE("timeseries draws one polyline per oscillator") {
    const std::string csv = "time,v1,v2,v3,s1,s2,s3\n0,0.1,0.2,0.3,0,1,0\n1,0.4,0.5,0.6,1,1,0\n2,0.2,0.3,0.1,1,0,0\n";
    const auto svg = emit_plot(csv, PlotKind::Timeseries);
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(count(svg, "<polyline") == 3);
    CHECK(svg.find("data-series=\"v2\"") != std::string::npos);
}

TEST_CASE("heatmap draws one cell per value with the lowest values black") {
    const auto svg = emit_plot(abs_diff_surface(4), PlotKind::Heatmap);
    CHECK(count(svg, "<rect x=") == 16 + 1);  // cells plus the frame
    CHECK(count(svg, "fill=\"#000000\"") == 4);  // the diagonal
    CHECK(count(svg, "fill=\"#ffffff\"") == 2);  // the two far corners
}

TEST_CASE("scatter draws one point per row") {
    const std::string csv = "time,v1,v2\n0,0.3,0.7\n1,0.5,0.5\n2,0.7,0.3\n3,0.5,0.5\n";
    const auto svg = emit_plot(csv, PlotKind::Scatter);
    CHECK(count(svg, "<circle") == 4);
    PlotOptions opts;
    opts.x_column = "v3";
    CHECK_THROWS_AS(emit_plot(csv, PlotKind::Scatter, opts), IoError);
}

TEST_CASE("plots depend only on their input") {
    const auto csv = abs_diff_surface(5);
    CHECK(emit_plot(csv, PlotKind::Heatmap) == emit_plot(csv, PlotKind::Heatmap));
}

TEST_CASE("malformed CSV is rejected") {
    CHECK_THROWS_AS(emit_plot("time,v1\n0,abc\n", PlotKind::Timeseries), IoError);
    CHECK_THROWS_AS(emit_plot("t,x\n0,1\n", PlotKind::Timeseries), IoError);
    CHECK_THROWS_AS(emit_plot("a\\b,x\n0,1\n", PlotKind::Heatmap), IoError);
    CHECK_THROWS_AS(emit_plot("", PlotKind::Scatter), IoError);
}

TEST_CASE("plot kind names") {
    CHECK(plot_kind_from_string("heatmap") == PlotKind::Heatmap);
    CHECK(plot_kind_from_string("timeseries") == PlotKind::Timeseries);
    CHECK(plot_kind_from_string("scatter") == PlotKind::Scatter);
    CHECK_THROWS_AS(plot_kind_from_string("pie"), std::invalid_argument);
}

TEST_CASE("titles are escaped") {
    PlotOptions opts;
    opts.title = "a<b & c";
    const auto svg = emit_plot("time,v1\n0,1\n1,2\n", PlotKind::Timeseries, opts);
    CHECK(svg.find("a&lt;b &amp; c") != std::string::npos);
}
