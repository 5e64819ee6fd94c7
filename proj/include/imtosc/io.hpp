#pragma once

#include "imtosc/coloring.hpp"
#include "imtosc/image.hpp"
#include "imtosc/kuramoto.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace imtosc {

/// Filesystem failures and malformed input files.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

[[nodiscard]] std::string read_text_file(const std::filesystem::path& path);
/// Creates parent directories as needed.
void write_text_file(const std::filesystem::path& path, std::string_view content);

/// Shortest decimal text that round-trips the double ("nan" for NaN).
[[nodiscard]] std::string format_double(double v);

/// 8-bit PGM, plain (P2) or binary (P5); intensities are divided by maxval.
[[nodiscard]] GrayImage parse_pgm(std::string_view bytes);
[[nodiscard]] std::string format_pgm(const GrayImage& img, bool binary = true);
[[nodiscard]] GrayImage read_pgm(const std::filesystem::path& path);
void write_pgm(const std::filesystem::path& path, const GrayImage& img, bool binary = true);

/// DIMACS "p edge n m" / "e u v" with 1-based vertices. Edges listed in both
/// directions are merged; self loops are rejected.
[[nodiscard]] Graph parse_dimacs(std::string_view text);
[[nodiscard]] Graph read_dimacs(const std::filesystem::path& path);

/// time,v1..vN,s1..sN with s = 0 metallic, 1 insulating.
[[nodiscard]] std::string trajectory_csv(const Trajectory& traj);
/// time,osc,transition with 1-based oscillator index.
[[nodiscard]] std::string events_csv(const Trajectory& traj);
/// Matrix with a header row of column coordinates and a leading column of
/// row coordinates; the corner cell holds the two axis names.
[[nodiscard]] std::string matrix_csv(const std::string& row_name, const std::string& col_name,
                                     const std::vector<double>& rows, const std::vector<double>& cols,
                                     const Matrix& values);
/// vertex,color rows (1-based vertices).
[[nodiscard]] std::string coloring_csv(const Coloring& c);
/// "colors=<k> proper=<bool> seed=<s>"
[[nodiscard]] std::string coloring_summary(const Coloring& c);
/// time,theta1..thetaN (wrapped phases).
[[nodiscard]] std::string kuramoto_csv(const KuramotoTrajectory& traj);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    /// Index of a header column, or -1.
    [[nodiscard]] int column(std::string_view name) const;
};

/// Numeric CSV with one header line; "nan" cells are accepted. Throws IoError
/// on ragged rows or unparsable cells.
[[nodiscard]] CsvTable parse_numeric_csv(std::string_view text);

}  // namespace imtosc
