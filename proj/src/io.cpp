#include "imtosc/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace imtosc {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view line, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

/// Reads PGM header tokens, skipping '#' comments; leaves pos just past the
/// token.
std::string next_token(std::string_view bytes, std::size_t& pos) {
    while (pos < bytes.size()) {
        const char c = bytes[pos];
        if (c == '#') {
            while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
        } else if (std::isspace(static_cast<unsigned char>(c))) {
            ++pos;
        } else {
            break;
        }
    }
    const std::size_t start = pos;
    while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos])) && bytes[pos] != '#') ++pos;
    if (start == pos) throw IoError("pgm: unexpected end of header");
    return std::string(bytes.substr(start, pos - start));
}

std::size_t parse_size(const std::string& tok, const char* what) {
    std::size_t v = 0;
    const auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || p != tok.data() + tok.size()) throw IoError(std::string(what) + ": expected integer, got '" + tok + "'");
    return v;
}

double parse_cell(const std::string& cell, std::size_t line) {
    if (cell == "nan" || cell == "NaN") return std::numeric_limits<double>::quiet_NaN();
    double v = 0.0;
    const auto [p, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc() || p != cell.data() + cell.size()) {
        throw IoError("csv line " + std::to_string(line) + ": not a number: '" + cell + "'");
    }
    return v;
}

}  // namespace

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError("error while reading '" + path.string() + "'");
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory '" + path.parent_path().string() + "': " + ec.message());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError("error while writing '" + path.string() + "'");
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    char buf[64];
    const auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, p);
}

GrayImage parse_pgm(std::string_view bytes) {
    std::size_t pos = 0;
    const std::string magic = next_token(bytes, pos);
    if (magic != "P2" && magic != "P5") throw IoError("pgm: unsupported magic '" + magic + "'");
    const std::size_t w = parse_size(next_token(bytes, pos), "pgm width");
    const std::size_t h = parse_size(next_token(bytes, pos), "pgm height");
    const std::size_t maxval = parse_size(next_token(bytes, pos), "pgm maxval");
    if (w == 0 || h == 0) throw IoError("pgm: empty image");
    if (maxval == 0 || maxval > 255) throw IoError("pgm: only 8-bit images (maxval 1..255) are supported");
    GrayImage img(w, h);
    const double scale = 1.0 / static_cast<double>(maxval);
    if (magic == "P5") {
        ++pos;  // single whitespace after maxval
        if (bytes.size() < pos + w * h) throw IoError("pgm: truncated pixel data");
        for (std::size_t k = 0; k < w * h; ++k) {
            const auto v = static_cast<unsigned char>(bytes[pos + k]);
            if (v > maxval) throw IoError("pgm: pixel exceeds maxval");
            img.pixels[k] = v * scale;
        }
    } else {
        for (std::size_t k = 0; k < w * h; ++k) {
            const std::size_t v = parse_size(next_token(bytes, pos), "pgm pixel");
            if (v > maxval) throw IoError("pgm: pixel exceeds maxval");
            img.pixels[k] = static_cast<double>(v) * scale;
        }
    }
    return img;
}

std::string format_pgm(const GrayImage& img, bool binary) {
    img.validate();
    std::string out = std::string(binary ? "P5" : "P2") + "\n" + std::to_string(img.width) + " " +
                      std::to_string(img.height) + "\n255\n";
    for (std::size_t y = 0; y < img.height; ++y) {
        for (std::size_t x = 0; x < img.width; ++x) {
            const auto v = static_cast<int>(std::lround(img.at(x, y) * 255.0));
            if (binary) {
                out.push_back(static_cast<char>(static_cast<unsigned char>(v)));
            } else {
                out += std::to_string(v);
                out.push_back(x + 1 == img.width ? '\n' : ' ');
            }
        }
    }
    return out;
}

GrayImage read_pgm(const std::filesystem::path& path) {
    try {
        return parse_pgm(read_text_file(path));
    } catch (const IoError& e) {
        throw IoError(path.string() + ": " + e.what());
    }
}

void write_pgm(const std::filesystem::path& path, const GrayImage& img, bool binary) {
    write_text_file(path, format_pgm(img, binary));
}

Graph parse_dimacs(std::string_view text) {
    Graph g;
    bool have_header = false;
    std::set<std::pair<std::size_t, std::size_t>> seen;
    std::size_t line_no = 0;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag) || tag == "c") continue;
        const auto where = "dimacs line " + std::to_string(line_no) + ": ";
        if (tag == "p") {
            std::string fmt;
            std::size_t n = 0, m = 0;
            if (have_header) throw IoError(where + "duplicate problem line");
            if (!(ls >> fmt >> n >> m) || (fmt != "edge" && fmt != "col")) {
                throw IoError(where + "expected 'p edge <n> <m>'");
            }
            g.n = n;
            have_header = true;
        } else if (tag == "e") {
            if (!have_header) throw IoError(where + "edge before problem line");
            long long u = 0, v = 0;
            if (!(ls >> u >> v)) throw IoError(where + "expected 'e <u> <v>'");
            if (u < 1 || v < 1 || static_cast<std::size_t>(u) > g.n || static_cast<std::size_t>(v) > g.n) {
                throw IoError(where + "vertex out of range 1.." + std::to_string(g.n));
            }
            if (u == v) throw IoError(where + "self loop");
            const auto a = static_cast<std::size_t>(u - 1);
            const auto b = static_cast<std::size_t>(v - 1);
            const std::pair<std::size_t, std::size_t> e{std::min(a, b), std::max(a, b)};
            if (seen.insert(e).second) g.edges.push_back(e);
        } else {
            throw IoError(where + "unknown line type '" + tag + "'");
        }
    }
    if (!have_header) throw IoError("dimacs: missing problem line");
    return g;
}

Graph read_dimacs(const std::filesystem::path& path) {
    try {
        return parse_dimacs(read_text_file(path));
    } catch (const IoError& e) {
        throw IoError(path.string() + ": " + e.what());
    }
}

std::string trajectory_csv(const Trajectory& traj) {
    const std::size_t n = traj.size();
    std::string out = "time";
    for (std::size_t i = 1; i <= n; ++i) out += ",v" + std::to_string(i);
    for (std::size_t i = 1; i <= n; ++i) out += ",s" + std::to_string(i);
    out += '\n';
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        out += format_double(traj.times[k]);
        for (Eigen::Index i = 0; i < traj.states[k].size(); ++i) out += "," + format_double(traj.states[k](i));
        for (auto s : traj.conduction[k]) out += "," + std::to_string(to_bit(s));
        out += '\n';
    }
    return out;
}

std::string events_csv(const Trajectory& traj) {
    std::string out = "time,osc,transition\n";
    for (const auto& e : traj.events) {
        out += format_double(e.t) + "," + std::to_string(e.osc + 1) + "," +
               (e.transition == Transition::ToMetallic ? "ToMetallic" : "ToInsulating") + "\n";
    }
    return out;
}

std::string matrix_csv(const std::string& row_name, const std::string& col_name, const std::vector<double>& rows,
                       const std::vector<double>& cols, const Matrix& values) {
    if (values.rows() != static_cast<Eigen::Index>(rows.size()) ||
        values.cols() != static_cast<Eigen::Index>(cols.size())) {
        throw std::invalid_argument("matrix_csv: dimensions do not match the axes");
    }
    std::string out = row_name + "\\" + col_name;
    for (double c : cols) out += "," + format_double(c);
    out += '\n';
    for (std::size_t r = 0; r < rows.size(); ++r) {
        out += format_double(rows[r]);
        for (std::size_t c = 0; c < cols.size(); ++c) {
            out += "," + format_double(values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)));
        }
        out += '\n';
    }
    return out;
}

std::string coloring_csv(const Coloring& c) {
    std::string out = "vertex,color\n";
    for (std::size_t v = 0; v < c.colors.size(); ++v) out += std::to_string(v + 1) + "," + std::to_string(c.colors[v]) + "\n";
    return out;
}

std::string coloring_summary(const Coloring& c) {
    return "colors=" + std::to_string(c.num_colors) + " proper=" + (c.proper ? "true" : "false") +
           " seed=" + std::to_string(c.seed);
}

std::string kuramoto_csv(const KuramotoTrajectory& traj) {
    std::string out = "time";
    const std::size_t n = traj.phases.empty() ? 0 : traj.phases.front().size();
    for (std::size_t i = 1; i <= n; ++i) out += ",theta" + std::to_string(i);
    out += '\n';
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        out += format_double(traj.times[k]);
        for (double p : traj.phases[k]) out += "," + format_double(p);
        out += '\n';
    }
    return out;
}

int CsvTable::column(std::string_view name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    return it == header.end() ? -1 : static_cast<int>(it - header.begin());
}

CsvTable parse_numeric_csv(std::string_view text) {
    CsvTable table;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto cells = split(line, ',');
        if (table.header.empty()) {
            table.header = std::move(cells);
            continue;
        }
        if (cells.size() != table.header.size()) {
            throw IoError("csv line " + std::to_string(line_no) + ": expected " + std::to_string(table.header.size()) +
                          " cells, found " + std::to_string(cells.size()));
        }
        std::vector<double> row;
        row.reserve(cells.size());
        for (const auto& c : cells) row.push_back(parse_cell(c, line_no));
        table.rows.push_back(std::move(row));
    }
    if (table.header.empty()) throw IoError("csv: empty input");
    return table;
}

}  // namespace imtosc
