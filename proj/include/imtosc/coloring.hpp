#pragma once

#include "imtosc/engine.hpp"

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

namespace imtosc {

/// Simple undirected graph on vertices 0..n-1.
struct Graph {
    std::size_t n = 0;
    std::vector<std::pair<std::size_t, std::size_t>> edges;

    /// Throws on out-of-range endpoints, self loops or repeated edges.
    void validate() const;
    [[nodiscard]] bool connected() const;

    static Graph complete(std::size_t n);
    static Graph cycle(std::size_t n);
    static Graph petersen();
};

struct ColoringCheck {
    bool proper = true;
    std::vector<std::pair<std::size_t, std::size_t>> conflicts;
};

[[nodiscard]] ColoringCheck verify_coloring(const Graph& g, const std::vector<int>& colors);

/// Clusters phases on the circle. Sorted neighbours are split at every gap
/// wider than gap_ratio times the mean gap; when no gap stands out that way,
/// every gap wider than merge_tol splits instead. Colors are numbered in
/// order of first appearance by vertex index.
[[nodiscard]] std::vector<int> extract_coloring(const std::vector<double>& phases, double gap_ratio = 2.0,
                                                double merge_tol = 0.1);

struct ColoringConfig {
    DeviceParams device{0.7, 0.3, 10.0, 0.0, 1.0};
    double g_s = 1.0;
    double c_lump = 1.0;
    double c_c = 0.05;  ///< one identical capacitor per edge
    double t_end = 600.0;
    double event_tol = 1e-10;
    double gap_ratio = 2.0;
    double merge_tol = 0.1;
    std::size_t restarts = 20;
    std::uint64_t seed = 1;

    void validate() const;
};

struct Coloring {
    std::vector<int> colors;
    int num_colors = 0;
    bool proper = false;
    std::vector<double> phases;
    std::uint64_t seed = 0;
    std::size_t restart = 0;
    std::vector<std::pair<std::size_t, std::size_t>> conflicts;
};

[[nodiscard]] NetworkSpec coloring_network(const Graph& g, const ColoringConfig& cfg);

/// One simulation from the restart's seed; phases are read at oscillator 0's
/// last up-switch.
[[nodiscard]] Coloring color_graph_once(const Graph& g, const ColoringConfig& cfg, std::size_t restart);

/// Best of cfg.restarts runs: fewest colors among proper results (lowest
/// restart on ties), else fewest conflicts.
[[nodiscard]] Coloring color_graph(const Graph& g, const ColoringConfig& cfg, std::size_t jobs = 1);

/// Selection rule used by color_graph.
[[nodiscard]] Coloring best_coloring(const std::vector<Coloring>& runs);

/// All runs, in restart order.
[[nodiscard]] std::vector<Coloring> color_graph_all(const Graph& g, const ColoringConfig& cfg, std::size_t jobs = 1);

}  // namespace imtosc
