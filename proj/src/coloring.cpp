#include "imtosc/coloring.hpp"

#include "imtosc/analysis.hpp"
#include "imtosc/parallel.hpp"
#include "imtosc/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

namespace imtosc {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

void Graph::validate() const {
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (const auto& [u, v] : edges) {
        if (u >= n || v >= n) throw std::invalid_argument("graph: edge endpoint out of range");
        if (u == v) throw std::invalid_argument("graph: self loop at vertex " + std::to_string(u + 1));
        if (!seen.insert(std::minmax(u, v)).second) {
            throw std::invalid_argument("graph: repeated edge " + std::to_string(u + 1) + "-" + std::to_string(v + 1));
        }
    }
}

bool Graph::connected() const {
    if (n == 0) return true;
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    const auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    std::size_t components = n;
    for (const auto& [u, v] : edges) {
        const auto a = find(u);
        const auto b = find(v);
        if (a != b) {
            parent[a] = b;
            --components;
        }
    }
    return components == 1;
}

Graph Graph::complete(std::size_t n) {
    Graph g{n, {}};
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) g.edges.emplace_back(i, j);
    return g;
}

Graph Graph::cycle(std::size_t n) {
    Graph g{n, {}};
    for (std::size_t i = 0; i < n; ++i) g.edges.emplace_back(i, (i + 1) % n);
    return g;
}

Graph Graph::petersen() {
    Graph g{10, {}};
    for (std::size_t i = 0; i < 5; ++i) {
        g.edges.emplace_back(i, (i + 1) % 5);      // outer cycle
        g.edges.emplace_back(i, i + 5);            // spokes
        g.edges.emplace_back(5 + i, 5 + (i + 2) % 5);  // inner pentagram
    }
    return g;
}

ColoringCheck verify_coloring(const Graph& g, const std::vector<int>& colors) {
    if (colors.size() != g.n) throw std::invalid_argument("verify_coloring: one color per vertex required");
    ColoringCheck check;
    for (const auto& [u, v] : g.edges) {
        if (colors[u] == colors[v]) {
            check.proper = false;
            check.conflicts.emplace_back(u, v);
        }
    }
    return check;
}

std::vector<int> extract_coloring(const std::vector<double>& phases, double gap_ratio, double merge_tol) {
    const std::size_t n = phases.size();
    if (n == 0) return {};
    std::vector<double> wrapped(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(phases[i])) throw std::invalid_argument("extract_coloring: phases must be finite");
        double p = std::fmod(phases[i], kTwoPi);
        if (p < 0.0) p += kTwoPi;
        wrapped[i] = p;
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return wrapped[a] < wrapped[b]; });

    // gap[k] is the arc from sorted point k to sorted point k+1 (circularly).
    std::vector<double> gap(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double next = k + 1 < n ? wrapped[order[k + 1]] : wrapped[order[0]] + kTwoPi;
        gap[k] = next - wrapped[order[k]];
    }
    const double mean_gap = kTwoPi / static_cast<double>(n);
    std::vector<bool> cut(n);
    bool any = false;
    for (std::size_t k = 0; k < n; ++k) any |= (cut[k] = gap[k] > gap_ratio * mean_gap);
    if (!any) {
        for (std::size_t k = 0; k < n; ++k) cut[k] = gap[k] > merge_tol;
    }

    // Walk the circle starting just after a cut so arcs are contiguous.
    std::vector<int> cluster(n, -1);
    const auto first_cut = static_cast<std::size_t>(std::find(cut.begin(), cut.end(), true) - cut.begin());
    if (first_cut == n) return std::vector<int>(n, 0);
    int id = 0;
    for (std::size_t step = 0; step < n; ++step) {
        const std::size_t k = (first_cut + 1 + step) % n;
        cluster[order[k]] = id;
        if (cut[k]) ++id;
    }
    // Relabel by first appearance in vertex order.
    std::vector<int> relabel(static_cast<std::size_t>(id) + 1, -1);
    int next_color = 0;
    std::vector<int> colors(n);
    for (std::size_t v = 0; v < n; ++v) {
        auto& r = relabel[static_cast<std::size_t>(cluster[v])];
        if (r < 0) r = next_color++;
        colors[v] = r;
    }
    return colors;
}

void ColoringConfig::validate() const {
    device.validate();
    if (!(g_s > 0.0)) throw std::invalid_argument("coloring.g_s must be > 0");
    if (!(c_lump > 0.0)) throw std::invalid_argument("coloring.c_lump must be > 0");
    if (!(c_c > 0.0)) throw std::invalid_argument("coloring.c_c must be > 0");
    if (!(t_end > 0.0)) throw std::invalid_argument("coloring.t_end must be > 0");
    if (!(gap_ratio > 0.0)) throw std::invalid_argument("coloring.gap_ratio must be > 0");
    if (!(merge_tol >= 0.0)) throw std::invalid_argument("coloring.merge_tol must be >= 0");
    if (restarts == 0) throw std::invalid_argument("coloring.restarts must be > 0");
}

NetworkSpec coloring_network(const Graph& g, const ColoringConfig& cfg) {
    g.validate();
    if (g.n < 2) throw std::invalid_argument("color_graph: graph needs at least two vertices");
    if (!g.connected()) throw std::invalid_argument("color_graph: graph must be connected");
    const auto osc = OscillatorSpec::dr(cfg.device, cfg.g_s, cfg.c_lump);
    const auto check = validate_oscillation(osc);
    if (!check.ok) throw std::domain_error("color_graph: oscillator does not oscillate: " + check.diagnostic);
    std::vector<CouplingSpec> couplings;
    couplings.reserve(g.edges.size());
    for (const auto& [u, v] : g.edges) couplings.push_back({u, v, cfg.c_c, 0.0});
    return NetworkSpec(std::vector<OscillatorSpec>(g.n, osc), std::move(couplings));
}

Coloring color_graph_once(const Graph& g, const ColoringConfig& cfg, std::size_t restart) {
    cfg.validate();
    const NetworkSpec net = coloring_network(g, cfg);
    Coloring result;
    result.restart = restart;
    result.seed = derive_seed(cfg.seed, restart);
    const auto ic = random_initial_condition(net, result.seed);
    SimConfig sim;
    sim.t_end = cfg.t_end;
    sim.event_tol = cfg.event_tol;
    sim.sample_dt = 0.0;
    const Trajectory traj = simulate(net, ic.x0, ic.s0, sim);

    const double t_ref = switching_phases(traj, 0).event_times.back();
    result.phases.resize(g.n);
    for (std::size_t i = 0; i < g.n; ++i) result.phases[i] = switching_phases(traj, i).phase_at(t_ref);
    result.colors = extract_coloring(result.phases, cfg.gap_ratio, cfg.merge_tol);
    result.num_colors = result.colors.empty() ? 0 : *std::max_element(result.colors.begin(), result.colors.end()) + 1;
    auto check = verify_coloring(g, result.colors);
    result.proper = check.proper;
    result.conflicts = std::move(check.conflicts);
    return result;
}

std::vector<Coloring> color_graph_all(const Graph& g, const ColoringConfig& cfg, std::size_t jobs) {
    cfg.validate();
    (void)coloring_network(g, cfg);
    std::vector<Coloring> runs(cfg.restarts);
    parallel_for(cfg.restarts, jobs, [&](std::size_t r) { runs[r] = color_graph_once(g, cfg, r); });
    return runs;
}

Coloring best_coloring(const std::vector<Coloring>& runs) {
    if (runs.empty()) throw std::invalid_argument("best_coloring: no runs");
    const auto better = [](const Coloring& a, const Coloring& b) {
        if (a.proper != b.proper) return a.proper;
        if (!a.proper && a.conflicts.size() != b.conflicts.size()) return a.conflicts.size() < b.conflicts.size();
        if (a.num_colors != b.num_colors) return a.num_colors < b.num_colors;
        return a.restart < b.restart;
    };
    return *std::min_element(runs.begin(), runs.end(), better);
}

Coloring color_graph(const Graph& g, const ColoringConfig& cfg, std::size_t jobs) {
    return best_coloring(color_graph_all(g, cfg, jobs));
}

}  // namespace imtosc
