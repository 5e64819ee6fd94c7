#include "imtosc/coloring.hpp"

#include <catch_amalgamated.hpp>

#include <numbers>
#include <set>

using namespace imtosc;

namespace {
constexpr double kPi = std::numbers::pi;

std::size_t distinct(const std::vector<int>& c) { return std::set<int>(c.begin(), c.end()).size(); }
}  // namespace

TEST_CASE("verify_coloring examples") {
    const auto k3 = Graph::complete(3);
    CHECK(verify_coloring(k3, {0, 1, 2}).proper);
    const auto bad = verify_coloring(k3, {0, 1, 1});
    CHECK_FALSE(bad.proper);
    REQUIRE(bad.conflicts.size() == 1);
    CHECK(bad.conflicts[0] == std::pair<std::size_t, std::size_t>{1, 2});
    Graph empty;
    empty.n = 4;
    CHECK(verify_coloring(empty, {0, 0, 0, 0}).proper);
    CHECK_THROWS_AS(verify_coloring(k3, {0, 1}), std::invalid_argument);
}

TEST_CASE("extract_coloring examples") {
    CHECK(distinct(extract_coloring({0.0, kPi})) == 2);
    const auto pairs = extract_coloring({0.0, 0.01, kPi, kPi + 0.01});
    CHECK(distinct(pairs) == 2);
    CHECK(pairs[0] == pairs[1]);
    CHECK(pairs[2] == pairs[3]);
    CHECK(distinct(extract_coloring({0.0, kPi / 2, kPi, 3 * kPi / 2})) == 4);
    CHECK(distinct(extract_coloring({1.0, 1.0, 1.0})) == 1);
    CHECK(extract_coloring({0.2, 3.0, 0.21}) == std::vector<int>{0, 1, 0});
}

TEST_CASE("extract_coloring is invariant under a common phase shift") {
    const std::vector<double> base{0.1, 0.12, 2.2, 2.25, 4.0, 4.02, 4.05};
    const auto ref = extract_coloring(base);
    for (double shift : {0.5, 1.9, 3.0, 6.0}) {
        std::vector<double> p;
        for (double v : base) p.push_back(std::fmod(v + shift, 2 * kPi));
        CHECK(extract_coloring(p) == ref);
    }
}

TEST_CASE("graph families") {
    CHECK(Graph::complete(4).edges.size() == 6);
    CHECK(Graph::cycle(6).edges.size() == 6);
    const auto p = Graph::petersen();
    CHECK(p.n == 10);
    CHECK(p.edges.size() == 15);
    std::vector<int> degree(10, 0);
    for (const auto& [u, v] : p.edges) ++degree[u], ++degree[v];
    for (int d : degree) CHECK(d == 3);
    CHECK(p.connected());
}

TEST_CASE("graph validation") {
    Graph g;
    g.n = 3;
    g.edges = {{0, 1}, {1, 0}};
    CHECK_THROWS_AS(g.validate(), std::invalid_argument);
    g.edges = {{0, 0}};
    CHECK_THROWS_AS(g.validate(), std::invalid_argument);
    g.edges = {{0, 3}};
    CHECK_THROWS_AS(g.validate(), std::invalid_argument);
    g.edges = {{0, 1}};
    CHECK_FALSE(g.connected());
}

TEST_CASE("coloring network has one capacitor per edge") {
    const ColoringConfig cfg;
    const auto net = coloring_network(Graph::cycle(5), cfg);
    CHECK(net.size() == 5);
    CHECK(net.couplings().size() == 5);
    for (const auto& c : net.couplings()) CHECK(c.c_c == cfg.c_c);
    Graph disconnected;
    disconnected.n = 3;
    disconnected.edges = {{0, 1}};
    CHECK_THROWS_AS(coloring_network(disconnected, cfg), std::invalid_argument);
}

TEST_CASE("two coupled oscillators split into two colors") {
    const auto c = color_graph(Graph::complete(2), ColoringConfig{});
    CHECK(c.proper);
    CHECK(c.num_colors == 2);
}

TEST_CASE("triangle gets three colors and proper results always verify") {
    ColoringConfig cfg;
    cfg.restarts = 5;
    const auto g = Graph::complete(3);
    for (const auto& c : color_graph_all(g, cfg)) {
        if (c.proper) CHECK(verify_coloring(g, c.colors).proper);
        CHECK(c.num_colors == static_cast<int>(distinct(c.colors)));
    }
    const auto best = color_graph(g, cfg);
    CHECK(best.proper);
    CHECK(best.num_colors == 3);
}

TEST_CASE("restarts are reproducible and independent of worker count") {
    ColoringConfig cfg;
    cfg.restarts = 4;
    const auto a = color_graph_all(Graph::cycle(4), cfg, 1);
    const auto b = color_graph_all(Graph::cycle(4), cfg, 3);
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
        CHECK(a[k].colors == b[k].colors);
        CHECK(a[k].phases == b[k].phases);
        CHECK(a[k].seed == b[k].seed);
    }
}

TEST_CASE("best_coloring prefers proper, then fewer colors, then earlier restart") {
    Coloring improper;
    improper.proper = false;
    improper.num_colors = 1;
    improper.restart = 0;
    improper.conflicts = {{0, 1}};
    Coloring three;
    three.proper = true;
    three.num_colors = 3;
    three.restart = 1;
    Coloring two_late = three;
    two_late.num_colors = 2;
    two_late.restart = 3;
    Coloring two_early = two_late;
    two_early.restart = 2;
    CHECK(best_coloring({improper, three, two_late, two_early}).restart == 2);
    CHECK_THROWS(best_coloring({}));
}
