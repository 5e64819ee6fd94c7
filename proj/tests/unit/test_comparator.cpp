#include "imtosc/comparator.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>

using namespace imtosc;
using Catch::Matchers::WithinAbs;

TEST_CASE("comparator network wiring") {
    const ComparatorConfig cfg;
    const auto net = comparator_network(1.8, 2.2, cfg);
    REQUIRE(net.size() == 2);
    REQUIRE(net.couplings().size() == 1);
    CHECK(net.couplings()[0].c_c == cfg.c_c);
    CHECK(net.couplings()[0].g_c == 0.0);
    const auto& dr = std::get<DRCircuit>(net.oscillator(0).circuit());
    CHECK(dr.g_s == gs_from_vgs(1.8, cfg.k, cfg.v_t));
}

TEST_CASE("comparator is symmetric in its inputs") {
    const ComparatorConfig cfg;
    const auto a = comparator(1.95, 2.05, cfg);
    const auto b = comparator(2.05, 1.95, cfg);
    CHECK(a.xor_value.value == b.xor_value.value);
    CHECK(a.locking == b.locking);
}

TEST_CASE("equal inputs sit below unequal ones") {
    const ComparatorConfig cfg;
    const double diag = comparator(2.0, 2.0, cfg).xor_value.value;
    const double near = comparator(2.0, 2.05, cfg).xor_value.value;
    const double far = comparator(2.0, 2.4, cfg).xor_value.value;
    CHECK(diag < near);
    CHECK(near < far);
    CHECK(diag < 0.1);
}

TEST_CASE("inputs far apart average to about one half") {
    const ComparatorConfig cfg;
    const auto r = comparator(1.5, 2.5, cfg);
    CHECK_FALSE(r.locked());
    CHECK_THAT(r.xor_value.value, WithinAbs(0.5, 0.1));
}

TEST_CASE("comparator input checks") {
    ComparatorConfig cfg;
    CHECK_THROWS_AS(comparator(0.5, 2.0, cfg), std::invalid_argument);
    cfg.v_gs_max = 6.0;
    // g_s = 5 keeps the metallic rest point below the upper threshold.
    CHECK_THROWS_AS(comparator(5.0, 2.0, cfg), NonOscillating);
    ComparatorConfig bad;
    bad.c_c = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("linear grid") {
    CHECK(linear_grid(1.0, 2.0, 1) == std::vector<double>{1.0});
    const auto g = linear_grid(1.0, 2.0, 5);
    REQUIRE(g.size() == 5);
    CHECK(g.front() == 1.0);
    CHECK(g.back() == 2.0);
    CHECK_THAT(g[2], WithinAbs(1.5, 1e-15));
    CHECK_THROWS(linear_grid(1.0, 2.0, 0));
}

TEST_CASE("xor surface on a 1x1 grid is one comparator call") {
    const ComparatorConfig cfg;
    const auto s = xor_surface({2.0}, {2.1}, cfg);
    REQUIRE(s.values.rows() == 1);
    REQUIRE(s.values.cols() == 1);
    CHECK(s.values(0, 0) == comparator(2.0, 2.1, cfg).xor_value.value);
}

TEST_CASE("square surface matches the general surface and is symmetric") {
    const ComparatorConfig cfg;
    const auto g = linear_grid(1.9, 2.1, 3);
    const auto a = xor_surface(g, g, cfg, 2);
    const auto b = xor_surface_square(g, cfg, 2);
    CHECK((a.values - b.values).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.values - a.values.transpose()).cwiseAbs().maxCoeff() <= 1e-9);
    for (Eigen::Index i = 0; i < 3; ++i) CHECK(a.values(i, i) == a.values.row(i).minCoeff());
}

TEST_CASE("surface grids must increase") {
    const ComparatorConfig cfg;
    CHECK_THROWS_AS(xor_surface({2.0, 1.9}, {2.0}, cfg), std::invalid_argument);
    CHECK_THROWS_AS(xor_surface_square({}, cfg), std::invalid_argument);
}

TEST_CASE("failed cells are recorded as missing values") {
    ComparatorConfig cfg;
    cfg.v_gs_max = 6.0;
    const auto s = xor_surface({2.0, 5.0}, {2.0}, cfg);
    CHECK_FALSE(std::isnan(s.values(0, 0)));
    CHECK(std::isnan(s.values(1, 0)));
    CHECK(s.errors.size() == 1);
}

TEST_CASE("lookup interpolates bilinearly and is exact on grid nodes") {
    XorSurface s;
    s.vgs1_grid = {0.0, 1.0, 2.0};
    s.vgs2_grid = {0.0, 1.0, 2.0};
    s.values.resize(3, 3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) s.values(i, j) = 0.1 + 0.2 * i + 0.05 * j + 0.01 * i * j;
    s.locked.assign(3, std::vector<bool>(3, true));
    const XorLookup lut(s);
    CHECK_THAT(lut(1.0, 2.0), WithinAbs(0.1 + 0.2 + 0.1 + 0.02, 1e-15));
    // A bilinear function is reproduced exactly inside each cell.
    const double x = 0.3, y = 1.7;
    CHECK_THAT(lut(x, y), WithinAbs(0.1 + 0.2 * x + 0.05 * y + 0.01 * x * y, 1e-14));
    // Out-of-range inputs are clamped to the table edge.
    CHECK_THAT(lut(-1.0, 0.0), WithinAbs(lut(0.0, 0.0), 1e-15));
}
