#include "imtosc/image.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>

using namespace imtosc;
using Catch::Matchers::WithinAbs;

namespace {

/// Table whose value is |v_gs1 - v_gs2|; bilinear interpolation of it is exact
/// only on the grid, so tests use intensities that land on grid nodes.
std::shared_ptr<const XorLookup> abs_diff_lookup(double lo, double hi, std::size_t n) {
    XorSurface s;
    s.vgs1_grid = s.vgs2_grid = linear_grid(lo, hi, n);
    s.values.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            s.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = std::abs(s.vgs1_grid[i] - s.vgs2_grid[j]);
    s.locked.assign(n, std::vector<bool>(n, true));
    return std::make_shared<const XorLookup>(s);
}

ImageCompareConfig lookup_config() {
    ImageCompareConfig cfg;
    cfg.v_gs_lo = 1.9;
    cfg.v_gs_hi = 2.1;
    return cfg;
}

}  // namespace

TEST_CASE("saliency of a single bright pixel uses the available neighbours") {
    GrayImage img(3, 3, 0.0);
    img.at(1, 1) = 1.0;
    const auto map = saliency(img, lookup_config(), abs_diff_lookup(1.9, 2.1, 3));
    // Full-range contrast maps to |delta v_gs| = 0.2.
    CHECK_THAT(map.at(1, 1), WithinAbs(0.2, 1e-12));
    CHECK_THAT(map.at(0, 0), WithinAbs(0.2 / 3.0, 1e-12));
    CHECK_THAT(map.at(1, 0), WithinAbs(0.2 / 5.0, 1e-12));
    CHECK_THAT(map.at(2, 1), WithinAbs(0.2 / 5.0, 1e-12));
}

TEST_CASE("saliency of a constant image is uniform") {
    const GrayImage img(5, 4, 0.5);
    const auto map = saliency(img, lookup_config(), abs_diff_lookup(1.9, 2.1, 3));
    for (double v : map.pixels) CHECK(v == 0.0);
}

TEST_CASE("saliency peaks along a vertical step") {
    GrayImage img(6, 4, 0.0);
    for (std::size_t y = 0; y < 4; ++y)
        for (std::size_t x = 3; x < 6; ++x) img.at(x, y) = 1.0;
    const auto map = saliency(img, lookup_config(), abs_diff_lookup(1.9, 2.1, 3));
    for (std::size_t y = 0; y < 4; ++y) {
        CHECK(map.at(2, y) > 0.0);
        CHECK(map.at(3, y) > 0.0);
        CHECK(map.at(0, y) == 0.0);
        CHECK(map.at(5, y) == 0.0);
    }
}

TEST_CASE("direct mode evaluates each distinct pair with the comparator") {
    ImageCompareConfig cfg = lookup_config();
    cfg.use_lookup = false;
    const PairXor px(cfg);
    const auto v = px.evaluate({{0.0, 1.0}, {1.0, 0.0}, {0.5, 0.5}});
    const double expected = comparator(1.9, 2.1, cfg.comparator).xor_value.value;
    CHECK(v[0] == expected);
    CHECK(v[1] == expected);
    CHECK(v[2] == comparator(2.0, 2.0, cfg.comparator).xor_value.value);
}

TEST_CASE("template matching counts pixels below the XOR threshold") {
    GrayImage templ(4, 4, 0.0);
    for (std::size_t k = 0; k < 4; ++k) templ.at(k, k) = 1.0;
    GrayImage inverted = templ;
    for (auto& p : inverted.pixels) p = 1.0 - p;
    const auto lut = abs_diff_lookup(1.9, 2.1, 3);
    const auto self = template_match(templ, templ, lookup_config(), 0.1, 0.5, lut);
    CHECK(self.fraction == 1.0);
    CHECK(self.decision);
    const auto inv = template_match(inverted, templ, lookup_config(), 0.1, 0.5, lut);
    CHECK(inv.fraction == 0.0);
    CHECK_FALSE(inv.decision);
    GrayImage half = templ;
    for (std::size_t x = 0; x < 4; ++x) half.at(x, 0) = 1.0 - half.at(x, 0);
    CHECK(template_match(half, templ, lookup_config(), 0.1, 0.5, lut).fraction == 0.75);
}

TEST_CASE("image argument checks") {
    const auto lut = abs_diff_lookup(1.9, 2.1, 3);
    CHECK_THROWS_AS(saliency(GrayImage(2, 5, 0.0), lookup_config(), lut), std::invalid_argument);
    CHECK_THROWS_AS(template_match(GrayImage(3, 3), GrayImage(3, 4), lookup_config(), 0.2, 0.5, lut),
                    std::invalid_argument);
    GrayImage bad(3, 3, 0.0);
    bad.pixels[4] = 1.5;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    ImageCompareConfig cfg;
    cfg.v_gs_lo = 0.5;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("intensity maps linearly onto the v_gs range") {
    const auto cfg = lookup_config();
    CHECK(cfg.to_vgs(0.0) == 1.9);
    CHECK_THAT(cfg.to_vgs(0.5), WithinAbs(2.0, 1e-15));
    CHECK_THAT(cfg.to_vgs(1.0), WithinAbs(2.1, 1e-15));
}
