#pragma once

#include "imtosc/comparator.hpp"

#include <cstddef>
#include <memory>
#include <vector>

namespace imtosc {

/// Row-major grayscale image with intensities in [0, 1].
struct GrayImage {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<double> pixels;

    GrayImage() = default;
    GrayImage(std::size_t w, std::size_t h, double fill = 0.0) : width(w), height(h), pixels(w * h, fill) {}

    [[nodiscard]] double& at(std::size_t x, std::size_t y) { return pixels[y * width + x]; }
    [[nodiscard]] double at(std::size_t x, std::size_t y) const { return pixels[y * width + x]; }

    /// Throws if the pixel count or any intensity is invalid.
    void validate() const;
};

/// Shared settings for pixel-wise comparator workloads. Intensities map
/// linearly onto [v_gs_lo, v_gs_hi], which should sit inside the locking band.
struct ImageCompareConfig {
    ComparatorConfig comparator;
    double v_gs_lo = 1.9;
    double v_gs_hi = 2.1;
    bool use_lookup = true;
    std::size_t lookup_resolution = 64;
    std::size_t jobs = 1;

    void validate() const;
    [[nodiscard]] double to_vgs(double intensity) const { return v_gs_lo + intensity * (v_gs_hi - v_gs_lo); }
};

/// Evaluates the XOR measure for many intensity pairs, either through a
/// lookup table or by direct simulation of every distinct pair.
class PairXor {
public:
    explicit PairXor(const ImageCompareConfig& cfg, std::shared_ptr<const XorLookup> lookup = nullptr);

    /// Values for each (a, b) intensity pair, in input order.
    [[nodiscard]] std::vector<double> evaluate(const std::vector<std::pair<double, double>>& pairs) const;

    [[nodiscard]] const std::shared_ptr<const XorLookup>& lookup() const noexcept { return lookup_; }

private:
    ImageCompareConfig cfg_;
    std::shared_ptr<const XorLookup> lookup_;
};

/// Mean XOR between each pixel and its (up to 8) neighbours in the 3x3 window.
[[nodiscard]] GrayImage saliency(const GrayImage& img, const ImageCompareConfig& cfg,
                                 std::shared_ptr<const XorLookup> lookup = nullptr);

struct MatchResult {
    double fraction = 0.0;  ///< pixels with XOR below theta_xor
    bool decision = false;  ///< fraction >= theta_wta
    GrayImage xor_map;
};

[[nodiscard]] MatchResult template_match(const GrayImage& input, const GrayImage& templ, const ImageCompareConfig& cfg,
                                         double theta_xor = 0.2, double theta_wta = 0.5,
                                         std::shared_ptr<const XorLookup> lookup = nullptr);

}  // namespace imtosc
