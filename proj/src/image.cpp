#include "imtosc/image.hpp"

#include "imtosc/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace imtosc {

void GrayImage::validate() const {
    if (pixels.size() != width * height) throw std::invalid_argument("image: pixel count does not match dimensions");
    for (double p : pixels) {
        if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("image: intensities must lie in [0, 1]");
    }
}

void ImageCompareConfig::validate() const {
    comparator.validate();
    if (!(v_gs_lo < v_gs_hi)) throw std::invalid_argument("image.v_gs_lo must be < image.v_gs_hi");
    if (v_gs_lo < comparator.v_gs_min || v_gs_hi > comparator.v_gs_max) {
        throw std::invalid_argument("image v_gs range must lie inside the comparator operating range");
    }
    if (use_lookup && lookup_resolution < 2) throw std::invalid_argument("image.lookup_resolution must be >= 2");
}

PairXor::PairXor(const ImageCompareConfig& cfg, std::shared_ptr<const XorLookup> lookup)
    : cfg_(cfg), lookup_(std::move(lookup)) {
    cfg_.validate();
    if (cfg_.use_lookup && !lookup_) {
        lookup_ = std::make_shared<const XorLookup>(cfg_.v_gs_lo, cfg_.v_gs_hi, cfg_.lookup_resolution,
                                                    cfg_.comparator, cfg_.jobs);
    }
}

std::vector<double> PairXor::evaluate(const std::vector<std::pair<double, double>>& pairs) const {
    std::vector<double> out(pairs.size());
    if (cfg_.use_lookup) {
        for (std::size_t k = 0; k < pairs.size(); ++k) {
            out[k] = (*lookup_)(cfg_.to_vgs(pairs[k].first), cfg_.to_vgs(pairs[k].second));
        }
        return out;
    }
    // Direct simulation, once per distinct unordered pair.
    std::map<std::pair<double, double>, std::size_t> index;
    std::vector<std::pair<double, double>> unique;
    for (const auto& [a, b] : pairs) {
        if (index.try_emplace(std::minmax(a, b), unique.size()).second) unique.push_back(std::minmax(a, b));
    }
    std::vector<double> values(unique.size());
    parallel_for(unique.size(), cfg_.jobs, [&](std::size_t k) {
        values[k] = comparator(cfg_.to_vgs(unique[k].first), cfg_.to_vgs(unique[k].second), cfg_.comparator)
                        .xor_value.value;
    });
    for (std::size_t k = 0; k < pairs.size(); ++k) out[k] = values[index.at(std::minmax(pairs[k].first, pairs[k].second))];
    return out;
}

GrayImage saliency(const GrayImage& img, const ImageCompareConfig& cfg, std::shared_ptr<const XorLookup> lookup) {
    img.validate();
    if (img.width < 3 || img.height < 3) throw std::invalid_argument("saliency: image must be at least 3x3");
    const PairXor xor_of(cfg, std::move(lookup));

    std::vector<std::pair<double, double>> pairs;
    std::vector<std::size_t> owner;
    for (std::size_t y = 0; y < img.height; ++y) {
        for (std::size_t x = 0; x < img.width; ++x) {
            for (int dy = -1; dy <= 1; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    if (dx == 0 && dy == 0) continue;
                    const auto nx = static_cast<std::ptrdiff_t>(x) + dx;
                    const auto ny = static_cast<std::ptrdiff_t>(y) + dy;
                    if (nx < 0 || ny < 0 || nx >= static_cast<std::ptrdiff_t>(img.width) ||
                        ny >= static_cast<std::ptrdiff_t>(img.height)) {
                        continue;
                    }
                    pairs.emplace_back(img.at(x, y),
                                       img.at(static_cast<std::size_t>(nx), static_cast<std::size_t>(ny)));
                    owner.push_back(y * img.width + x);
                }
            }
        }
    }
    const auto values = xor_of.evaluate(pairs);
    GrayImage out(img.width, img.height);
    std::vector<int> count(img.pixels.size(), 0);
    for (std::size_t k = 0; k < values.size(); ++k) {
        out.pixels[owner[k]] += values[k];
        ++count[owner[k]];
    }
    for (std::size_t p = 0; p < out.pixels.size(); ++p) out.pixels[p] /= count[p];
    return out;
}

MatchResult template_match(const GrayImage& input, const GrayImage& templ, const ImageCompareConfig& cfg,
                           double theta_xor, double theta_wta, std::shared_ptr<const XorLookup> lookup) {
    input.validate();
    templ.validate();
    if (input.width != templ.width || input.height != templ.height) {
        throw std::invalid_argument("template_match: input and template dimensions differ");
    }
    const PairXor xor_of(cfg, std::move(lookup));
    std::vector<std::pair<double, double>> pairs(input.pixels.size());
    for (std::size_t p = 0; p < pairs.size(); ++p) pairs[p] = {input.pixels[p], templ.pixels[p]};
    MatchResult result;
    result.xor_map = GrayImage(input.width, input.height);
    result.xor_map.pixels = xor_of.evaluate(pairs);
    const auto hits = std::count_if(result.xor_map.pixels.begin(), result.xor_map.pixels.end(),
                                    [&](double v) { return v < theta_xor; });
    result.fraction = pairs.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(pairs.size());
    result.decision = result.fraction >= theta_wta;
    return result;
}

}  // namespace imtosc
