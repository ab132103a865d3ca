#include "orgb/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "orgb/color_spaces.hpp"
#include "orgb/error.hpp"

namespace orgb::demo {
namespace {

using Feature = std::array<double, 2>;

double dist2(const Feature& a, const Feature& b) {
    const double dx = a[0] - b[0];
    const double dy = a[1] - b[1];
    return dx * dx + dy * dy;
}

int nearest(const Feature& f, const std::vector<Feature>& centers) {
    int best = 0;
    double best_d = dist2(f, centers[0]);
    for (int c = 1; c < static_cast<int>(centers.size()); ++c) {
        const double d = dist2(f, centers[c]);
        if (d < best_d) {
            best_d = d;
            best = c;
        }
    }
    return best;
}

std::size_t count_distinct(std::vector<Feature> features) {
    std::sort(features.begin(), features.end());
    return static_cast<std::size_t>(std::unique(features.begin(), features.end()) - features.begin());
}

}  // namespace

std::vector<Feature> hue_saturation_features(const LinearImage& img) {
    std::vector<Feature> out(img.pixel_count());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const color::Hsv hsv = color::rgb_to_hsv(img.pixel(i));
        const double angle = 2.0 * std::numbers::pi * hsv.h;
        out[i] = {hsv.s * std::cos(angle), hsv.s * std::sin(angle)};
    }
    return out;
}

LabelImage kmeans_segment(const LinearImage& img, int k, std::uint64_t seed, const KMeansOptions& options) {
    if (k < 2) throw Error(ErrorCode::kInvalidArgument, "k-means needs k >= 2, got " + std::to_string(k));
    if (img.empty()) throw Error(ErrorCode::kInvalidArgument, "k-means on an empty image");

    const std::vector<Feature> features = hue_saturation_features(img);
    const std::size_t n = features.size();
    const std::size_t distinct = count_distinct(features);
    if (distinct < static_cast<std::size_t>(k)) {
        throw Error(ErrorCode::kDegenerateK, "image has " + std::to_string(distinct) +
                                                 " distinct hue-saturation values, fewer than k = " + std::to_string(k));
    }

    // Farthest-point initialization.
    std::vector<Feature> centers;
    centers.reserve(static_cast<std::size_t>(k));
    centers.push_back(features[seed % n]);
    std::vector<double> min_d(n);
    for (std::size_t i = 0; i < n; ++i) min_d[i] = dist2(features[i], centers[0]);
    while (centers.size() < static_cast<std::size_t>(k)) {
        const std::size_t pick = static_cast<std::size_t>(std::max_element(min_d.begin(), min_d.end()) - min_d.begin());
        centers.push_back(features[pick]);
        for (std::size_t i = 0; i < n; ++i) min_d[i] = std::min(min_d[i], dist2(features[i], centers.back()));
    }

    LabelImage out{img.width(), img.height(), k, std::vector<int>(n, 0)};
    for (int iter = 0; iter < options.max_iterations; ++iter) {
        for (std::size_t i = 0; i < n; ++i) out.labels[i] = nearest(features[i], centers);

        std::vector<Feature> sums(static_cast<std::size_t>(k), Feature{0.0, 0.0});
        std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
        for (std::size_t i = 0; i < n; ++i) {
            const auto c = static_cast<std::size_t>(out.labels[i]);
            sums[c][0] += features[i][0];
            sums[c][1] += features[i][1];
            ++counts[c];
        }

        std::vector<Feature> next(centers);
        std::vector<double> own_d;
        for (std::size_t c = 0; c < next.size(); ++c) {
            if (counts[c] > 0) {
                next[c] = {sums[c][0] / static_cast<double>(counts[c]), sums[c][1] / static_cast<double>(counts[c])};
                continue;
            }
            if (own_d.empty()) {
                own_d.resize(n);
                for (std::size_t i = 0; i < n; ++i) {
                    own_d[i] = dist2(features[i], centers[static_cast<std::size_t>(out.labels[i])]);
                }
            }
            const std::size_t far = static_cast<std::size_t>(std::max_element(own_d.begin(), own_d.end()) - own_d.begin());
            next[c] = features[far];
            own_d[far] = -1.0;
        }

        double movement = 0.0;
        for (std::size_t c = 0; c < centers.size(); ++c) movement = std::max(movement, std::sqrt(dist2(centers[c], next[c])));
        centers = std::move(next);
        if (movement < options.tolerance) break;
    }
    for (std::size_t i = 0; i < n; ++i) out.labels[i] = nearest(features[i], centers);
    return out;
}

RegionMask label_mask(const LabelImage& labels, int cls) {
    std::vector<std::uint8_t> bits(labels.labels.size());
    for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = labels.labels[i] == cls ? 1 : 0;
    return RegionMask(labels.width, labels.height, std::move(bits));
}

double ChannelStats::of(std::string_view name) const {
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == name) return stddev[i];
    }
    throw Error(ErrorCode::kInvalidArgument, "no statistic named '" + std::string(name) + "'");
}

ChannelStats region_color_stddev(const LinearImage& img, const RegionMask& mask, ChromaSpace space) {
    const std::vector<Rgb> pixels = masked_pixels(img, mask);
    if (pixels.size() < 2) throw Error(ErrorCode::kEmptyRegion, "chromaticity statistics need at least 2 pixels");
    const double n = static_cast<double>(pixels.size());

    auto population_stddev = [n](const std::vector<double>& v) {
        double mean = 0.0;
        for (double x : v) mean += x;
        mean /= n;
        double ss = 0.0;
        for (double x : v) ss += (x - mean) * (x - mean);
        return std::sqrt(ss / n);
    };

    ChannelStats stats;
    if (space == ChromaSpace::kRg) {
        std::vector<double> r(pixels.size()), g(pixels.size());
        for (std::size_t i = 0; i < pixels.size(); ++i) {
            const color::Chromaticity c = color::rgb_to_rg(pixels[i]);
            r[i] = c.r;
            g[i] = c.g;
        }
        stats.names = {"r", "g"};
        stats.stddev = {population_stddev(r), population_stddev(g)};
        return stats;
    }

    std::vector<double> sat(pixels.size());
    double cx = 0.0;
    double cy = 0.0;
    for (std::size_t i = 0; i < pixels.size(); ++i) {
        const color::Hsv hsv = color::rgb_to_hsv(pixels[i]);
        sat[i] = hsv.s;
        cx += std::cos(2.0 * std::numbers::pi * hsv.h);
        cy += std::sin(2.0 * std::numbers::pi * hsv.h);
    }
    cx /= n;
    cy /= n;
    stats.names = {"hue", "saturation"};
    stats.stddev = {std::sqrt(std::max(0.0, 1.0 - (cx * cx + cy * cy))), population_stddev(sat)};
    return stats;
}

SegMetrics segmentation_metrics(const RegionMask& pred, const RegionMask& gt) {
    if (pred.width() != gt.width() || pred.height() != gt.height()) {
        throw Error(ErrorCode::kDimensionMismatch, "prediction and ground truth differ in size");
    }
    if (pred.empty() && gt.empty()) return {1.0, 1.0, 1.0, 1.0};
    if (pred.empty() || gt.empty()) return {0.0, 0.0, 0.0, 0.0};

    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
    for (std::size_t i = 0; i < pred.bits().size(); ++i) {
        const bool p = pred.test(i);
        const bool g = gt.test(i);
        tp += p && g;
        fp += p && !g;
        fn += !p && g;
    }
    SegMetrics m;
    m.g_quality = static_cast<double>(tp) / static_cast<double>(tp + fp + fn);
    m.dr = static_cast<double>(tp) / static_cast<double>(tp + fn);
    m.da = static_cast<double>(tp) / static_cast<double>(tp + fp);
    m.f = m.da + m.dr > 0.0 ? 2.0 * m.da * m.dr / (m.da + m.dr) : 0.0;
    return m;
}

int best_matching_cluster(const LabelImage& labels, const RegionMask& gt) {
    int best = 0;
    double best_g = -1.0;
    for (int c = 0; c < labels.k; ++c) {
        const double g = segmentation_metrics(label_mask(labels, c), gt).g_quality;
        if (g > best_g) {
            best_g = g;
            best = c;
        }
    }
    return best;
}

}  // namespace orgb::demo
