#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "orgb/image.hpp"

namespace orgb::demo {

struct LabelImage {
    int width = 0;
    int height = 0;
    int k = 0;
    std::vector<int> labels;  // row-major, each < k

    bool operator==(const LabelImage&) const = default;
};

/// Per-pixel hue-saturation feature (s cos 2πh, s sin 2πh) of the linear image.
std::vector<std::array<double, 2>> hue_saturation_features(const LinearImage& img);

struct KMeansOptions {
    int max_iterations = 100;
    double tolerance = 1e-6;  // max center movement
};

/// k-means on hue-saturation features. Farthest-point initialization starting
/// at pixel (seed mod n), Lloyd iterations, nearest center with ties to the
/// lowest index, empty clusters reseeded to the pixel farthest from its
/// center. Deterministic for a given (img, k, seed).
///
/// kInvalidArgument for k < 2 or an empty image; kDegenerateK when the image
/// has fewer than k distinct features.
LabelImage kmeans_segment(const LinearImage& img, int k, std::uint64_t seed, const KMeansOptions& options = {});

/// Mask of label == cls.
RegionMask label_mask(const LabelImage& labels, int cls);

enum class ChromaSpace { kHsv, kRg };

struct ChannelStats {
    std::vector<std::string> names;
    std::vector<double> stddev;

    double of(std::string_view name) const;
};

/// Population stddev of the chromaticity channels over the mask. HSV reports
/// "hue" (spread of the unit-circle embedding, sqrt(1 - |mean|^2)) and
/// "saturation"; rg reports "r" and "g". kEmptyRegion below 2 pixels.
ChannelStats region_color_stddev(const LinearImage& img, const RegionMask& mask, ChromaSpace space);

struct SegMetrics {
    double g_quality = 0.0;  // TP / (TP + FP + FN)
    double dr = 0.0;         // TP / (TP + FN)
    double da = 0.0;         // TP / (TP + FP)
    double f = 0.0;          // 2 DA DR / (DA + DR)
};

/// Pixel-wise metrics of `pred` against `gt`. Both empty: all 1. Exactly one
/// empty: all 0.
SegMetrics segmentation_metrics(const RegionMask& pred, const RegionMask& gt);

/// The cluster whose mask has the highest g_quality against `gt`, ties to
/// the lowest label.
int best_matching_cluster(const LabelImage& labels, const RegionMask& gt);

}  // namespace orgb::demo
