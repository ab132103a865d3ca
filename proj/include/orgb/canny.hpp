#pragma once

#include "orgb/image.hpp"

namespace orgb::demo {

/// Thresholds apply to the gradient magnitude divided by its image maximum.
struct CannyOptions {
    double sigma = 1.4;
    double lo = 0.04;
    double hi = 0.10;
};

/// Binary edge map (0 or 1): Gaussian blur with radius ceil(3 sigma), Sobel
/// gradients, 4-direction non-maximum suppression, then hysteresis from
/// strong pixels through weak ones with 8-connectivity. Borders replicate.
/// kInvalidArgument unless sigma > 0 and 0 < lo < hi.
ChannelImage canny_edges(const ChannelImage& input, const CannyOptions& options = {});

}  // namespace orgb::demo
