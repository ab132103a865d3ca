#pragma once

#include "orgb/image.hpp"

namespace orgb {

/// Clamps every value to [0,1].
ChannelImage clamp01(const ChannelImage& ch);

/// Maps each pixel to the normalized CDF of its bin. Inputs are clamped to
/// [0,1] before binning; bin b covers [b/bins, (b+1)/bins), the last bin is
/// closed. Rank order is preserved (ties stay tied).
ChannelImage histogram_equalize(const ChannelImage& ch, int bins = 256);

/// 1 - v on clamped input.
ChannelImage invert(const ChannelImage& ch);

}  // namespace orgb
