#include "orgb/enhance.hpp"

#include <algorithm>
#include <string>
#include <vector>

#include "orgb/error.hpp"

namespace orgb {

ChannelImage clamp01(const ChannelImage& ch) {
    ChannelImage out = ch;
    for (double& v : out.data()) v = std::clamp(v, 0.0, 1.0);
    return out;
}

ChannelImage histogram_equalize(const ChannelImage& ch, int bins) {
    if (bins < 2) throw Error(ErrorCode::kInvalidArgument, "histogram needs at least 2 bins, got " + std::to_string(bins));
    const std::size_t n = ch.pixel_count();
    ChannelImage out(ch.width(), ch.height());
    if (n == 0) return out;

    auto bin_of = [bins](double v) {
        const double c = std::clamp(v, 0.0, 1.0);
        return std::min(static_cast<int>(c * bins), bins - 1);
    };

    std::vector<std::size_t> cdf(static_cast<std::size_t>(bins), 0);
    for (double v : ch.data()) ++cdf[bin_of(v)];
    for (int b = 1; b < bins; ++b) cdf[b] += cdf[b - 1];

    const double total = static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) out.at(i) = static_cast<double>(cdf[bin_of(ch.at(i))]) / total;
    return out;
}

ChannelImage invert(const ChannelImage& ch) {
    ChannelImage out(ch.width(), ch.height());
    for (std::size_t i = 0; i < ch.pixel_count(); ++i) out.at(i) = 1.0 - std::clamp(ch.at(i), 0.0, 1.0);
    return out;
}

}  // namespace orgb
