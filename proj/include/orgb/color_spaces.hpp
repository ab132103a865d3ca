#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "orgb/image.hpp"

// All conversions take linear RGB. HSV in particular is computed on linear
// values, not on gamma-encoded ones as most imaging libraries do, so that a
// pure brightness scaling of a pixel leaves its hue and saturation unchanged.
namespace orgb::color {

enum class Space { kRg, kHsv, kLuv };

Space parse_space(const std::string& name);
std::string space_name(Space space);

/// Named channels of one color space, all the same size.
struct ChannelSet {
    std::string space;
    std::vector<std::pair<std::string, ChannelImage>> channels;

    /// kInvalidArgument if the name is unknown.
    const ChannelImage& channel(std::string_view name) const;
};

// --- rg chromaticity: r = R/(R+G+B), g = G/(R+G+B); black and exact grays
// -> (1/3, 1/3).

struct Chromaticity {
    double r;
    double g;
};
inline constexpr double kBlackSumThreshold = 1e-9;
Chromaticity rgb_to_rg(const Rgb& rgb);
ChannelSet to_rg_chromaticity(const LinearImage& img);

// --- HSV hexcone. h in [0,1), s and v in [0,1]; input clamped to [0,1].
// Gray pixels get h = 0. When the max is shared, the lowest channel index
// picks the sector.

struct Hsv {
    double h;
    double s;
    double v;
};
Hsv rgb_to_hsv(const Rgb& rgb);
Rgb hsv_to_rgb(const Hsv& hsv);
ChannelSet to_hsv(const LinearImage& img);
/// Needs channels "h", "s", "v".
LinearImage hsv_to_rgb(const ChannelSet& hsv);

// --- CIE 1976 L*u*v* with sRGB primaries and D65 white.
//
//   X = 0.4124564 R + 0.3575761 G + 0.1804375 B
//   Y = 0.2126729 R + 0.7151522 G + 0.0721750 B
//   Z = 0.0193339 R + 0.1191920 G + 0.9503041 B
//
// The white point is the image of RGB (1,1,1) under this matrix, which gives
// u'n = 0.1978398 and v'n = 0.4683363. Negative inputs are clamped to 0.

struct Xyz {
    double x;
    double y;
    double z;
};
struct Luv {
    double l;
    double u;
    double v;
};
struct UvPrime {
    double u;
    double v;
};

Xyz rgb_to_xyz(const Rgb& rgb);
/// Black maps to the white point's (u'n, v'n).
UvPrime xyz_to_uv_prime(const Xyz& xyz);
UvPrime white_uv_prime();
Luv rgb_to_luv(const Rgb& rgb);
ChannelSet to_cieluv(const LinearImage& img);

ChannelSet convert(const LinearImage& img, Space space);

/// Maps a channel to [0,1] for display: rg and HSV pass through, L* / 100,
/// u* and v* via (x + 200) / 400.
ChannelImage display_channel(const ChannelSet& set, std::string_view name);

}  // namespace orgb::color
