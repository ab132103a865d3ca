#include "orgb/color_spaces.hpp"

#include <algorithm>
#include <cmath>

#include "orgb/error.hpp"

namespace orgb::color {
namespace {

constexpr double kRgbToXyz[3][3] = {
    {0.4124564, 0.3575761, 0.1804375},
    {0.2126729, 0.7151522, 0.0721750},
    {0.0193339, 0.1191920, 0.9503041},
};

constexpr Xyz kWhite{kRgbToXyz[0][0] + kRgbToXyz[0][1] + kRgbToXyz[0][2],
                     kRgbToXyz[1][0] + kRgbToXyz[1][1] + kRgbToXyz[1][2],
                     kRgbToXyz[2][0] + kRgbToXyz[2][1] + kRgbToXyz[2][2]};

constexpr double kLabEpsilon = 216.0 / 24389.0;
constexpr double kLabKappa = 24389.0 / 27.0;

template <class F>
ChannelSet map_pixels(const LinearImage& img, std::string space, std::vector<std::string> names, F&& f) {
    ChannelSet set{std::move(space), {}};
    for (auto& n : names) set.channels.emplace_back(std::move(n), ChannelImage(img.width(), img.height()));
    for (std::size_t i = 0; i < img.pixel_count(); ++i) {
        const auto values = f(img.pixel(i));
        for (std::size_t c = 0; c < set.channels.size(); ++c) set.channels[c].second.at(i) = values[c];
    }
    return set;
}

}  // namespace

Space parse_space(const std::string& name) {
    if (name == "rg") return Space::kRg;
    if (name == "hsv") return Space::kHsv;
    if (name == "luv") return Space::kLuv;
    throw Error(ErrorCode::kInvalidArgument, "unknown color space '" + name + "' (rg | hsv | luv)");
}

std::string space_name(Space space) {
    switch (space) {
        case Space::kRg: return "rg";
        case Space::kHsv: return "hsv";
        case Space::kLuv: return "luv";
    }
    return "rg";
}

const ChannelImage& ChannelSet::channel(std::string_view name) const {
    for (const auto& [n, ch] : channels) {
        if (n == name) return ch;
    }
    std::string known;
    for (const auto& c : channels) known += (known.empty() ? "" : ", ") + c.first;
    throw Error(ErrorCode::kInvalidArgument,
                "space '" + space + "' has no channel '" + std::string(name) + "' (available: " + known + ")");
}

Chromaticity rgb_to_rg(const Rgb& rgb) {
    const double sum = channel_sum(rgb);
    if (sum < kBlackSumThreshold) return {1.0 / 3.0, 1.0 / 3.0};
    // v / (v + v + v) rounds away from 1/3 for about a fifth of all v
    if (rgb[0] == rgb[1] && rgb[1] == rgb[2]) return {1.0 / 3.0, 1.0 / 3.0};
    return {rgb[0] / sum, rgb[1] / sum};
}

ChannelSet to_rg_chromaticity(const LinearImage& img) {
    return map_pixels(img, "rg", {"r", "g"}, [](const Rgb& p) {
        const Chromaticity c = rgb_to_rg(p);
        return std::array<double, 2>{c.r, c.g};
    });
}

Hsv rgb_to_hsv(const Rgb& in) {
    const Rgb p{std::clamp(in[0], 0.0, 1.0), std::clamp(in[1], 0.0, 1.0), std::clamp(in[2], 0.0, 1.0)};
    int imax = 0;
    for (int k = 1; k < 3; ++k) {
        if (p[k] > p[imax]) imax = k;
    }
    const double mx = p[imax];
    const double mn = std::min({p[0], p[1], p[2]});
    const double delta = mx - mn;
    Hsv out{0.0, 0.0, mx};
    if (mx <= 0.0 || delta <= 0.0) return out;
    out.s = delta / mx;

    double h = 0.0;
    switch (imax) {
        case 0: h = (p[1] - p[2]) / delta; break;
        case 1: h = 2.0 + (p[2] - p[0]) / delta; break;
        default: h = 4.0 + (p[0] - p[1]) / delta; break;
    }
    h /= 6.0;
    if (h < 0.0) h += 1.0;
    if (h >= 1.0) h -= 1.0;
    out.h = h;
    return out;
}

Rgb hsv_to_rgb(const Hsv& hsv) {
    const double v = hsv.v;
    const double s = hsv.s;
    if (s <= 0.0) return {v, v, v};
    double h6 = (hsv.h - std::floor(hsv.h)) * 6.0;
    if (h6 >= 6.0) h6 = 0.0;
    const int sector = static_cast<int>(h6);
    const double f = h6 - sector;
    const double p = v * (1.0 - s);
    const double q = v * (1.0 - s * f);
    const double t = v * (1.0 - s * (1.0 - f));
    switch (sector) {
        case 0: return {v, t, p};
        case 1: return {q, v, p};
        case 2: return {p, v, t};
        case 3: return {p, q, v};
        case 4: return {t, p, v};
        default: return {v, p, q};
    }
}

ChannelSet to_hsv(const LinearImage& img) {
    return map_pixels(img, "hsv", {"h", "s", "v"}, [](const Rgb& p) {
        const Hsv c = rgb_to_hsv(p);
        return std::array<double, 3>{c.h, c.s, c.v};
    });
}

LinearImage hsv_to_rgb(const ChannelSet& hsv) {
    const ChannelImage& h = hsv.channel("h");
    const ChannelImage& s = hsv.channel("s");
    const ChannelImage& v = hsv.channel("v");
    LinearImage out(h.width(), h.height());
    for (std::size_t i = 0; i < h.pixel_count(); ++i) out.set_pixel(i, hsv_to_rgb(Hsv{h.at(i), s.at(i), v.at(i)}));
    return out;
}

Xyz rgb_to_xyz(const Rgb& rgb) {
    const Rgb p{std::max(rgb[0], 0.0), std::max(rgb[1], 0.0), std::max(rgb[2], 0.0)};
    return {kRgbToXyz[0][0] * p[0] + kRgbToXyz[0][1] * p[1] + kRgbToXyz[0][2] * p[2],
            kRgbToXyz[1][0] * p[0] + kRgbToXyz[1][1] * p[1] + kRgbToXyz[1][2] * p[2],
            kRgbToXyz[2][0] * p[0] + kRgbToXyz[2][1] * p[1] + kRgbToXyz[2][2] * p[2]};
}

UvPrime xyz_to_uv_prime(const Xyz& xyz) {
    const double den = xyz.x + 15.0 * xyz.y + 3.0 * xyz.z;
    if (!(den > 0.0)) return white_uv_prime();
    return {4.0 * xyz.x / den, 9.0 * xyz.y / den};
}

UvPrime white_uv_prime() {
    const double den = kWhite.x + 15.0 * kWhite.y + 3.0 * kWhite.z;
    return {4.0 * kWhite.x / den, 9.0 * kWhite.y / den};
}

Luv rgb_to_luv(const Rgb& rgb) {
    const Xyz xyz = rgb_to_xyz(rgb);
    const double yr = xyz.y / kWhite.y;
    const double l = yr > kLabEpsilon ? 116.0 * std::cbrt(yr) - 16.0 : kLabKappa * yr;
    const UvPrime uv = xyz_to_uv_prime(xyz);
    const UvPrime n = white_uv_prime();
    return {l, 13.0 * l * (uv.u - n.u), 13.0 * l * (uv.v - n.v)};
}

ChannelSet to_cieluv(const LinearImage& img) {
    return map_pixels(img, "luv", {"L", "u", "v"}, [](const Rgb& p) {
        const Luv c = rgb_to_luv(p);
        return std::array<double, 3>{c.l, c.u, c.v};
    });
}

ChannelSet convert(const LinearImage& img, Space space) {
    switch (space) {
        case Space::kRg: return to_rg_chromaticity(img);
        case Space::kHsv: return to_hsv(img);
        case Space::kLuv: return to_cieluv(img);
    }
    return to_rg_chromaticity(img);
}

ChannelImage display_channel(const ChannelSet& set, std::string_view name) {
    ChannelImage out = set.channel(name);
    if (set.space == "luv") {
        const bool lightness = name == "L";
        for (double& v : out.data()) v = lightness ? v / 100.0 : (v + 200.0) / 400.0;
    }
    for (double& v : out.data()) v = std::clamp(v, 0.0, 1.0);
    return out;
}

}  // namespace orgb::color
