#include "orgb/image.hpp"

#include <algorithm>
#include <string>

#include "orgb/error.hpp"

namespace orgb {
namespace {

void check_dims(int width, int height) {
    if (width < 0 || height < 0) {
        throw Error(ErrorCode::kInvalidArgument,
                    "negative image dimensions " + std::to_string(width) + "x" + std::to_string(height));
    }
}

}  // namespace

LinearImage::LinearImage(int width, int height) : width_(width), height_(height) {
    check_dims(width, height);
    data_.assign(pixel_count() * 3, 0.0);
}

LinearImage::LinearImage(int width, int height, std::vector<double> data)
    : width_(width), height_(height), data_(std::move(data)) {
    check_dims(width, height);
    if (data_.size() != pixel_count() * 3) {
        throw Error(ErrorCode::kDimensionMismatch,
                    "image data length " + std::to_string(data_.size()) + " does not match " +
                        std::to_string(width) + "x" + std::to_string(height) + "x3");
    }
    if (!all_finite()) {
        throw Error(ErrorCode::kInvalidArgument, "image contains non-finite values");
    }
}

bool LinearImage::all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

ChannelImage::ChannelImage(int width, int height, double fill) : width_(width), height_(height) {
    check_dims(width, height);
    data_.assign(pixel_count(), fill);
}

ChannelImage::ChannelImage(int width, int height, std::vector<double> data)
    : width_(width), height_(height), data_(std::move(data)) {
    check_dims(width, height);
    if (data_.size() != pixel_count()) {
        throw Error(ErrorCode::kDimensionMismatch, "channel data length does not match dimensions");
    }
}

RegionMask::RegionMask(int width, int height) : width_(width), height_(height) {
    check_dims(width, height);
    bits_.assign(static_cast<std::size_t>(width) * height, 0);
}

RegionMask::RegionMask(int width, int height, std::vector<std::uint8_t> bits)
    : width_(width), height_(height), bits_(std::move(bits)) {
    check_dims(width, height);
    if (bits_.size() != static_cast<std::size_t>(width) * height) {
        throw Error(ErrorCode::kDimensionMismatch, "mask length does not match dimensions");
    }
    for (auto& b : bits_) {
        b = b ? 1 : 0;
        count_ += b;
    }
}

void RegionMask::set(std::size_t index, bool value) {
    const std::uint8_t v = value ? 1 : 0;
    if (bits_[index] != v) {
        count_ = value ? count_ + 1 : count_ - 1;
        bits_[index] = v;
    }
}

std::vector<std::size_t> RegionMask::indices() const {
    std::vector<std::size_t> out;
    out.reserve(count_);
    for (std::size_t i = 0; i < bits_.size(); ++i) {
        if (bits_[i]) out.push_back(i);
    }
    return out;
}

Rect clip_rect(const Rect& r, int width, int height) {
    const long x0 = std::max<long>(r.x, 0);
    const long y0 = std::max<long>(r.y, 0);
    const long x1 = std::min<long>(static_cast<long>(r.x) + std::max(r.w, 0), width);
    const long y1 = std::min<long>(static_cast<long>(r.y) + std::max(r.h, 0), height);
    if (x1 <= x0 || y1 <= y0) return Rect{static_cast<int>(x0), static_cast<int>(y0), 0, 0};
    return Rect{static_cast<int>(x0), static_cast<int>(y0), static_cast<int>(x1 - x0), static_cast<int>(y1 - y0)};
}

RegionMask make_mask_rect(const Rect& r, int width, int height) {
    const Rect c = clip_rect(r, width, height);
    if (c.w == 0 || c.h == 0) {
        throw Error(ErrorCode::kEmptyRegion,
                    "rectangle " + std::to_string(r.x) + "," + std::to_string(r.y) + "," + std::to_string(r.w) +
                        "," + std::to_string(r.h) + " does not intersect the " + std::to_string(width) + "x" +
                        std::to_string(height) + " image");
    }
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(width) * height, 0);
    for (int y = c.y; y < c.y + c.h; ++y) {
        std::fill_n(bits.begin() + static_cast<std::ptrdiff_t>(y) * width + c.x, c.w, 1);
    }
    return RegionMask(width, height, std::move(bits));
}

std::vector<Rgb> masked_pixels(const LinearImage& img, const RegionMask& mask) {
    if (!mask.matches(img)) {
        throw Error(ErrorCode::kDimensionMismatch, "mask " + std::to_string(mask.width()) + "x" +
                                                       std::to_string(mask.height()) + " does not match image " +
                                                       std::to_string(img.width()) + "x" +
                                                       std::to_string(img.height()));
    }
    std::vector<Rgb> out;
    out.reserve(mask.count());
    for (std::size_t i = 0; i < img.pixel_count(); ++i) {
        if (mask.test(i)) out.push_back(img.pixel(i));
    }
    return out;
}

}  // namespace orgb
