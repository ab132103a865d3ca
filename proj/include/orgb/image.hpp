#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace orgb {

/// A linear-light RGB triplet [rho1, rho2, rho3].
using Rgb = std::array<double, 3>;

inline double dot(const Rgb& a, const Rgb& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm(const Rgb& a) { return std::sqrt(dot(a, a)); }
inline double channel_sum(const Rgb& a) { return a[0] + a[1] + a[2]; }
inline Rgb operator+(const Rgb& a, const Rgb& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Rgb operator-(const Rgb& a, const Rgb& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Rgb operator*(double s, const Rgb& a) { return {s * a[0], s * a[1], s * a[2]}; }

/// Axis-aligned pixel rectangle. Width and height may extend past the image;
/// clipping is done by the consumer.
struct Rect {
    int x = 0;
    int y = 0;
    int w = 0;
    int h = 0;

    bool operator==(const Rect&) const = default;
};

/// Three-channel float64 image in linear RGB, row-major, interleaved.
class LinearImage {
public:
    LinearImage() = default;
    LinearImage(int width, int height);
    /// Takes ownership of `data`; throws kDimensionMismatch if the length is
    /// not width*height*3 and kInvalidArgument on non-finite values.
    LinearImage(int width, int height, std::vector<double> data);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t pixel_count() const noexcept { return static_cast<std::size_t>(width_) * height_; }
    bool empty() const noexcept { return pixel_count() == 0; }

    Rgb pixel(std::size_t index) const {
        const double* p = data_.data() + index * 3;
        return {p[0], p[1], p[2]};
    }
    Rgb pixel(int x, int y) const { return pixel(static_cast<std::size_t>(y) * width_ + x); }
    void set_pixel(std::size_t index, const Rgb& value) {
        double* p = data_.data() + index * 3;
        p[0] = value[0];
        p[1] = value[1];
        p[2] = value[2];
    }
    void set_pixel(int x, int y, const Rgb& value) { set_pixel(static_cast<std::size_t>(y) * width_ + x, value); }

    std::span<const double> data() const noexcept { return data_; }
    std::span<double> data() noexcept { return data_; }

    bool all_finite() const;
    bool same_size(const LinearImage& other) const noexcept {
        return width_ == other.width_ && height_ == other.height_;
    }

    bool operator==(const LinearImage&) const = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<double> data_;
};

/// Single-channel float64 image (hue, saturation, an edge map, ...).
class ChannelImage {
public:
    ChannelImage() = default;
    ChannelImage(int width, int height, double fill = 0.0);
    ChannelImage(int width, int height, std::vector<double> data);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t pixel_count() const noexcept { return static_cast<std::size_t>(width_) * height_; }

    double at(std::size_t index) const { return data_[index]; }
    double at(int x, int y) const { return data_[static_cast<std::size_t>(y) * width_ + x]; }
    double& at(std::size_t index) { return data_[index]; }
    double& at(int x, int y) { return data_[static_cast<std::size_t>(y) * width_ + x]; }

    std::span<const double> data() const noexcept { return data_; }
    std::span<double> data() noexcept { return data_; }

    bool operator==(const ChannelImage&) const = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<double> data_;
};

/// Boolean pixel membership for one material region.
class RegionMask {
public:
    RegionMask() = default;
    /// All-false mask.
    RegionMask(int width, int height);
    RegionMask(int width, int height, std::vector<std::uint8_t> bits);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t count() const noexcept { return count_; }
    bool empty() const noexcept { return count_ == 0; }

    bool test(std::size_t index) const { return bits_[index] != 0; }
    bool test(int x, int y) const { return bits_[static_cast<std::size_t>(y) * width_ + x] != 0; }
    void set(std::size_t index, bool value);

    /// Row-major indices of the set pixels.
    std::vector<std::size_t> indices() const;
    std::span<const std::uint8_t> bits() const noexcept { return bits_; }

    bool matches(const LinearImage& img) const noexcept {
        return width_ == img.width() && height_ == img.height();
    }

    bool operator==(const RegionMask&) const = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> bits_;
    std::size_t count_ = 0;
};

/// Intersects `r` with the image bounds. Returns a zero-area rect when they
/// do not overlap.
Rect clip_rect(const Rect& r, int width, int height);

/// Mask that is true exactly on the clipped rectangle; kEmptyRegion when the
/// rectangle misses the image.
RegionMask make_mask_rect(const Rect& r, int width, int height);

/// Gathers the masked pixels in row-major order. kDimensionMismatch if the
/// mask does not match the image.
std::vector<Rgb> masked_pixels(const LinearImage& img, const RegionMask& mask);

}  // namespace orgb
