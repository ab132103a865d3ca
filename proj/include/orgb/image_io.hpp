#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "orgb/image.hpp"

namespace orgb {

// sRGB transfer curve (IEC 61966-2-1 piecewise form).
double srgb_decode(double c);
double srgb_encode(double linear);

enum class ImageFormat { kPng, kPpm, kFloat64 };

/// Picks the format from the file extension: .png, .ppm, .f64.
ImageFormat format_from_path(const std::filesystem::path& path);

/// Reads PNG (8/16-bit RGB or RGBA), PPM P6 (maxval 255 or 65535) or a PF64
/// float container. Integer formats are sRGB-decoded to linear; PF64 is
/// already linear and is loaded bit-exact. The format is sniffed from the
/// leading bytes, not the extension.
LinearImage load_image(const std::filesystem::path& path);
LinearImage decode_image(std::span<const std::uint8_t> bytes);

/// Writes by extension. Integer formats clamp to [0,1], sRGB-encode and
/// quantize round-half-up at `depth` bits (8 or 16). PF64 stores the raw
/// doubles and ignores `depth`.
void save_image(const LinearImage& img, const std::filesystem::path& path, int depth = 16);
std::vector<std::uint8_t> encode_image(const LinearImage& img, ImageFormat format, int depth = 16);

/// Grayscale PNG of a channel. Values are clamped to [0,1] and written as-is
/// (no transfer curve): channel images are display data, not radiometry.
void save_channel_png(const ChannelImage& ch, const std::filesystem::path& path, int depth = 8);
std::vector<std::uint8_t> encode_channel_png(const ChannelImage& ch, int depth = 8);

/// Palette-indexed PNG (labels, binary masks). Each index must be < 256.
void save_index_png(int width, int height, std::span<const std::uint8_t> indices,
                    const std::filesystem::path& path);
/// Reads a palette PNG's raw indices, or an 8-bit grayscale PNG's values.
std::vector<std::uint8_t> load_index_png(const std::filesystem::path& path, int& width, int& height);

/// The fixed palette used for label images.
std::span<const std::array<std::uint8_t, 3>> label_palette();

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace orgb
