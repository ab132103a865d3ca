#include "orgb/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <bit>
#include <cctype>
#include <csetjmp>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "orgb/error.hpp"

namespace orgb {
namespace {

constexpr std::uint8_t kPngSignature[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
constexpr char kFloatMagic[] = "PF64";

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

std::uint16_t quantize(double encoded, double max_code) {
    return static_cast<std::uint16_t>(std::floor(clamp01(encoded) * max_code + 0.5));
}

// ---------------------------------------------------------------------------
// libpng plumbing. All state that must survive a longjmp lives in PngState,
// which is owned by the caller, never in locals of the setjmp frame.

struct PngState {
    std::span<const std::uint8_t> input;
    std::size_t pos = 0;
    std::vector<std::uint8_t>* output = nullptr;
    std::string error;

    png_uint_32 width = 0;
    png_uint_32 height = 0;
    int bit_depth = 0;
    int color_type = 0;
    std::size_t rowbytes = 0;
    std::vector<std::uint8_t> pixels;
    std::vector<png_bytep> rows;
};

void png_error_handler(png_structp png, png_const_charp msg) {
    auto* state = static_cast<PngState*>(png_get_error_ptr(png));
    state->error = msg ? msg : "libpng error";
    png_longjmp(png, 1);
}

void png_warning_handler(png_structp, png_const_charp) {}

void png_read_from_memory(png_structp png, png_bytep out, png_size_t length) {
    auto* state = static_cast<PngState*>(png_get_io_ptr(png));
    if (state->pos + length > state->input.size()) {
        png_error(png, "truncated PNG data");
    }
    std::memcpy(out, state->input.data() + state->pos, length);
    state->pos += length;
}

void png_write_to_memory(png_structp png, png_bytep data, png_size_t length) {
    auto* state = static_cast<PngState*>(png_get_io_ptr(png));
    state->output->insert(state->output->end(), data, data + length);
}

void png_flush_noop(png_structp) {}

// Reads the whole image without any transforms except sub-byte unpacking.
bool read_png_raw(PngState& state) {
    png_structp png =
        png_create_read_struct(PNG_LIBPNG_VER_STRING, &state, png_error_handler, png_warning_handler);
    if (!png) {
        state.error = "cannot allocate PNG reader";
        return false;
    }
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        state.error = "cannot allocate PNG info";
        return false;
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        return false;
    }
    png_set_read_fn(png, &state, png_read_from_memory);
    png_read_info(png, info);
    png_get_IHDR(png, info, &state.width, &state.height, &state.bit_depth, &state.color_type, nullptr, nullptr,
                 nullptr);
    if (state.bit_depth < 8) png_set_packing(png);
    png_set_interlace_handling(png);
    png_read_update_info(png, info);
    state.rowbytes = png_get_rowbytes(png, info);
    state.pixels.assign(state.rowbytes * state.height, 0);
    state.rows.resize(state.height);
    for (png_uint_32 y = 0; y < state.height; ++y) state.rows[y] = state.pixels.data() + y * state.rowbytes;
    png_read_image(png, state.rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return true;
}

struct PngWriteSpec {
    int width = 0;
    int height = 0;
    int bit_depth = 8;
    int color_type = PNG_COLOR_TYPE_RGB;
    std::span<const std::uint8_t> packed;  // big-endian samples, rows contiguous
    std::span<const std::array<std::uint8_t, 3>> palette;
};

bool write_png_raw(PngState& state, const PngWriteSpec& spec) {
    png_structp png =
        png_create_write_struct(PNG_LIBPNG_VER_STRING, &state, png_error_handler, png_warning_handler);
    if (!png) {
        state.error = "cannot allocate PNG writer";
        return false;
    }
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        state.error = "cannot allocate PNG info";
        return false;
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        return false;
    }
    png_set_write_fn(png, &state, png_write_to_memory, png_flush_noop);
    png_set_IHDR(png, info, static_cast<png_uint_32>(spec.width), static_cast<png_uint_32>(spec.height),
                 spec.bit_depth, spec.color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    if (spec.color_type == PNG_COLOR_TYPE_PALETTE) {
        std::vector<png_color> plte(spec.palette.size());
        for (std::size_t i = 0; i < plte.size(); ++i) {
            plte[i] = png_color{spec.palette[i][0], spec.palette[i][1], spec.palette[i][2]};
        }
        png_set_PLTE(png, info, plte.data(), static_cast<int>(plte.size()));
    }
    png_write_info(png, info);
    const std::size_t rowbytes = png_get_rowbytes(png, info);
    for (int y = 0; y < spec.height; ++y) {
        png_write_row(png, const_cast<png_bytep>(spec.packed.data() + static_cast<std::size_t>(y) * rowbytes));
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    return true;
}

std::string color_type_name(int color_type) {
    switch (color_type) {
        case PNG_COLOR_TYPE_GRAY: return "grayscale";
        case PNG_COLOR_TYPE_GRAY_ALPHA: return "grayscale+alpha";
        case PNG_COLOR_TYPE_PALETTE: return "palette";
        case PNG_COLOR_TYPE_RGB: return "RGB";
        case PNG_COLOR_TYPE_RGB_ALPHA: return "RGBA";
    }
    return "unknown (" + std::to_string(color_type) + ")";
}

LinearImage decode_png(std::span<const std::uint8_t> bytes) {
    PngState state;
    state.input = bytes;
    if (!read_png_raw(state)) throw Error(ErrorCode::kFormat, "PNG decode failed: " + state.error);

    if (state.color_type != PNG_COLOR_TYPE_RGB && state.color_type != PNG_COLOR_TYPE_RGB_ALPHA) {
        throw Error(ErrorCode::kFormat, "unsupported PNG color type '" + color_type_name(state.color_type) +
                                            "' (expected RGB or RGBA)");
    }
    if (state.bit_depth != 8 && state.bit_depth != 16) {
        throw Error(ErrorCode::kFormat,
                    "unsupported PNG bit depth " + std::to_string(state.bit_depth) + " (expected 8 or 16)");
    }
    const int channels = state.color_type == PNG_COLOR_TYPE_RGB ? 3 : 4;
    const int bytes_per_sample = state.bit_depth / 8;
    const double max_code = state.bit_depth == 16 ? 65535.0 : 255.0;
    const int w = static_cast<int>(state.width);
    const int h = static_cast<int>(state.height);

    std::vector<double> data(static_cast<std::size_t>(w) * h * 3);
    for (int y = 0; y < h; ++y) {
        const std::uint8_t* row = state.rows[y];
        for (int x = 0; x < w; ++x) {
            for (int c = 0; c < 3; ++c) {
                const std::uint8_t* s = row + (static_cast<std::size_t>(x) * channels + c) * bytes_per_sample;
                const unsigned code = bytes_per_sample == 2 ? (static_cast<unsigned>(s[0]) << 8) | s[1] : s[0];
                data[(static_cast<std::size_t>(y) * w + x) * 3 + c] = srgb_decode(code / max_code);
            }
        }
    }
    return LinearImage(w, h, std::move(data));
}

std::vector<std::uint8_t> encode_png_rgb(const LinearImage& img, int depth) {
    const int bps = depth / 8;
    const double max_code = depth == 16 ? 65535.0 : 255.0;
    std::vector<std::uint8_t> packed(img.pixel_count() * 3 * bps);
    const auto src = img.data();
    for (std::size_t i = 0; i < src.size(); ++i) {
        const std::uint16_t q = quantize(srgb_encode(clamp01(src[i])), max_code);
        if (bps == 2) {
            packed[i * 2] = static_cast<std::uint8_t>(q >> 8);
            packed[i * 2 + 1] = static_cast<std::uint8_t>(q & 0xff);
        } else {
            packed[i] = static_cast<std::uint8_t>(q);
        }
    }
    PngWriteSpec spec{img.width(), img.height(), depth, PNG_COLOR_TYPE_RGB, packed, {}};
    std::vector<std::uint8_t> out;
    PngState state;
    state.output = &out;
    if (!write_png_raw(state, spec)) throw Error(ErrorCode::kIo, "PNG encode failed: " + state.error);
    return out;
}

// ---------------------------------------------------------------------------
// PPM P6

class HeaderReader {
public:
    explicit HeaderReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    // Next whitespace-delimited token, skipping '#' comments.
    std::string token() {
        for (;;) {
            while (pos_ < bytes_.size() && std::isspace(bytes_[pos_])) ++pos_;
            if (pos_ < bytes_.size() && bytes_[pos_] == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
                continue;
            }
            break;
        }
        std::string out;
        while (pos_ < bytes_.size() && !std::isspace(bytes_[pos_])) out.push_back(static_cast<char>(bytes_[pos_++]));
        return out;
    }

    long integer(const char* what) {
        const std::string t = token();
        if (t.empty() || !std::all_of(t.begin(), t.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
            throw Error(ErrorCode::kFormat, std::string("malformed header field '") + what + "'");
        }
        return std::stol(t);
    }

    // Consumes the single whitespace byte that separates header from payload.
    std::size_t payload_offset() {
        if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
            throw Error(ErrorCode::kFormat, "missing whitespace before pixel data");
        }
        return pos_ + 1;
    }

private:
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

LinearImage decode_ppm(std::span<const std::uint8_t> bytes) {
    HeaderReader header(bytes);
    if (header.token() != "P6") throw Error(ErrorCode::kFormat, "not a binary PPM (P6)");
    const long w = header.integer("width");
    const long h = header.integer("height");
    const long maxval = header.integer("maxval");
    if (maxval != 255 && maxval != 65535) {
        throw Error(ErrorCode::kFormat, "unsupported PPM maxval " + std::to_string(maxval) + " (expected 255 or 65535)");
    }
    const std::size_t offset = header.payload_offset();
    const int bps = maxval == 65535 ? 2 : 1;
    const std::size_t need = static_cast<std::size_t>(w) * h * 3 * bps;
    if (bytes.size() - offset < need) throw Error(ErrorCode::kFormat, "truncated PPM pixel data");

    std::vector<double> data(static_cast<std::size_t>(w) * h * 3);
    const std::uint8_t* p = bytes.data() + offset;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const unsigned code = bps == 2 ? (static_cast<unsigned>(p[2 * i]) << 8) | p[2 * i + 1] : p[i];
        data[i] = srgb_decode(code / static_cast<double>(maxval));
    }
    return LinearImage(static_cast<int>(w), static_cast<int>(h), std::move(data));
}

std::vector<std::uint8_t> encode_ppm(const LinearImage& img, int depth) {
    const int maxval = depth == 16 ? 65535 : 255;
    const std::string header =
        "P6\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n" + std::to_string(maxval) + "\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    const auto src = img.data();
    out.reserve(out.size() + src.size() * (depth / 8));
    for (double v : src) {
        const std::uint16_t q = quantize(srgb_encode(clamp01(v)), maxval);
        if (depth == 16) out.push_back(static_cast<std::uint8_t>(q >> 8));
        out.push_back(static_cast<std::uint8_t>(q & 0xff));
    }
    return out;
}

// ---------------------------------------------------------------------------
// PF64: "PF64\n<width> <height>\n" followed by little-endian float64 RGB.

LinearImage decode_f64(std::span<const std::uint8_t> bytes) {
    HeaderReader header(bytes);
    if (header.token() != kFloatMagic) throw Error(ErrorCode::kFormat, "not a PF64 float image");
    const long w = header.integer("width");
    const long h = header.integer("height");
    const std::size_t offset = header.payload_offset();
    const std::size_t count = static_cast<std::size_t>(w) * h * 3;
    if (bytes.size() - offset < count * 8) throw Error(ErrorCode::kFormat, "truncated PF64 pixel data");

    std::vector<double> data(count);
    for (std::size_t i = 0; i < count; ++i) {
        std::uint64_t bits = 0;
        for (int b = 7; b >= 0; --b) bits = (bits << 8) | bytes[offset + i * 8 + b];
        data[i] = std::bit_cast<double>(bits);
    }
    return LinearImage(static_cast<int>(w), static_cast<int>(h), std::move(data));
}

std::vector<std::uint8_t> encode_f64(const LinearImage& img) {
    const std::string header =
        std::string(kFloatMagic) + "\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.reserve(out.size() + img.data().size() * 8);
    for (double v : img.data()) {
        const auto bits = std::bit_cast<std::uint64_t>(v);
        for (int b = 0; b < 8; ++b) out.push_back(static_cast<std::uint8_t>(bits >> (8 * b)));
    }
    return out;
}

void check_depth(int depth) {
    if (depth != 8 && depth != 16) {
        throw Error(ErrorCode::kInvalidArgument, "bit depth must be 8 or 16, got " + std::to_string(depth));
    }
}

}  // namespace

double srgb_decode(double c) {
    return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

double srgb_encode(double linear) {
    return linear <= 0.0031308 ? linear * 12.92 : 1.055 * std::pow(linear, 1.0 / 2.4) - 0.055;
}

ImageFormat format_from_path(const std::filesystem::path& path) {
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".png") return ImageFormat::kPng;
    if (ext == ".ppm") return ImageFormat::kPpm;
    if (ext == ".f64") return ImageFormat::kFloat64;
    throw Error(ErrorCode::kFormat, "unsupported image extension '" + ext + "' (expected .png, .ppm or .f64)");
}

LinearImage decode_image(std::span<const std::uint8_t> bytes) {
    if (bytes.size() >= 8 && std::equal(std::begin(kPngSignature), std::end(kPngSignature), bytes.begin())) {
        return decode_png(bytes);
    }
    if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '6') return decode_ppm(bytes);
    if (bytes.size() >= 4 && std::memcmp(bytes.data(), kFloatMagic, 4) == 0) return decode_f64(bytes);
    throw Error(ErrorCode::kFormat, "unrecognized image format (expected PNG, PPM P6 or PF64)");
}

LinearImage load_image(const std::filesystem::path& path) {
    const auto bytes = read_file_bytes(path);
    try {
        return decode_image(bytes);
    } catch (const Error& e) {
        throw Error(e.code(), path.string() + ": " + e.detail());
    }
}

std::vector<std::uint8_t> encode_image(const LinearImage& img, ImageFormat format, int depth) {
    switch (format) {
        case ImageFormat::kPng: check_depth(depth); return encode_png_rgb(img, depth);
        case ImageFormat::kPpm: check_depth(depth); return encode_ppm(img, depth);
        case ImageFormat::kFloat64: return encode_f64(img);
    }
    throw Error(ErrorCode::kInvalidArgument, "unknown image format");
}

void save_image(const LinearImage& img, const std::filesystem::path& path, int depth) {
    write_file_bytes(path, encode_image(img, format_from_path(path), depth));
}

std::vector<std::uint8_t> encode_channel_png(const ChannelImage& ch, int depth) {
    check_depth(depth);
    const int bps = depth / 8;
    const double max_code = depth == 16 ? 65535.0 : 255.0;
    std::vector<std::uint8_t> packed(ch.pixel_count() * bps);
    for (std::size_t i = 0; i < ch.pixel_count(); ++i) {
        const std::uint16_t q = quantize(ch.at(i), max_code);
        if (bps == 2) {
            packed[2 * i] = static_cast<std::uint8_t>(q >> 8);
            packed[2 * i + 1] = static_cast<std::uint8_t>(q & 0xff);
        } else {
            packed[i] = static_cast<std::uint8_t>(q);
        }
    }
    PngWriteSpec spec{ch.width(), ch.height(), depth, PNG_COLOR_TYPE_GRAY, packed, {}};
    std::vector<std::uint8_t> out;
    PngState state;
    state.output = &out;
    if (!write_png_raw(state, spec)) throw Error(ErrorCode::kIo, "PNG encode failed: " + state.error);
    return out;
}

void save_channel_png(const ChannelImage& ch, const std::filesystem::path& path, int depth) {
    write_file_bytes(path, encode_channel_png(ch, depth));
}

std::span<const std::array<std::uint8_t, 3>> label_palette() {
    static const std::vector<std::array<std::uint8_t, 3>> palette = [] {
        std::vector<std::array<std::uint8_t, 3>> p = {
            {0, 0, 0},       {255, 255, 255}, {230, 25, 75},  {60, 180, 75},  {255, 225, 25},  {0, 130, 200},
            {245, 130, 48},  {145, 30, 180},  {70, 240, 240}, {240, 50, 230}, {210, 245, 60},  {250, 190, 212},
            {0, 128, 128},   {220, 190, 255}, {170, 110, 40}, {255, 250, 200}, {128, 0, 0},    {170, 255, 195},
            {128, 128, 0},   {255, 215, 180}, {0, 0, 128},    {128, 128, 128}, {64, 64, 64},   {192, 192, 192},
        };
        // Remaining entries: a deterministic gray ramp.
        for (int i = static_cast<int>(p.size()); i < 256; ++i) {
            const auto g = static_cast<std::uint8_t>(i);
            p.push_back({g, g, g});
        }
        return p;
    }();
    return palette;
}

void save_index_png(int width, int height, std::span<const std::uint8_t> indices, const std::filesystem::path& path) {
    if (indices.size() != static_cast<std::size_t>(width) * height) {
        throw Error(ErrorCode::kDimensionMismatch, "index buffer does not match dimensions");
    }
    PngWriteSpec spec{width, height, 8, PNG_COLOR_TYPE_PALETTE, indices, label_palette()};
    std::vector<std::uint8_t> out;
    PngState state;
    state.output = &out;
    if (!write_png_raw(state, spec)) throw Error(ErrorCode::kIo, "PNG encode failed: " + state.error);
    write_file_bytes(path, out);
}

std::vector<std::uint8_t> load_index_png(const std::filesystem::path& path, int& width, int& height) {
    const auto bytes = read_file_bytes(path);
    PngState state;
    state.input = bytes;
    if (!read_png_raw(state)) throw Error(ErrorCode::kFormat, path.string() + ": PNG decode failed: " + state.error);
    if (state.color_type != PNG_COLOR_TYPE_PALETTE && state.color_type != PNG_COLOR_TYPE_GRAY) {
        throw Error(ErrorCode::kFormat, path.string() + ": unsupported PNG color type '" +
                                            color_type_name(state.color_type) + "' for a label image");
    }
    if (state.bit_depth > 8) {
        throw Error(ErrorCode::kFormat,
                    path.string() + ": unsupported PNG bit depth " + std::to_string(state.bit_depth) + " for a label image");
    }
    width = static_cast<int>(state.width);
    height = static_cast<int>(state.height);
    std::vector<std::uint8_t> out(static_cast<std::size_t>(width) * height);
    for (int y = 0; y < height; ++y) {
        std::memcpy(out.data() + static_cast<std::size_t>(y) * width, state.rows[y], static_cast<std::size_t>(width));
    }
    return out;
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path.string() + "' for reading");
    return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot open '" + path.string() + "' for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorCode::kIo, "write to '" + path.string() + "' failed");
}

}  // namespace orgb
