#include <doctest.h>

#include <zlib.h>

#include <cctype>
#include <cmath>
#include <cstring>
#include <limits>
#include <random>
#include <string>

#include "orgb/enhance.hpp"
#include "orgb/error.hpp"
#include "orgb/image.hpp"
#include "orgb/image_io.hpp"
#include "support.hpp"

using namespace orgb;
using orgb::test::TempDir;

namespace {

// Minimal PNG writer built on zlib only, so decoding is checked against a
// file the library did not produce.
void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int s = 24; s >= 0; s -= 8) out.push_back(static_cast<std::uint8_t>(v >> s));
}

void put_chunk(std::vector<std::uint8_t>& out, const char* type, const std::vector<std::uint8_t>& data) {
    put_u32(out, static_cast<std::uint32_t>(data.size()));
    std::vector<std::uint8_t> body(type, type + 4);
    body.insert(body.end(), data.begin(), data.end());
    out.insert(out.end(), body.begin(), body.end());
    put_u32(out, static_cast<std::uint32_t>(crc32(0, body.data(), static_cast<uInt>(body.size()))));
}

std::vector<std::uint8_t> raw_png(int w, int h, int bit_depth, int color_type, const std::vector<std::uint8_t>& samples,
                                  const std::vector<std::uint8_t>& plte = {}) {
    const std::size_t row_bytes = samples.size() / static_cast<std::size_t>(h);
    std::vector<std::uint8_t> filtered;
    for (int y = 0; y < h; ++y) {
        filtered.push_back(0);
        filtered.insert(filtered.end(), samples.begin() + static_cast<long>(y * row_bytes),
                        samples.begin() + static_cast<long>((y + 1) * row_bytes));
    }
    uLongf zlen = compressBound(static_cast<uLong>(filtered.size()));
    std::vector<std::uint8_t> z(zlen);
    REQUIRE(compress(z.data(), &zlen, filtered.data(), static_cast<uLong>(filtered.size())) == Z_OK);
    z.resize(zlen);

    std::vector<std::uint8_t> out{0x89, 'P', 'N', 'G', 0x0D, 0x0A, 0x1A, 0x0A};
    std::vector<std::uint8_t> ihdr;
    put_u32(ihdr, static_cast<std::uint32_t>(w));
    put_u32(ihdr, static_cast<std::uint32_t>(h));
    ihdr.insert(ihdr.end(), {static_cast<std::uint8_t>(bit_depth), static_cast<std::uint8_t>(color_type), 0, 0, 0});
    put_chunk(out, "IHDR", ihdr);
    if (!plte.empty()) put_chunk(out, "PLTE", plte);
    put_chunk(out, "IDAT", z);
    put_chunk(out, "IEND", {});
    return out;
}

// Hand parser for 16-bit P6 files: returns the raw code values.
std::vector<unsigned> ppm16_codes(const std::vector<std::uint8_t>& bytes) {
    std::size_t pos = 0;
    int fields = 0;
    while (fields < 4) {
        while (std::isspace(bytes[pos])) ++pos;
        while (!std::isspace(bytes[pos])) ++pos;
        ++fields;
    }
    ++pos;
    std::vector<unsigned> codes;
    for (; pos + 1 < bytes.size(); pos += 2) codes.push_back((static_cast<unsigned>(bytes[pos]) << 8) | bytes[pos + 1]);
    return codes;
}

std::string error_text(const auto& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST_SUITE("image types") {
    TEST_CASE("linear image validates length and finiteness") {
        CHECK_THROWS_AS(LinearImage(2, 2, std::vector<double>(11)), Error);
        std::vector<double> bad(12, 0.5);
        bad[7] = std::numeric_limits<double>::quiet_NaN();
        try {
            LinearImage(2, 2, bad);
            FAIL("expected an error");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::kInvalidArgument);
        }
        const LinearImage img(3, 2);
        CHECK(img.data().size() == 18);
        CHECK(img.all_finite());
    }

    TEST_CASE("rectangle masks clip to the image") {
        CHECK(make_mask_rect({0, 0, 2, 2}, 4, 4).count() == 4);
        const RegionMask clipped = make_mask_rect({3, 3, 5, 5}, 4, 4);
        CHECK(clipped.count() == 1);
        CHECK(clipped.test(3, 3));
        try {
            make_mask_rect({10, 10, 2, 2}, 4, 4);
            FAIL("expected empty-region");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::kEmptyRegion);
            CHECK(std::string(e.what()).starts_with("empty-region"));
        }
        CHECK(make_mask_rect({-3, 1, 5, 2}, 4, 4).count() == 4);
    }

    TEST_CASE("mask count tracks set bits") {
        RegionMask m(3, 3);
        m.set(4, true);
        m.set(4, true);
        m.set(0, true);
        CHECK(m.count() == 2);
        m.set(4, false);
        CHECK(m.count() == 1);
        CHECK(m.indices() == std::vector<std::size_t>{0});
    }

    TEST_CASE("masked pixels reject a mismatched mask") {
        const LinearImage img(4, 4);
        try {
            masked_pixels(img, RegionMask(3, 4));
            FAIL("expected dimension-mismatch");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::kDimensionMismatch);
        }
    }
}

TEST_SUITE("transfer curve") {
    TEST_CASE("sRGB decode of 128/255") {
        // ((128/255 + 0.055) / 1.055)^2.4 evaluated in double precision.
        CHECK(srgb_decode(128.0 / 255.0) == doctest::Approx(0.21586050011389926).epsilon(1e-14));
        CHECK(srgb_decode(0.0) == 0.0);
        CHECK(srgb_decode(1.0) == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(srgb_decode(0.04) == doctest::Approx(0.04 / 12.92).epsilon(1e-15));
    }

    TEST_CASE("encode inverts decode") {
        for (int i = 0; i <= 1000; ++i) {
            const double c = i / 1000.0;
            CHECK(srgb_encode(srgb_decode(c)) == doctest::Approx(c).epsilon(1e-12));
        }
    }
}

TEST_SUITE("image io") {
    TEST_CASE("8-bit PNG pixels decode through the sRGB curve") {
        const auto white = raw_png(1, 1, 8, 2, {255, 255, 255});
        const auto black = raw_png(1, 1, 8, 2, {0, 0, 0});
        const auto gray = raw_png(1, 1, 8, 2, {128, 128, 128});
        CHECK(decode_image(white).pixel(0) == Rgb{1.0, 1.0, 1.0});
        CHECK(decode_image(black).pixel(0) == Rgb{0.0, 0.0, 0.0});
        for (double v : decode_image(gray).pixel(0)) CHECK(v == doctest::Approx(0.21586050011389926).epsilon(1e-14));
    }

    TEST_CASE("RGBA drops alpha and 16-bit codes use the full range") {
        const auto rgba = raw_png(2, 1, 8, 6, {255, 0, 0, 7, 0, 0, 255, 255});
        const LinearImage a = decode_image(rgba);
        CHECK(a.pixel(0) == Rgb{1.0, 0.0, 0.0});
        CHECK(a.pixel(1) == Rgb{0.0, 0.0, 1.0});

        // codes 65535, 0, 32768 big-endian
        const auto deep = raw_png(1, 1, 16, 2, {0xFF, 0xFF, 0x00, 0x00, 0x80, 0x00});
        const Rgb p = decode_image(deep).pixel(0);
        CHECK(p[0] == 1.0);
        CHECK(p[1] == 0.0);
        CHECK(p[2] == doctest::Approx(std::pow((32768.0 / 65535.0 + 0.055) / 1.055, 2.4)).epsilon(1e-14));
    }

    TEST_CASE("unsupported PNG layouts name the property") {
        const auto palette = raw_png(1, 1, 8, 3, {0}, {10, 20, 30});
        const std::string p = error_text([&] { decode_image(palette); });
        CHECK(p.starts_with("format"));
        CHECK(p.find("palette") != std::string::npos);

        const auto gray4 = raw_png(2, 1, 4, 0, {0x1F});
        const std::string g = error_text([&] { decode_image(gray4); });
        CHECK(g.find("grayscale") != std::string::npos);

        const std::vector<std::uint8_t> junk{'G', 'I', 'F', '8', '9', 'a'};
        CHECK(error_text([&] { decode_image(junk); }).starts_with("format"));
    }

    TEST_CASE("missing file is an io error") {
        CHECK(error_text([] { load_image("/nonexistent/dir/x.png"); }).starts_with("io"));
    }

    TEST_CASE("16-bit PNG round trip stays within one code") {
        TempDir tmp;
        const LinearImage img = orgb::test::random_image(37, 23, 11);
        save_image(img, tmp / "r.png", 16);
        const LinearImage back = load_image(tmp / "r.png");
        // one code step is 1/65535 in encoded space; the decode slope is at
        // most 1/12.92 near black and ~2.4 near white
        const double bound = 2.4 / 65535.0;
        CHECK(orgb::test::max_abs_diff(img, back) <= bound);
        CHECK(orgb::test::max_abs_diff(img, back) <= 2e-4);
    }

    TEST_CASE("8-bit PNG round trip stays within one code") {
        TempDir tmp;
        const LinearImage img = orgb::test::random_image(16, 16, 12);
        save_image(img, tmp / "r8.png", 8);
        CHECK(orgb::test::max_abs_diff(img, load_image(tmp / "r8.png")) <= 2.4 / 255.0);
    }

    TEST_CASE("encode clamps before quantizing") {
        const LinearImage img(1, 1, {-0.2, 0.5, 1.3});
        const auto codes = ppm16_codes(encode_image(img, ImageFormat::kPpm, 16));
        REQUIRE(codes.size() == 3);
        CHECK(codes[0] == 0u);
        CHECK(codes[1] == 48192u);  // floor(65535 * encode(0.5) + 0.5)
        CHECK(codes[2] == 65535u);

        const LinearImage png_back = decode_image(encode_image(img, ImageFormat::kPng, 16));
        CHECK(png_back.pixel(0)[0] == 0.0);
        CHECK(png_back.pixel(0)[1] == doctest::Approx(srgb_decode(48192.0 / 65535.0)).epsilon(1e-15));
        CHECK(png_back.pixel(0)[2] == 1.0);
    }

    TEST_CASE("all-zero image writes all-zero samples") {
        const auto codes = ppm16_codes(encode_image(LinearImage(5, 4), ImageFormat::kPpm, 16));
        CHECK(codes.size() == 60);
        for (unsigned c : codes) CHECK(c == 0u);
        const LinearImage back = decode_image(encode_image(LinearImage(5, 4), ImageFormat::kPng, 8));
        for (double v : back.data()) CHECK(v == 0.0);
    }

    TEST_CASE("PPM round trip at both depths") {
        TempDir tmp;
        const LinearImage img = orgb::test::random_image(9, 7, 5);
        save_image(img, tmp / "a.ppm", 16);
        save_image(img, tmp / "b.ppm", 8);
        CHECK(orgb::test::max_abs_diff(img, load_image(tmp / "a.ppm")) <= 2.4 / 65535.0);
        CHECK(orgb::test::max_abs_diff(img, load_image(tmp / "b.ppm")) <= 2.4 / 255.0);
    }

    TEST_CASE("PPM header errors") {
        const std::string bad_max = "P6\n1 1\n1023\n\x01\x02\x03\x04\x05\x06";
        const std::vector<std::uint8_t> a(bad_max.begin(), bad_max.end());
        CHECK(error_text([&] { decode_image(a); }).find("maxval 1023") != std::string::npos);
        const std::string truncated = "P6\n2 2\n255\n\x01\x02\x03";
        const std::vector<std::uint8_t> b(truncated.begin(), truncated.end());
        CHECK(error_text([&] { decode_image(b); }).find("truncated") != std::string::npos);
    }

    TEST_CASE("float container is bit exact, including out-of-range values") {
        TempDir tmp;
        const LinearImage img(2, 1, {-0.25, 1e-300, 0.1, 1.75, 3.0, 1.0 / 3.0});
        save_image(img, tmp / "x.f64");
        CHECK(load_image(tmp / "x.f64") == img);
    }

    TEST_CASE("format follows the extension") {
        CHECK(format_from_path("a/b.PNG") == ImageFormat::kPng);
        CHECK(format_from_path("x.ppm") == ImageFormat::kPpm);
        CHECK(format_from_path("x.f64") == ImageFormat::kFloat64);
        CHECK(error_text([] { format_from_path("x.jpg"); }).starts_with("format"));
    }

    TEST_CASE("index PNG round trip") {
        TempDir tmp;
        const std::vector<std::uint8_t> idx{0, 1, 2, 23, 0, 5};
        save_index_png(3, 2, idx, tmp / "l.png");
        int w = 0;
        int h = 0;
        CHECK(load_index_png(tmp / "l.png", w, h) == idx);
        CHECK(w == 3);
        CHECK(h == 2);
    }

    TEST_CASE("channel PNG stores values without a transfer curve") {
        const ChannelImage ch(3, 1, {0.0, 0.5, 2.0});
        const auto png = encode_channel_png(ch, 8);
        // decode as an 8-bit gray index image
        TempDir tmp;
        write_file_bytes(tmp / "c.png", png);
        int w = 0;
        int h = 0;
        CHECK(load_index_png(tmp / "c.png", w, h) == std::vector<std::uint8_t>{0, 128, 255});
    }
}

TEST_SUITE("enhance") {
    TEST_CASE("constant image equalizes to 1") {
        const ChannelImage eq = histogram_equalize(ChannelImage(4, 4, 0.3));
        for (double v : eq.data()) CHECK(v == 1.0);
    }

    TEST_CASE("two-value image equalizes to half and one") {
        ChannelImage ch(4, 2);
        for (std::size_t i = 0; i < 8; ++i) ch.at(i) = i < 4 ? 0.1 : 0.9;
        const ChannelImage eq = histogram_equalize(ch);
        for (std::size_t i = 0; i < 8; ++i) CHECK(eq.at(i) == (i < 4 ? 0.5 : 1.0));
    }

    TEST_CASE("uniform histogram maps close to identity") {
        ChannelImage ch(256, 1);
        for (int b = 0; b < 256; ++b) ch.at(static_cast<std::size_t>(b)) = (b + 0.5) / 256.0;
        const ChannelImage eq = histogram_equalize(ch);
        for (std::size_t i = 0; i < 256; ++i) CHECK(std::abs(eq.at(i) - ch.at(i)) <= 1.0 / 256.0);
    }

    TEST_CASE("equalization preserves rank order") {
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> u(-0.2, 1.2);
        ChannelImage ch(50, 40);
        for (double& v : ch.data()) v = u(rng);
        for (int bins : {2, 7, 256}) {
            const ChannelImage eq = histogram_equalize(ch, bins);
            for (std::size_t i = 0; i < 400; ++i) {
                for (std::size_t j = 0; j < 400; ++j) {
                    if (ch.at(i) <= ch.at(j)) CHECK(eq.at(i) <= eq.at(j));
                }
            }
        }
        CHECK_THROWS_AS(histogram_equalize(ch, 1), Error);
    }

    TEST_CASE("invert") {
        const ChannelImage ch(3, 1, {0.25, 0.0, 1.0});
        const ChannelImage inv = invert(ch);
        CHECK(inv.at(std::size_t{0}) == 0.75);
        CHECK(inv.at(std::size_t{1}) == 1.0);
        CHECK(inv.at(std::size_t{2}) == 0.0);
        CHECK(invert(ChannelImage(1, 1, {-0.5})).at(std::size_t{0}) == 1.0);
    }

    TEST_CASE("invert is an involution") {
        ChannelImage dyadic(1024, 1);
        for (std::size_t i = 0; i < 1024; ++i) dyadic.at(i) = static_cast<double>(i * 64) / 65536.0;
        CHECK(invert(invert(dyadic)) == dyadic);

        std::mt19937_64 rng(9);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        ChannelImage any(1000, 1);
        for (double& v : any.data()) v = u(rng);
        const ChannelImage twice = invert(invert(any));
        for (std::size_t i = 0; i < 1000; ++i) CHECK(std::abs(twice.at(i) - any.at(i)) <= 0x1p-53);
    }
}
