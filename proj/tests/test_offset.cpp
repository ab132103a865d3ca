#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "orgb/error.hpp"
#include "orgb/offset.hpp"
#include "orgb/offset_io.hpp"
#include "orgb/spectral.hpp"
#include "support.hpp"

using namespace orgb;

namespace {

const Rgb kDir{0.6, 0.3, 0.1};
const Rgb kDelta{0.05, 0.08, 0.12};

ErrorCode code_of(const auto& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an orgb::Error");
    return ErrorCode::kIo;
}

// Closed-form convergence offset on the plane sum(rho) = 0 for a line
// delta + s*k with sum(k) = 1.
Rgb gauge_oracle(const Rgb& k, const Rgb& delta) {
    const double sd = channel_sum(delta);
    return {delta[0] - k[0] * sd, delta[1] - k[1] * sd, delta[2] - k[2] * sd};
}

Rgb unit(const Rgb& v) { return (1.0 / norm(v)) * v; }

double angle_between(const Rgb& a, const Rgb& b) {
    const double c = std::abs(dot(a, b)) / (norm(a) * norm(b));
    const Rgb cross{a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
    return std::atan2(norm(cross), c * norm(a) * norm(b));
}

sim::SceneSpec chart(double ambient) {
    sim::LightingConfig cfg = sim::default_lighting(0.75, ambient);
    cfg.occlusion.kind = sim::Occlusion::kHalfGradient;
    return sim::make_colorchecker_scene(cfg);
}

}  // namespace

TEST_SUITE("channel fit") {
    TEST_CASE("exact line recovers slope and intercept") {
        std::vector<double> sums;
        std::array<std::vector<double>, 3> rho;
        for (int i = 2; i <= 10; ++i) {
            const Rgb p = kDelta + (i / 10.0) * kDir;
            sums.push_back(channel_sum(p));
            for (int k = 0; k < 3; ++k) rho[k].push_back(p[k]);
        }
        const ChannelFit f = fit_channel_line(sums, rho[0]);
        CHECK(f.slope == doctest::Approx(0.6).epsilon(1e-12));
        CHECK(f.intercept == doctest::Approx(-0.10).epsilon(1e-12));
        CHECK(f.r2 == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(f.n == 9);
        const Rgb oracle = gauge_oracle(kDir, kDelta);
        for (int k = 0; k < 3; ++k) CHECK(std::abs(fit_channel_line(sums, rho[k]).intercept - oracle[k]) < 1e-12);
    }

    TEST_CASE("identical samples are a flat region") {
        const std::vector<double> x(20, 0.4);
        const std::vector<double> y(20, 0.1);
        try {
            fit_channel_line(x, y);
            FAIL("expected flat-region");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::kFlatRegion);
            CHECK(std::string(e.what()).starts_with("flat-region"));
            CHECK(std::string(e.what()).find("shadow") != std::string::npos);
        }
        CHECK(code_of([&] { fit_channel_line(x, y, FitMethod::kTheilSen); }) == ErrorCode::kFlatRegion);
    }

    TEST_CASE("fewer than eight samples are rejected") {
        const std::vector<double> x{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7};
        CHECK(code_of([&] { fit_channel_line(x, x); }) == ErrorCode::kEmptyRegion);
    }

    TEST_CASE("data through the origin has zero intercept") {
        std::vector<double> x;
        std::vector<double> y;
        for (int i = 1; i <= 50; ++i) {
            const Rgb p = (i / 37.0) * Rgb{0.21, 0.33, 0.12};
            x.push_back(channel_sum(p));
            y.push_back(p[1]);
        }
        CHECK(std::abs(fit_channel_line(x, y).intercept) < 1e-9);
    }

    TEST_CASE("OLS agrees with an uncentered long double fit") {
        std::mt19937_64 rng(17);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int trial = 0; trial < 20; ++trial) {
            std::vector<double> x(200);
            std::vector<double> y(200);
            for (int i = 0; i < 200; ++i) {
                x[i] = 3.0 * u(rng);
                y[i] = 0.2 * x[i] + 0.3 * u(rng) - 0.1;
            }
            const auto oracle = orgb::test::ols_oracle(x, y);
            const ChannelFit f = fit_channel_line(x, y);
            CHECK(f.slope == doctest::Approx(static_cast<double>(oracle.slope)).epsilon(1e-11));
            CHECK(std::abs(f.intercept - static_cast<double>(oracle.intercept)) < 1e-12);
            CHECK(f.r2 >= 0.0);
            CHECK(f.r2 <= 1.0);
        }
    }

    TEST_CASE("Theil-Sen ignores a minority of outliers") {
        std::vector<double> x;
        std::vector<double> y;
        for (int i = 0; i < 60; ++i) {
            x.push_back(0.3 + i * 0.01);
            y.push_back(0.4 * x.back() - 0.05);
        }
        for (int i = 0; i < 6; ++i) {
            x.push_back(0.5 + i * 0.02);
            y.push_back(0.9);
        }
        const ChannelFit ts = fit_channel_line(x, y, FitMethod::kTheilSen);
        const ChannelFit ols = fit_channel_line(x, y, FitMethod::kOls);
        CHECK(ts.slope == doctest::Approx(0.4).epsilon(1e-9));
        CHECK(ts.intercept == doctest::Approx(-0.05).epsilon(1e-9));
        CHECK(std::abs(ols.intercept + 0.05) > 1e-3);
    }

    TEST_CASE("Theil-Sen sampling is deterministic") {
        std::mt19937_64 rng(5);
        std::normal_distribution<double> noise(0.0, 0.01);
        std::vector<double> x(400);
        std::vector<double> y(400);
        for (int i = 0; i < 400; ++i) {
            x[i] = i / 400.0;
            y[i] = 0.5 * x[i] + noise(rng);
        }
        const ChannelFit a = fit_channel_line(x, y, FitMethod::kTheilSen);
        const ChannelFit b = fit_channel_line(x, y, FitMethod::kTheilSen);
        CHECK(a.slope == b.slope);
        CHECK(a.intercept == b.intercept);
        CHECK(a.slope == doctest::Approx(0.5).epsilon(0.02));
    }

    TEST_CASE("method names") {
        CHECK(parse_fit_method("ols") == FitMethod::kOls);
        CHECK(parse_fit_method("theil-sen") == FitMethod::kTheilSen);
        CHECK(fit_method_name(FitMethod::kTheilSen) == "theil-sen");
        CHECK(code_of([] { parse_fit_method("ransac"); }) == ErrorCode::kInvalidArgument);
    }
}

TEST_SUITE("estimate epsilon") {
    TEST_CASE("no environment light gives zero offset") {
        const sim::SceneSpec scene = chart(0.0);
        const sim::RenderedScene r = sim::render(scene);
        for (const sim::Patch& p : scene.patches) {
            const Epsilon e = estimate_epsilon(r.image, p.mask);
            for (double v : e.eps) CHECK(std::abs(v) < 1e-9);
        }
    }

    TEST_CASE("single-material line gives the closed form") {
        const LinearImage img = sim::make_line_image({});
        const Epsilon e = estimate_epsilon(img, Rect{0, 0, 100, 100});
        const Rgb oracle = gauge_oracle(kDir, kDelta);
        CHECK(std::abs(oracle[0] - -0.10) < 1e-15);
        CHECK(std::abs(oracle[1] - 0.005) < 1e-15);
        CHECK(std::abs(oracle[2] - 0.095) < 1e-15);
        for (int k = 0; k < 3; ++k) CHECK(std::abs(e.eps[k] - oracle[k]) < 1e-9);
        REQUIRE(e.rect.has_value());
        CHECK(*e.rect == Rect{0, 0, 100, 100});
        for (const ChannelFit& f : e.fits) CHECK(f.n == 10000);
    }

    TEST_CASE("noisy line stays within 0.01 of the closed form") {
        const Rgb oracle = gauge_oracle(kDir, kDelta);
        int within = 0;
        double worst = 0.0;
        for (std::uint64_t seed = 1; seed <= 100; ++seed) {
            sim::LineImageConfig cfg;
            cfg.noise = {0.005, seed};
            const Epsilon e = estimate_epsilon(sim::make_line_image(cfg), Rect{0, 0, 100, 100});
            double dev = 0.0;
            for (int k = 0; k < 3; ++k) dev = std::max(dev, std::abs(e.eps[k] - oracle[k]));
            worst = std::max(worst, dev);
            if (dev < 0.01) ++within;
        }
        MESSAGE("noisy epsilon: " << within << "/100 seeds within 0.01, worst deviation " << worst);
        CHECK(within >= 95);
    }

    TEST_CASE("regression identities hold on arbitrary regions") {
        std::mt19937_64 rng(99);
        for (int trial = 0; trial < 100; ++trial) {
            const LinearImage img = orgb::test::random_image(40, 30, rng());
            std::uniform_int_distribution<int> px(0, 36);
            std::uniform_int_distribution<int> py(0, 26);
            const Rect r{px(rng), py(rng), 4 + px(rng) % 10, 4 + py(rng) % 10};
            const Epsilon e = estimate_epsilon(img, r);
            CHECK(std::abs(e.fits[0].slope + e.fits[1].slope + e.fits[2].slope - 1.0) <= 1e-9);
            CHECK(std::abs(e.eps[0] + e.eps[1] + e.eps[2]) <= 1e-9);
        }
    }

    TEST_CASE("mask estimates record a digest") {
        const LinearImage img = sim::make_line_image({});
        RegionMask m(100, 100);
        for (std::size_t i = 0; i < 10000; i += 3) m.set(i, true);
        const Epsilon e = estimate_epsilon(img, m);
        CHECK_FALSE(e.rect.has_value());
        CHECK(e.mask_digest == mask_digest(m));
        CHECK(e.mask_digest.starts_with("fnv1a64:"));
        CHECK(code_of([&] { estimate_epsilon(img, RegionMask(10, 10)); }) == ErrorCode::kDimensionMismatch);
    }

    TEST_CASE("flat rectangle") {
        const LinearImage img(20, 20, std::vector<double>(1200, 0.3));
        CHECK(code_of([&] { estimate_epsilon(img, Rect{0, 0, 10, 10}); }) == ErrorCode::kFlatRegion);
        CHECK(code_of([&] { estimate_epsilon(img, Rect{0, 0, 2, 2}); }) == ErrorCode::kEmptyRegion);
    }
}

TEST_SUITE("correction") {
    TEST_CASE("worked example") {
        const LinearImage img(1, 1, {0.5, 0.5, 0.5});
        const Rgb out = correct(img, Rgb{0.1, 0.2, 0.25}).pixel(0);
        CHECK(out[0] == doctest::Approx(0.4 / 0.9).epsilon(1e-15));
        CHECK(out[1] == doctest::Approx(0.375).epsilon(1e-15));
        CHECK(out[2] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    }

    TEST_CASE("fixed points") {
        const LinearImage img = orgb::test::random_image(8, 8, 1);
        CHECK(correct(img, Rgb{0, 0, 0}) == img);
        const Rgb eps{0.1, -0.2, 0.35};
        CHECK(correct(LinearImage(1, 1, {eps[0], eps[1], eps[2]}), eps).pixel(0) == Rgb{0.0, 0.0, 0.0});
        CHECK(correct(LinearImage(1, 1, {1.0, 1.0, 1.0}), eps).pixel(0) == Rgb{1.0, 1.0, 1.0});
        CHECK(uncorrect(LinearImage(1, 1), eps).pixel(0) == eps);
        CHECK(uncorrect(LinearImage(1, 1, {1.0, 1.0, 1.0}), eps).pixel(0) == Rgb{1.0, 1.0, 1.0});
    }

    TEST_CASE("values are not clamped") {
        const Rgb out = correct(LinearImage(1, 1, {0.0, 1.5, 0.2}), Rgb{0.1, 0.1, 0.1}).pixel(0);
        CHECK(out[0] < 0.0);
        CHECK(out[1] > 1.0);
    }

    TEST_CASE("uncorrect inverts correct") {
        const LinearImage img = orgb::test::random_image(50, 40, 2, -0.1, 1.1);
        const Rgb eps{0.12, -0.07, 0.4};
        CHECK(orgb::test::max_abs_diff(uncorrect(correct(img, eps), eps), img) < 1e-12);
        CHECK(orgb::test::max_abs_diff(correct(uncorrect(img, eps), eps), img) < 1e-12);
    }

    TEST_CASE("invalid epsilon") {
        const LinearImage img(1, 1);
        CHECK(code_of([&] { correct(img, Rgb{1.0, 0.0, 0.0}); }) == ErrorCode::kInvalidEpsilon);
        CHECK(code_of([&] { correct(img, Rgb{0.0, 1.2, 0.0}); }) == ErrorCode::kInvalidEpsilon);
        CHECK(code_of([&] { uncorrect(img, Rgb{0.0, 0.0, std::numeric_limits<double>::quiet_NaN()}); }) ==
              ErrorCode::kInvalidEpsilon);
    }
}

TEST_SUITE("color lines") {
    TEST_CASE("points on a line") {
        const Rgb origin{0.2, 0.1, 0.05};
        const Rgb d = unit(kDir);
        std::vector<Rgb> pts;
        for (int i = 0; i < 40; ++i) pts.push_back(origin + (i * 0.013 - 0.1) * d);
        const ColorLine line = fit_color_line(pts);
        CHECK(angle_between(line.direction, d) < 1e-9);
        CHECK(line.rms_residual < 1e-12);
        CHECK(std::abs(norm(line.direction) - 1.0) <= 1e-12);
        CHECK(line.direction[0] > 0.0);
        CHECK(point_line_distance(origin, line) < 1e-12);
    }

    TEST_CASE("sign convention makes the largest component positive") {
        const Rgb d = unit(Rgb{0.2, -0.9, 0.1});
        std::vector<Rgb> pts;
        for (int i = 0; i < 10; ++i) pts.push_back((i * 0.1) * d);
        const ColorLine line = fit_color_line(pts);
        CHECK(line.direction[1] > 0.0);
        CHECK(angle_between(line.direction, d) < 1e-9);
    }

    TEST_CASE("isotropic blob") {
        std::mt19937_64 rng(8);
        const double sigma = 0.05;
        std::normal_distribution<double> g(0.0, sigma);
        std::vector<Rgb> pts(20000);
        for (Rgb& p : pts) p = {0.5 + g(rng), 0.5 + g(rng), 0.5 + g(rng)};
        const ColorLine line = fit_color_line(pts);
        // perpendicular distance to any axis through the center has two
        // Gaussian components, so its rms is sigma * sqrt(2)
        CHECK(line.rms_residual == doctest::Approx(sigma * std::sqrt(2.0)).epsilon(0.05));
        CHECK(std::abs(norm(line.direction) - 1.0) <= 1e-12);
    }

    TEST_CASE("two points interpolate exactly") {
        const std::vector<Rgb> pts{{0.1, 0.2, 0.3}, {0.4, 0.4, 0.4}};
        const ColorLine line = fit_color_line(pts);
        CHECK(line.rms_residual < 1e-15);
        CHECK(point_line_distance(pts[0], line) < 1e-15);
        CHECK(point_line_distance(pts[1], line) < 1e-15);
        CHECK(line.n == 2);
    }

    TEST_CASE("degenerate clouds") {
        const std::vector<Rgb> same(10, Rgb{0.3, 0.3, 0.3});
        CHECK(code_of([&] { fit_color_line(same); }) == ErrorCode::kFlatRegion);
        const std::vector<Rgb> one{{0.1, 0.1, 0.1}};
        CHECK(code_of([&] { fit_color_line(one); }) == ErrorCode::kEmptyRegion);
        const LinearImage img = sim::make_line_image({});
        CHECK(code_of([&] { fit_color_line(img, make_mask_rect({0, 0, 2, 2}, 100, 100)); }) == ErrorCode::kEmptyRegion);
    }

    TEST_CASE("origin distance") {
        ColorLine on_axis;
        on_axis.centroid = {0.3, 0.15, 0.05};
        on_axis.direction = unit(Rgb{0.6, 0.3, 0.1});
        CHECK(line_origin_distance(on_axis) < 1e-15);
        ColorLine perp;
        perp.centroid = {0.0, 1.0, 0.0};
        perp.direction = {1.0, 0.0, 0.0};
        CHECK(line_origin_distance(perp) == 1.0);
    }

    TEST_CASE("simulator patch distance matches the closed form") {
        const sim::SceneSpec scene = chart(0.2);
        const sim::RenderedScene r = sim::render(scene);
        for (std::size_t p = 0; p < scene.patches.size(); ++p) {
            const auto m = sim::material_response(scene, p);
            const Rgb d = unit(m.direct);
            const Rgb& delta = m.environment;
            const double closed = norm(delta - dot(delta, d) * d);
            const ColorLine line = fit_color_line(r.image, scene.patches[p].mask);
            CHECK(std::abs(line_origin_distance(line) - closed) < 1e-9);
            CHECK(angle_between(line.direction, d) < 1e-9);
        }
    }

    TEST_CASE("fitted direction is invariant to direct-light scale") {
        sim::SceneSpec a = chart(0.2);
        sim::SceneSpec b = a;
        b.direct_light = a.direct_light.scaled(2.5);
        const sim::RenderedScene ra = sim::render(a);
        const sim::RenderedScene rb = sim::render(b);
        for (const sim::Patch& p : a.patches) {
            CHECK(angle_between(fit_color_line(ra.image, p.mask).direction, fit_color_line(rb.image, p.mask).direction) <
                  1e-9);
        }
    }
}

TEST_SUITE("convergence") {
    TEST_CASE("lines through a common point") {
        const Rgb x{0.05, 0.08, 0.12};
        std::vector<ColorLine> lines;
        for (const Rgb& d : {Rgb{0.6, 0.3, 0.1}, Rgb{0.1, 0.7, 0.2}, Rgb{0.2, 0.2, 0.9}, Rgb{0.5, -0.1, 0.3}}) {
            std::vector<Rgb> pts;
            for (int i = 0; i < 12; ++i) pts.push_back(x + (0.05 * i) * unit(d));
            lines.push_back(fit_color_line(pts));
        }
        const ConvergenceReport rep = estimate_convergence_point(lines);
        for (int k = 0; k < 3; ++k) CHECK(std::abs(rep.point[k] - x[k]) < 1e-9);
        CHECK(rep.rms_line_distance < 1e-12);
        CHECK(rep.lines.size() == 4);
    }

    TEST_CASE("perpendicular lines through the origin") {
        ColorLine a;
        a.centroid = {0.5, 0.0, 0.0};
        a.direction = {1.0, 0.0, 0.0};
        ColorLine b;
        b.centroid = {0.0, 0.3, 0.0};
        b.direction = {0.0, 1.0, 0.0};
        const std::vector<ColorLine> lines{a, b};
        const ConvergenceReport rep = estimate_convergence_point(lines);
        for (double v : rep.point) CHECK(std::abs(v) < 1e-15);
    }

    TEST_CASE("parallel or single lines are degenerate") {
        ColorLine a;
        a.centroid = {0.5, 0.0, 0.0};
        a.direction = {0.0, 0.0, 1.0};
        ColorLine b = a;
        b.centroid = {0.0, 0.5, 0.0};
        const std::vector<ColorLine> parallel{a, b};
        CHECK(code_of([&] { estimate_convergence_point(parallel); }) == ErrorCode::kDegenerateBundle);
        const std::vector<ColorLine> single{a};
        CHECK(code_of([&] { estimate_convergence_point(single); }) == ErrorCode::kDegenerateBundle);
    }

    TEST_CASE("chart lines without ambient meet at the origin") {
        const sim::SceneSpec scene = chart(0.0);
        const sim::RenderedScene r = sim::render(scene);
        std::vector<ColorLine> lines;
        for (const sim::Patch& p : scene.patches) lines.push_back(fit_color_line(r.image, p.mask));
        const ConvergenceReport rep = estimate_convergence_point(lines);
        CHECK(norm(rep.point) < 1e-9);
    }
}

TEST_SUITE("ambient") {
    TEST_CASE("subtracting the umbra render leaves phi") {
        const sim::SceneSpec lit = chart(0.2);
        sim::SceneSpec umbra = sim::with_occlusion(lit, {sim::Occlusion::kFull, 0, 0});
        const sim::RenderedScene r = sim::render(lit);
        const LinearImage diff = subtract_ambient(r.image, sim::render(umbra).image);
        CHECK(orgb::test::max_abs_diff(diff, r.phi) <= 1e-15);
    }

    TEST_CASE("trivial differences") {
        const LinearImage img = orgb::test::random_image(6, 5, 4);
        const LinearImage zero = subtract_ambient(img, img);
        for (double v : zero.data()) CHECK(v == 0.0);
        CHECK(subtract_ambient(img, LinearImage(6, 5)) == img);
        CHECK(code_of([&] { subtract_ambient(img, LinearImage(5, 5)); }) == ErrorCode::kDimensionMismatch);
        const LinearImage neg = subtract_ambient(LinearImage(1, 1), LinearImage(1, 1, {0.1, 0.2, 0.3}));
        CHECK(neg.pixel(0)[2] == -0.3);
    }
}

TEST_SUITE("restoration") {
    TEST_CASE("estimated epsilon lies on the region line and correction restores the origin") {
        const sim::SceneSpec scene = chart(0.2);
        const sim::RenderedScene r = sim::render(scene);
        for (const sim::Patch& p : scene.patches) {
            const Epsilon e = estimate_epsilon(r.image, p.mask);
            const ColorLine before = fit_color_line(r.image, p.mask);
            CHECK(point_line_distance(e.eps, before) < 1e-9);
            const ColorLine after = fit_color_line(correct(r.image, e), p.mask);
            CHECK(line_origin_distance(after) < 1e-9);
        }
    }

    TEST_CASE("synthetic offset round trip") {
        const sim::SceneSpec scene = chart(0.0);
        const LinearImage base = sim::render(scene).image;
        const Rgb eps0{0.04, 0.07, 0.02};
        const LinearImage shifted = uncorrect(base, eps0);
        for (std::size_t p : {0u, 5u, 13u, 22u}) {
            const RegionMask& mask = scene.patches[p].mask;
            CHECK(line_origin_distance(fit_color_line(shifted, mask)) > 1e-3);
            const LinearImage fixed = correct(shifted, estimate_epsilon(shifted, mask));
            CHECK(line_origin_distance(fit_color_line(fixed, mask)) < 1e-9);
        }
    }

    TEST_CASE("corrected channel ratios are constant across the material") {
        const LinearImage img = sim::make_line_image({});
        const LinearImage fixed = correct(img, estimate_epsilon(img, Rect{0, 0, 100, 100}));
        const Rgb ref = fixed.pixel(5000);
        for (std::size_t i = 0; i < fixed.pixel_count(); ++i) {
            const Rgb v = fixed.pixel(i);
            for (int a = 0; a < 3; ++a) {
                for (int b = 0; b < 3; ++b) {
                    if (a == b) continue;
                    const double want = ref[a] / ref[b];
                    CHECK(std::abs(v[a] / v[b] - want) <= 1e-9 * std::abs(want));
                }
            }
        }
    }
}

TEST_SUITE("sidecar") {
    TEST_CASE("epsilon JSON schema and round trip") {
        const Epsilon e = estimate_epsilon(sim::make_line_image({}), Rect{0, 0, 100, 100});
        const nlohmann::json j = epsilon_to_json(e);
        CHECK(j.at("epsilon").size() == 3);
        CHECK(j.at("fits").size() == 3);
        for (const auto& f : j.at("fits")) {
            CHECK(f.contains("slope"));
            CHECK(f.contains("intercept"));
            CHECK(f.contains("r2"));
            CHECK(f.at("n") == 10000);
        }
        CHECK(j.at("region") == nlohmann::json{{"x", 0}, {"y", 0}, {"w", 100}, {"h", 100}});
        CHECK(j.at("space") == "linear-rgb");
        CHECK(j.at("method") == "ols");
        const Epsilon back = epsilon_from_json(nlohmann::json::parse(j.dump()));
        CHECK(back.eps == e.eps);
        CHECK(code_of([] { epsilon_from_json(nlohmann::json{{"epsilon", {0.1, 1.0, 0.0}}}); }) ==
              ErrorCode::kInvalidEpsilon);
        CHECK(code_of([] { epsilon_from_json(nlohmann::json{{"eps", {0.1, 0.0, 0.0}}}); }) == ErrorCode::kFormat);
    }

    TEST_CASE("rectangle forms") {
        const Rect want{10, 10, 40, 40};
        CHECK(parse_rect("10,10,40,40") == want);
        CHECK(rect_from_json(nlohmann::json::parse(R"({"x":10,"y":10,"w":40,"h":40})")) == want);
        CHECK(rect_from_json(nlohmann::json::parse("[10,10,40,40]")) == want);
        CHECK(rect_from_json(nlohmann::json("10,10,40,40")) == want);
        CHECK(code_of([] { parse_rect("10,10,40"); }) == ErrorCode::kInvalidArgument);
        const auto regions = regions_from_json(nlohmann::json::parse(R"({"regions":[[0,0,1,1],"2,2,3,3"]})"));
        CHECK(regions.size() == 2);
        CHECK(regions[1] == Rect{2, 2, 3, 3});
    }

    TEST_CASE("diagnose report") {
        const sim::SceneSpec scene = chart(0.2);
        const sim::RenderedScene r = sim::render(scene);
        const std::vector<Rect> one{scene.patches[0].rect};
        const nlohmann::json single = diagnose_regions(r.image, one);
        CHECK(single.at("point").is_null());
        CHECK(single.at("lines").size() == 1);
        std::vector<Rect> all;
        for (const auto& p : scene.patches) all.push_back(p.rect);
        const nlohmann::json rep = diagnose_regions(r.image, all);
        CHECK(rep.at("point").size() == 3);
        CHECK(rep.at("lines").size() == 24);
        CHECK(rep.at("lines")[3].contains("origin_distance"));
        CHECK(rep.at("lines")[3].at("region") == rect_to_json(all[3]));
    }
}
