#include "orgb/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "orgb/error.hpp"

namespace orgb::sim {
namespace {

void require_same_grid(const WavelengthGrid& a, const WavelengthGrid& b, const char* what) {
    if (!(a == b)) throw Error(ErrorCode::kGridMismatch, std::string(what) + ": spectra are sampled on different grids");
}

// Chart approximations. Values are not measured data; they only need to be
// distinct and smooth.
constexpr ReflectanceBump kColorChecker[24] = {
    {"dark skin", 0.05, 0.30, 640, 60},     {"light skin", 0.18, 0.45, 630, 70},
    {"blue sky", 0.12, 0.22, 470, 45},      {"foliage", 0.05, 0.14, 545, 35},
    {"blue flower", 0.20, 0.30, 455, 40},   {"bluish green", 0.15, 0.45, 505, 40},
    {"orange", 0.05, 0.75, 625, 45},        {"purplish blue", 0.08, 0.35, 445, 30},
    {"moderate red", 0.08, 0.65, 650, 40},  {"purple", 0.05, 0.22, 430, 25},
    {"yellow green", 0.08, 0.60, 565, 40},  {"orange yellow", 0.10, 0.80, 600, 50},
    {"blue", 0.04, 0.30, 440, 30},          {"green", 0.05, 0.40, 535, 30},
    {"red", 0.04, 0.55, 665, 35},           {"yellow", 0.05, 0.85, 585, 45},
    {"magenta", 0.60, -0.50, 540, 45},      {"cyan", 0.05, 0.50, 490, 30},
    {"white 9.5", 0.90, 0.0, 550, 50},      {"neutral 8", 0.59, 0.0, 550, 50},
    {"neutral 6.5", 0.36, 0.0, 550, 50},    {"neutral 5", 0.19, 0.0, 550, 50},
    {"neutral 3.5", 0.09, 0.0, 550, 50},    {"black 2", 0.03, 0.0, 550, 50},
};

constexpr ReflectanceBump kTwoMaterial[2] = {
    {"road", 0.20, 0.06, 640, 60},
    {"bluish gray", 0.18, 0.07, 460, 50},
};

double gaussian(double x, double center, double sigma) {
    const double d = (x - center) / sigma;
    return std::exp(-0.5 * d * d);
}

}  // namespace

Spectrum::Spectrum(WavelengthGrid grid, std::vector<double> samples) : grid_(grid), samples_(std::move(samples)) {
    if (grid_.count <= 0 || !(grid_.step_nm > 0.0)) {
        throw Error(ErrorCode::kInvalidArgument, "wavelength grid needs a positive count and step");
    }
    if (samples_.size() != static_cast<std::size_t>(grid_.count)) {
        throw Error(ErrorCode::kGridMismatch, "spectrum has " + std::to_string(samples_.size()) +
                                                  " samples but its grid has " + std::to_string(grid_.count));
    }
    for (double v : samples_) {
        if (!std::isfinite(v) || v < 0.0) {
            throw Error(ErrorCode::kInvalidArgument, "spectrum samples must be finite and non-negative");
        }
    }
}

Spectrum Spectrum::constant(WavelengthGrid grid, double value) {
    return Spectrum(grid, std::vector<double>(static_cast<std::size_t>(std::max(grid.count, 0)), value));
}

Spectrum Spectrum::scaled(double factor) const {
    std::vector<double> s(samples_);
    for (double& v : s) v *= factor;
    return Spectrum(grid_, std::move(s));
}

SensorSet gaussian_sensors(WavelengthGrid grid, const Rgb& centers_nm, double sigma_nm) {
    SensorSet set;
    for (int k = 0; k < 3; ++k) {
        set.curves[k] = Spectrum::sample(grid, [&](double l) { return gaussian(l, centers_nm[k], sigma_nm); });
    }
    return set;
}

Rgb sensor_response(const Spectrum& captured, const SensorSet& sensors) {
    Rgb rho{0.0, 0.0, 0.0};
    for (int k = 0; k < 3; ++k) {
        const Spectrum& q = sensors.curves[k];
        require_same_grid(captured.grid(), q.grid(), "sensor_response");
        const double step = q.grid().step_nm;
        double acc = 0.0;
        for (std::size_t i = 0; i < captured.size(); ++i) acc += captured[i] * q[i] * step;
        rho[k] = acc;
    }
    return rho;
}

Spectrum reflect(const Spectrum& light, const Spectrum& reflectance) {
    require_same_grid(light.grid(), reflectance.grid(), "reflect");
    std::vector<double> out(light.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (reflectance[i] > 1.0) throw Error(ErrorCode::kInvalidArgument, "reflectance exceeds 1");
        out[i] = light[i] * reflectance[i];
    }
    return Spectrum(light.grid(), std::move(out));
}

Spectrum incident_light(const Spectrum& direct, const Spectrum& env, double mu, double theta) {
    require_same_grid(direct.grid(), env.grid(), "incident_light");
    if (!(mu >= 0.0 && mu <= 1.0)) throw Error(ErrorCode::kInvalidArgument, "mu must lie in [0,1]");
    if (!(theta >= 0.0 && theta <= std::numbers::pi / 2)) {
        throw Error(ErrorCode::kInvalidArgument, "theta must lie in [0, pi/2]");
    }
    const double scale = mu * std::cos(theta);
    std::vector<double> out(direct.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = scale * direct[i] + env[i];
    return Spectrum(direct.grid(), std::move(out));
}

ChannelImage make_mu_map(int width, int height, const OcclusionPattern& pattern) {
    switch (pattern.kind) {
        case Occlusion::kNone: return ChannelImage(width, height, 1.0);
        case Occlusion::kFull: return ChannelImage(width, height, 0.0);
        case Occlusion::kHalfGradient: break;
    }
    const int start = pattern.band_start;
    const int end = pattern.band_end <= 0 ? width : pattern.band_end;
    if (start < 0 || end > width || end - start < 2) {
        throw Error(ErrorCode::kInvalidArgument, "penumbra band [" + std::to_string(start) + ", " +
                                                     std::to_string(end) + ") must lie inside a " +
                                                     std::to_string(width) + "-pixel row and span >= 2 columns");
    }
    ChannelImage mu(width, height);
    const double span = static_cast<double>(end - 1 - start);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            double v = 0.0;
            if (x >= end - 1) {
                v = 1.0;
            } else if (x > start) {
                v = static_cast<double>(x - start) / span;
            }
            mu.at(x, y) = v;
        }
    }
    return mu;
}

Patch make_patch(const Rect& rect, int width, int height, Spectrum reflectance, std::string name) {
    return Patch{rect, make_mask_rect(rect, width, height), std::move(reflectance), std::move(name)};
}

void validate(const SceneSpec& s) {
    if (s.width <= 0 || s.height <= 0) throw Error(ErrorCode::kSceneValidation, "scene dimensions must be positive");
    const WavelengthGrid& grid = s.direct_light.grid();
    require_same_grid(grid, s.env_light.grid(), "scene lights");
    for (const auto& q : s.sensors.curves) require_same_grid(grid, q.grid(), "scene sensors");

    const std::size_t n = static_cast<std::size_t>(s.width) * s.height;
    if (s.mu_map.width() != s.width || s.mu_map.height() != s.height || s.theta_map.width() != s.width ||
        s.theta_map.height() != s.height) {
        throw Error(ErrorCode::kSceneValidation, "mu/theta maps do not match scene dimensions");
    }
    for (std::size_t i = 0; i < n; ++i) {
        const double mu = s.mu_map.at(i);
        const double th = s.theta_map.at(i);
        if (!(mu >= 0.0 && mu <= 1.0)) throw Error(ErrorCode::kSceneValidation, "mu outside [0,1]");
        if (!(th >= 0.0 && th <= std::numbers::pi / 2)) throw Error(ErrorCode::kSceneValidation, "theta outside [0, pi/2]");
    }

    std::vector<std::uint8_t> covered(n, 0);
    for (std::size_t p = 0; p < s.patches.size(); ++p) {
        const Patch& patch = s.patches[p];
        require_same_grid(grid, patch.reflectance.grid(), "patch reflectance");
        for (double v : patch.reflectance.samples()) {
            if (v > 1.0) throw Error(ErrorCode::kSceneValidation, "patch " + std::to_string(p) + " reflectance exceeds 1");
        }
        if (patch.mask.width() != s.width || patch.mask.height() != s.height) {
            throw Error(ErrorCode::kSceneValidation, "patch " + std::to_string(p) + " mask has wrong dimensions");
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (!patch.mask.test(i)) continue;
            if (covered[i]) {
                throw Error(ErrorCode::kSceneValidation, "patch masks overlap at pixel " + std::to_string(i));
            }
            covered[i] = 1;
        }
    }
    const auto gap = std::find(covered.begin(), covered.end(), 0);
    if (gap != covered.end()) {
        const auto i = static_cast<std::size_t>(gap - covered.begin());
        throw Error(ErrorCode::kSceneValidation, "pixel (" + std::to_string(i % s.width) + ", " +
                                                     std::to_string(i / s.width) + ") is not covered by any patch");
    }
}

SceneSpec with_occlusion(SceneSpec scene, const OcclusionPattern& pattern) {
    scene.occlusion = pattern;
    scene.mu_map = make_mu_map(scene.width, scene.height, pattern);
    return scene;
}

MaterialResponse material_response(const SceneSpec& scene, std::size_t patch) {
    const Spectrum& s = scene.patches.at(patch).reflectance;
    return {sensor_response(reflect(scene.direct_light, s), scene.sensors),
            sensor_response(reflect(scene.env_light, s), scene.sensors)};
}

RenderedScene render(const SceneSpec& scene) {
    validate(scene);
    const std::size_t n = static_cast<std::size_t>(scene.width) * scene.height;

    std::vector<MaterialResponse> responses;
    responses.reserve(scene.patches.size());
    for (std::size_t p = 0; p < scene.patches.size(); ++p) responses.push_back(material_response(scene, p));

    RenderedScene out{LinearImage(scene.width, scene.height), LinearImage(scene.width, scene.height),
                      LinearImage(scene.width, scene.height), std::vector<int>(n, -1)};
    for (std::size_t p = 0; p < scene.patches.size(); ++p) {
        for (std::size_t i : scene.patches[p].mask.indices()) out.labels[i] = static_cast<int>(p);
    }

    for (std::size_t i = 0; i < n; ++i) {
        const MaterialResponse& m = responses[static_cast<std::size_t>(out.labels[i])];
        const double scale = scene.mu_map.at(i) * std::cos(scene.theta_map.at(i));
        const Rgb phi{scale * m.direct[0], scale * m.direct[1], scale * m.direct[2]};
        out.phi.set_pixel(i, phi);
        out.delta.set_pixel(i, m.environment);
        out.image.set_pixel(i, phi + m.environment);
    }

    if (scene.noise.sigma > 0.0) {
        std::mt19937_64 rng(scene.noise.seed);
        std::normal_distribution<double> noise(0.0, scene.noise.sigma);
        for (double& v : out.image.data()) v += noise(rng);
    }
    return out;
}

Spectrum scale_to_peak(const Spectrum& light, const SensorSet& sensors, double peak) {
    const Rgb white = sensor_response(light, sensors);
    const double m = std::max({white[0], white[1], white[2]});
    if (!(m > 0.0)) {
        if (peak == 0.0) return light.scaled(0.0);
        throw Error(ErrorCode::kInvalidArgument, "cannot scale a light with zero sensor response");
    }
    return light.scaled(peak / m);
}

LightingConfig default_lighting(double direct_peak, double ambient_peak, WavelengthGrid grid) {
    LightingConfig cfg;
    cfg.sensors = gaussian_sensors(grid);
    const Spectrum sun = Spectrum::sample(grid, [](double l) { return 1.0 + 0.3 * (l - 550.0) / 150.0; });
    const Spectrum sky = Spectrum::sample(grid, [](double l) { return 1.0 - 0.6 * (l - 550.0) / 150.0; });
    cfg.direct_light = scale_to_peak(sun, cfg.sensors, direct_peak);
    cfg.env_light = scale_to_peak(sky, cfg.sensors, ambient_peak);
    return cfg;
}

Spectrum bump_reflectance(const ReflectanceBump& bump, WavelengthGrid grid) {
    return Spectrum::sample(grid, [&](double l) {
        return std::clamp(bump.base + bump.amplitude * gaussian(l, bump.center_nm, bump.width_nm), 0.0, 1.0);
    });
}

std::span<const ReflectanceBump> colorchecker_table() { return kColorChecker; }
std::span<const ReflectanceBump> two_material_table() { return kTwoMaterial; }

namespace {

SceneSpec scene_shell(const LightingConfig& config, int width, int height) {
    SceneSpec scene;
    scene.width = width;
    scene.height = height;
    scene.direct_light = config.direct_light;
    scene.env_light = config.env_light;
    scene.sensors = config.sensors;
    scene.occlusion = config.occlusion;
    scene.theta = config.theta;
    scene.noise = config.noise;
    scene.mu_map = make_mu_map(width, height, config.occlusion);
    scene.theta_map = ChannelImage(width, height, config.theta);
    return scene;
}

}  // namespace

SceneSpec make_colorchecker_scene(const LightingConfig& config, const GridLayout& layout) {
    if (layout.rows <= 0 || layout.cols <= 0 || layout.width < layout.cols || layout.height < layout.rows) {
        throw Error(ErrorCode::kInvalidArgument, "degenerate chart geometry: " + std::to_string(layout.width) + "x" +
                                                     std::to_string(layout.height) + " cannot hold " +
                                                     std::to_string(layout.rows) + "x" + std::to_string(layout.cols) +
                                                     " patches of at least 1 px");
    }
    if (layout.rows * layout.cols != 24) {
        throw Error(ErrorCode::kInvalidArgument, "the built-in chart has 24 patches");
    }
    SceneSpec scene = scene_shell(config, layout.width, layout.height);
    const WavelengthGrid grid = config.direct_light.grid();
    const auto table = colorchecker_table();
    for (int r = 0; r < layout.rows; ++r) {
        const int y0 = r * layout.height / layout.rows;
        const int y1 = (r + 1) * layout.height / layout.rows;
        for (int c = 0; c < layout.cols; ++c) {
            const int x0 = c * layout.width / layout.cols;
            const int x1 = (c + 1) * layout.width / layout.cols;
            const auto& bump = table[static_cast<std::size_t>(r * layout.cols + c)];
            scene.patches.push_back(make_patch(Rect{x0, y0, x1 - x0, y1 - y0}, layout.width, layout.height,
                                               bump_reflectance(bump, grid), bump.name));
        }
    }
    validate(scene);
    return scene;
}

SceneSpec make_two_material_scene(const LightingConfig& config, int width, int height) {
    if (width < 1 || height < 2) throw Error(ErrorCode::kInvalidArgument, "two-material scene needs at least 1x2 pixels");
    SceneSpec scene = scene_shell(config, width, height);
    const WavelengthGrid grid = config.direct_light.grid();
    const int split = height / 2;
    scene.patches.push_back(
        make_patch(Rect{0, 0, width, split}, width, height, bump_reflectance(kTwoMaterial[0], grid), kTwoMaterial[0].name));
    scene.patches.push_back(make_patch(Rect{0, split, width, height - split}, width, height,
                                       bump_reflectance(kTwoMaterial[1], grid), kTwoMaterial[1].name));
    validate(scene);
    return scene;
}

LinearImage make_line_image(const LineImageConfig& config) {
    LinearImage img(config.width, config.height);
    const std::size_t n = img.pixel_count();
    for (std::size_t i = 0; i < n; ++i) {
        const double t = n > 1 ? static_cast<double>(i) / static_cast<double>(n - 1) : 0.0;
        const double s = config.s_min + (config.s_max - config.s_min) * t;
        img.set_pixel(i, config.offset + s * config.direction);
    }
    if (config.noise.sigma > 0.0) {
        std::mt19937_64 rng(config.noise.seed);
        std::normal_distribution<double> noise(0.0, config.noise.sigma);
        for (double& v : img.data()) v += noise(rng);
    }
    return img;
}

}  // namespace orgb::sim
