#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "orgb/image.hpp"

/// Synthetic scenes under a two-illuminant matte reflection model: every
/// pixel sees direct light scaled by mu*cos(theta) plus unscaled environment
/// light, and the sensor integrates reflected light against three
/// sensitivity curves with the rectangle rule.
namespace orgb::sim {

struct WavelengthGrid {
    double start_nm = 400.0;
    double step_nm = 10.0;
    int count = 31;

    double wavelength(int i) const { return start_nm + step_nm * i; }
    bool operator==(const WavelengthGrid&) const = default;
};

/// Non-negative, finite samples on a wavelength grid.
class Spectrum {
public:
    Spectrum() = default;
    Spectrum(WavelengthGrid grid, std::vector<double> samples);

    static Spectrum constant(WavelengthGrid grid, double value);

    template <class F>
    static Spectrum sample(WavelengthGrid grid, F&& f) {
        std::vector<double> s(static_cast<std::size_t>(grid.count));
        for (int i = 0; i < grid.count; ++i) s[i] = f(grid.wavelength(i));
        return Spectrum(grid, std::move(s));
    }

    const WavelengthGrid& grid() const noexcept { return grid_; }
    std::span<const double> samples() const noexcept { return samples_; }
    double operator[](std::size_t i) const { return samples_[i]; }
    std::size_t size() const noexcept { return samples_.size(); }

    Spectrum scaled(double factor) const;

    bool operator==(const Spectrum&) const = default;

private:
    WavelengthGrid grid_;
    std::vector<double> samples_;
};

/// Long, medium and short wavelength sensitivities (Q1, Q2, Q3).
struct SensorSet {
    std::array<Spectrum, 3> curves;

    const WavelengthGrid& grid() const { return curves[0].grid(); }
};

/// Gaussian bands, peak 1, centered 610/550/465 nm with sigma 30 nm.
SensorSet gaussian_sensors(WavelengthGrid grid = {}, const Rgb& centers_nm = {610.0, 550.0, 465.0},
                           double sigma_nm = 30.0);

/// rho_k = sum_i c[i] * Q_k[i] * step. kGridMismatch unless grids agree.
Rgb sensor_response(const Spectrum& captured, const SensorSet& sensors);

/// Pointwise light * reflectance. Reflectance must lie in [0,1].
Spectrum reflect(const Spectrum& light, const Spectrum& reflectance);

/// mu * cos(theta) * direct + env, with mu in [0,1] and theta in [0, pi/2].
Spectrum incident_light(const Spectrum& direct, const Spectrum& env, double mu, double theta);

enum class Occlusion {
    kNone,          // mu = 1 everywhere
    kFull,          // mu = 0 everywhere
    kHalfGradient,  // mu = 0 left of the band, linear ramp across it, 1 right of it
};

/// Column band [band_start, band_end) for kHalfGradient. mu is exactly 0 at
/// band_start and exactly 1 at band_end - 1. band_end <= 0 means "image width".
struct OcclusionPattern {
    Occlusion kind = Occlusion::kNone;
    int band_start = 0;
    int band_end = 0;

    bool operator==(const OcclusionPattern&) const = default;
};

ChannelImage make_mu_map(int width, int height, const OcclusionPattern& pattern);

/// Additive Gaussian noise on the rendered image only; sigma 0 disables.
struct NoiseConfig {
    double sigma = 0.0;
    std::uint64_t seed = 0;

    bool operator==(const NoiseConfig&) const = default;
};

struct Patch {
    Rect rect;
    RegionMask mask;
    Spectrum reflectance;
    std::string name;
};

Patch make_patch(const Rect& rect, int width, int height, Spectrum reflectance, std::string name = {});

struct SceneSpec {
    int width = 0;
    int height = 0;
    Spectrum direct_light;
    Spectrum env_light;
    SensorSet sensors;
    std::vector<Patch> patches;
    ChannelImage mu_map;
    ChannelImage theta_map;
    // Descriptions the maps were rasterized from; these are what the JSON
    // document stores.
    OcclusionPattern occlusion;
    double theta = 0.0;
    NoiseConfig noise;
};

/// Throws kSceneValidation (or kGridMismatch) when an invariant fails:
/// disjoint covering masks, mu in [0,1], theta in [0, pi/2], shared grid,
/// reflectances in [0,1].
void validate(const SceneSpec& scene);

/// Replaces the occlusion pattern and re-rasterizes mu_map.
SceneSpec with_occlusion(SceneSpec scene, const OcclusionPattern& pattern);

struct RenderedScene {
    LinearImage image;  // phi + delta (+ noise)
    LinearImage phi;    // direct-light part
    LinearImage delta;  // environment-light part
    std::vector<int> labels;
};

RenderedScene render(const SceneSpec& scene);

/// Per-material responses: direct (per unit mu*cos(theta)) and environment.
struct MaterialResponse {
    Rgb direct;
    Rgb environment;
};
MaterialResponse material_response(const SceneSpec& scene, std::size_t patch);

// ---------------------------------------------------------------------------
// Built-in lighting and targets

struct LightingConfig {
    Spectrum direct_light;
    Spectrum env_light;
    SensorSet sensors;
    OcclusionPattern occlusion;
    double theta = 0.0;
    NoiseConfig noise;
};

/// Warm direct light 1 + 0.3*(l-550)/150 and bluish environment light
/// 1 - 0.6*(l-550)/150, each scaled so a perfect white reflector reaches
/// `direct_peak` / `ambient_peak` in its largest channel. ambient_peak 0
/// yields an all-zero environment.
LightingConfig default_lighting(double direct_peak = 0.75, double ambient_peak = 0.20, WavelengthGrid grid = {});

/// Scales `light` so sensor_response(light) has max channel `peak`.
Spectrum scale_to_peak(const Spectrum& light, const SensorSet& sensors, double peak);

/// S(l) = clamp(base + amplitude * exp(-(l - center)^2 / (2 width^2)), 0, 1).
struct ReflectanceBump {
    const char* name;
    double base;
    double amplitude;
    double center_nm;
    double width_nm;
};

Spectrum bump_reflectance(const ReflectanceBump& bump, WavelengthGrid grid = {});

/// The 24 built-in patch reflectances, row-major in a 4x6 chart. The last row
/// is neutral (reflectance 0.90 down to 0.03).
std::span<const ReflectanceBump> colorchecker_table();

/// Patch index of the dark neutral (0.09) used as the default estimation patch.
inline constexpr std::size_t kColorCheckerReferencePatch = 22;

struct GridLayout {
    int width = 192;
    int height = 128;
    int rows = 4;
    int cols = 6;
};

SceneSpec make_colorchecker_scene(const LightingConfig& config, const GridLayout& layout = {});

/// Two materials stacked vertically: a warm gray "road" (top half, label 0)
/// and a bluish gray (bottom half, label 1).
SceneSpec make_two_material_scene(const LightingConfig& config, int width, int height);
std::span<const ReflectanceBump> two_material_table();

/// Single-material line: pixel i of n gets offset + s_i * direction with s_i
/// spaced evenly over [s_min, s_max] in row-major order.
struct LineImageConfig {
    Rgb direction{0.6, 0.3, 0.1};
    Rgb offset{0.05, 0.08, 0.12};
    int width = 100;
    int height = 100;
    double s_min = 0.2;
    double s_max = 1.0;
    NoiseConfig noise;
};

LinearImage make_line_image(const LineImageConfig& config);

}  // namespace orgb::sim
