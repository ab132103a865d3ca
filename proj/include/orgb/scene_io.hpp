#pragma once

#include <filesystem>

#include <json.hpp>

#include "orgb/spectral.hpp"

namespace orgb::sim {

/// Scene document:
///
///   {
///     "format": "orgb-scene/1",
///     "width": W, "height": H,
///     "grid": {"start_nm": 400, "step_nm": 10, "count": 31},
///     "direct_light": [..count..], "env_light": [..count..],
///     "sensors": [[Q1..], [Q2..], [Q3..]],
///     "patches": [{"name": "...", "rect": {"x","y","w","h"}, "reflectance": [..]}],
///     "occlusion": {"pattern": "none" | "full" | "half-gradient", "band": [start, end]},
///     "theta": radians,
///     "noise": {"sigma": s, "seed": n}
///   }
///
/// mu_map and theta_map are rebuilt from "occlusion" and "theta" on load.
nlohmann::json scene_to_json(const SceneSpec& scene);
SceneSpec scene_from_json(const nlohmann::json& doc);

SceneSpec load_scene(const std::filesystem::path& path);
void save_scene(const SceneSpec& scene, const std::filesystem::path& path);

std::string occlusion_name(Occlusion kind);
Occlusion parse_occlusion(const std::string& name);

/// Writes image.png (16-bit sRGB), image.f64, phi.f64, delta.f64 and
/// labels.png (palette indices) into `dir`, creating it if needed.
void write_rendered(const RenderedScene& rendered, int width, int height, const std::filesystem::path& dir);

}  // namespace orgb::sim
