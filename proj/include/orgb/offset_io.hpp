#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "orgb/offset.hpp"

namespace orgb {

/// Epsilon sidecar:
///   {"epsilon": [e1, e2, e3],
///    "fits": [{"slope", "intercept", "r2", "n"} x3],
///    "region": {"x", "y", "w", "h"}   (or {"digest": "..."} for masks),
///    "space": "linear-rgb",
///    "method": "ols" | "theil-sen"}
/// Only "epsilon" is required when reading.
nlohmann::json epsilon_to_json(const Epsilon& e);
Epsilon epsilon_from_json(const nlohmann::json& doc);
Epsilon load_epsilon(const std::filesystem::path& path);
void save_epsilon(const Epsilon& e, const std::filesystem::path& path);

nlohmann::json rect_to_json(const Rect& r);
Rect rect_from_json(const nlohmann::json& j);
/// "x,y,w,h"
Rect parse_rect(const std::string& text);

/// {"regions": [{"x","y","w","h"}, ...]} or a bare array of rects.
std::vector<Rect> regions_from_json(const nlohmann::json& doc);
nlohmann::json regions_to_json(const std::vector<Rect>& regions);

nlohmann::json color_line_to_json(const ColorLine& line);
/// {"point": [..] | null, "rms_line_distance": x | null,
///  "lines": [{"centroid", "direction", "rms_residual", "n", "origin_distance", "region"}]}
nlohmann::json convergence_to_json(const ConvergenceReport& report, const std::vector<Rect>& regions,
                                   bool has_point);

/// Fits one color line per region and, with two or more lines, their
/// convergence point. A degenerate bundle yields a null point and a
/// "warning" field instead of an error.
nlohmann::json diagnose_regions(const LinearImage& img, const std::vector<Rect>& regions);

/// Writes `doc.dump(2)` plus a trailing newline.
void save_json(const nlohmann::json& doc, const std::filesystem::path& path);
nlohmann::json load_json(const std::filesystem::path& path);

}  // namespace orgb
