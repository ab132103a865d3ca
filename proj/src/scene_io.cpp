#include "orgb/scene_io.hpp"

#include <fstream>

#include "orgb/error.hpp"
#include "orgb/image_io.hpp"

namespace orgb::sim {
namespace {

using nlohmann::json;

constexpr const char* kSceneFormat = "orgb-scene/1";

json spectrum_json(const Spectrum& s) { return json(std::vector<double>(s.samples().begin(), s.samples().end())); }

Spectrum spectrum_from(const json& j, const WavelengthGrid& grid, const char* what) {
    if (!j.is_array()) throw Error(ErrorCode::kFormat, std::string("scene field '") + what + "' must be an array");
    return Spectrum(grid, j.get<std::vector<double>>());
}

template <class T>
T field(const json& j, const char* key) {
    if (!j.contains(key)) throw Error(ErrorCode::kFormat, std::string("scene document is missing '") + key + "'");
    return j.at(key).get<T>();
}

}  // namespace

std::string occlusion_name(Occlusion kind) {
    switch (kind) {
        case Occlusion::kNone: return "none";
        case Occlusion::kFull: return "full";
        case Occlusion::kHalfGradient: return "half-gradient";
    }
    return "none";
}

Occlusion parse_occlusion(const std::string& name) {
    if (name == "none") return Occlusion::kNone;
    if (name == "full") return Occlusion::kFull;
    if (name == "half-gradient") return Occlusion::kHalfGradient;
    throw Error(ErrorCode::kInvalidArgument, "unknown occlusion pattern '" + name + "' (none | full | half-gradient)");
}

json scene_to_json(const SceneSpec& scene) {
    const WavelengthGrid& g = scene.direct_light.grid();
    json patches = json::array();
    for (const Patch& p : scene.patches) {
        patches.push_back({{"name", p.name},
                           {"rect", {{"x", p.rect.x}, {"y", p.rect.y}, {"w", p.rect.w}, {"h", p.rect.h}}},
                           {"reflectance", spectrum_json(p.reflectance)}});
    }
    return json{
        {"format", kSceneFormat},
        {"width", scene.width},
        {"height", scene.height},
        {"grid", {{"start_nm", g.start_nm}, {"step_nm", g.step_nm}, {"count", g.count}}},
        {"direct_light", spectrum_json(scene.direct_light)},
        {"env_light", spectrum_json(scene.env_light)},
        {"sensors", json::array({spectrum_json(scene.sensors.curves[0]), spectrum_json(scene.sensors.curves[1]),
                                 spectrum_json(scene.sensors.curves[2])})},
        {"patches", patches},
        {"occlusion",
         {{"pattern", occlusion_name(scene.occlusion.kind)},
          {"band", {scene.occlusion.band_start, scene.occlusion.band_end}}}},
        {"theta", scene.theta},
        {"noise", {{"sigma", scene.noise.sigma}, {"seed", scene.noise.seed}}},
    };
}

SceneSpec scene_from_json(const json& doc) {
    try {
        if (doc.contains("format") && doc.at("format").get<std::string>() != kSceneFormat) {
            throw Error(ErrorCode::kFormat, "unsupported scene format '" + doc.at("format").get<std::string>() + "'");
        }
        SceneSpec scene;
        scene.width = field<int>(doc, "width");
        scene.height = field<int>(doc, "height");
        WavelengthGrid grid;
        if (doc.contains("grid")) {
            const json& g = doc.at("grid");
            grid.start_nm = g.value("start_nm", grid.start_nm);
            grid.step_nm = g.value("step_nm", grid.step_nm);
            grid.count = g.value("count", grid.count);
        }
        scene.direct_light = spectrum_from(doc.at("direct_light"), grid, "direct_light");
        scene.env_light = spectrum_from(doc.at("env_light"), grid, "env_light");
        const json& sensors = doc.at("sensors");
        if (!sensors.is_array() || sensors.size() != 3) throw Error(ErrorCode::kFormat, "'sensors' must hold 3 curves");
        for (int k = 0; k < 3; ++k) scene.sensors.curves[k] = spectrum_from(sensors[k], grid, "sensors");

        for (const json& p : doc.at("patches")) {
            const json& r = p.at("rect");
            const Rect rect{r.at("x").get<int>(), r.at("y").get<int>(), r.at("w").get<int>(), r.at("h").get<int>()};
            scene.patches.push_back(make_patch(rect, scene.width, scene.height,
                                               spectrum_from(p.at("reflectance"), grid, "reflectance"),
                                               p.value("name", std::string{})));
        }

        if (doc.contains("occlusion")) {
            const json& o = doc.at("occlusion");
            scene.occlusion.kind = parse_occlusion(o.value("pattern", std::string("none")));
            if (o.contains("band")) {
                scene.occlusion.band_start = o.at("band").at(0).get<int>();
                scene.occlusion.band_end = o.at("band").at(1).get<int>();
            }
        }
        scene.theta = doc.value("theta", 0.0);
        if (doc.contains("noise")) {
            scene.noise.sigma = doc.at("noise").value("sigma", 0.0);
            scene.noise.seed = doc.at("noise").value("seed", std::uint64_t{0});
        }
        scene.mu_map = make_mu_map(scene.width, scene.height, scene.occlusion);
        scene.theta_map = ChannelImage(scene.width, scene.height, scene.theta);
        validate(scene);
        return scene;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::kFormat, std::string("malformed scene document: ") + e.what());
    }
}

SceneSpec load_scene(const std::filesystem::path& path) {
    const auto bytes = read_file_bytes(path);
    const json doc = json::parse(bytes.begin(), bytes.end(), nullptr, false);
    if (doc.is_discarded()) throw Error(ErrorCode::kFormat, path.string() + ": not valid JSON");
    return scene_from_json(doc);
}

void save_scene(const SceneSpec& scene, const std::filesystem::path& path) {
    const std::string text = scene_to_json(scene).dump(2) + "\n";
    write_file_bytes(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

void write_rendered(const RenderedScene& rendered, int width, int height, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    save_image(rendered.image, dir / "image.png", 16);
    save_image(rendered.image, dir / "image.f64");
    save_image(rendered.phi, dir / "phi.f64");
    save_image(rendered.delta, dir / "delta.f64");
    std::vector<std::uint8_t> labels(rendered.labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = static_cast<std::uint8_t>(rendered.labels[i]);
    save_index_png(width, height, labels, dir / "labels.png");
}

}  // namespace orgb::sim
