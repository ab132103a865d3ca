#include "orgb/offset_io.hpp"

#include <sstream>

#include "orgb/error.hpp"
#include "orgb/image_io.hpp"

namespace orgb {

using nlohmann::json;

json rect_to_json(const Rect& r) { return {{"x", r.x}, {"y", r.y}, {"w", r.w}, {"h", r.h}}; }

Rect rect_from_json(const json& j) {
    try {
        if (j.is_array()) return Rect{j.at(0).get<int>(), j.at(1).get<int>(), j.at(2).get<int>(), j.at(3).get<int>()};
        if (j.is_string()) return parse_rect(j.get<std::string>());
        return Rect{j.at("x").get<int>(), j.at("y").get<int>(), j.at("w").get<int>(), j.at("h").get<int>()};
    } catch (const json::exception& e) {
        throw Error(ErrorCode::kFormat, std::string("malformed rectangle: ") + e.what());
    }
}

Rect parse_rect(const std::string& text) {
    std::istringstream in(text);
    int v[4];
    char sep = 0;
    for (int i = 0; i < 4; ++i) {
        if (!(in >> v[i])) throw Error(ErrorCode::kInvalidArgument, "rectangle '" + text + "' is not x,y,w,h");
        if (i < 3 && (!(in >> sep) || sep != ',')) {
            throw Error(ErrorCode::kInvalidArgument, "rectangle '" + text + "' is not x,y,w,h");
        }
    }
    if (in >> sep) throw Error(ErrorCode::kInvalidArgument, "rectangle '" + text + "' has trailing characters");
    return Rect{v[0], v[1], v[2], v[3]};
}

json epsilon_to_json(const Epsilon& e) {
    json fits = json::array();
    for (const ChannelFit& f : e.fits) {
        fits.push_back({{"slope", f.slope}, {"intercept", f.intercept}, {"r2", f.r2}, {"n", f.n}});
    }
    json region = e.rect ? rect_to_json(*e.rect) : json{{"digest", e.mask_digest}};
    return {{"epsilon", {e.eps[0], e.eps[1], e.eps[2]}},
            {"fits", fits},
            {"region", region},
            {"space", "linear-rgb"},
            {"method", fit_method_name(e.method)}};
}

Epsilon epsilon_from_json(const json& doc) {
    try {
        Epsilon e;
        const json& eps = doc.at("epsilon");
        if (!eps.is_array() || eps.size() != 3) throw Error(ErrorCode::kFormat, "'epsilon' must be an array of 3 numbers");
        for (int k = 0; k < 3; ++k) e.eps[k] = eps.at(k).get<double>();
        if (doc.contains("space") && doc.at("space").get<std::string>() != "linear-rgb") {
            throw Error(ErrorCode::kFormat, "epsilon space '" + doc.at("space").get<std::string>() +
                                                "' is not supported (expected linear-rgb)");
        }
        if (doc.contains("fits")) {
            const json& fits = doc.at("fits");
            for (std::size_t k = 0; k < 3 && k < fits.size(); ++k) {
                e.fits[k].slope = fits[k].value("slope", 0.0);
                e.fits[k].intercept = fits[k].value("intercept", 0.0);
                e.fits[k].r2 = fits[k].value("r2", 0.0);
                e.fits[k].n = fits[k].value("n", std::size_t{0});
            }
        }
        if (doc.contains("region")) {
            const json& r = doc.at("region");
            if (r.contains("digest")) {
                e.mask_digest = r.at("digest").get<std::string>();
            } else {
                e.rect = rect_from_json(r);
            }
        }
        if (doc.contains("method")) e.method = parse_fit_method(doc.at("method").get<std::string>());
        check_epsilon(e.eps);
        return e;
    } catch (const json::exception& ex) {
        throw Error(ErrorCode::kFormat, std::string("malformed epsilon document: ") + ex.what());
    }
}

Epsilon load_epsilon(const std::filesystem::path& path) {
    try {
        return epsilon_from_json(load_json(path));
    } catch (const Error& e) {
        throw Error(e.code(), path.string() + ": " + e.detail());
    }
}

void save_epsilon(const Epsilon& e, const std::filesystem::path& path) { save_json(epsilon_to_json(e), path); }

std::vector<Rect> regions_from_json(const json& doc) {
    const json& list = doc.is_object() ? doc.at("regions") : doc;
    if (!list.is_array()) throw Error(ErrorCode::kFormat, "regions document must hold an array of rectangles");
    std::vector<Rect> out;
    for (const json& r : list) out.push_back(rect_from_json(r));
    return out;
}

json regions_to_json(const std::vector<Rect>& regions) {
    json list = json::array();
    for (const Rect& r : regions) list.push_back(rect_to_json(r));
    return {{"regions", list}};
}

json color_line_to_json(const ColorLine& line) {
    return {{"centroid", line.centroid},
            {"direction", line.direction},
            {"rms_residual", line.rms_residual},
            {"n", line.n},
            {"origin_distance", line_origin_distance(line)}};
}

json convergence_to_json(const ConvergenceReport& report, const std::vector<Rect>& regions, bool has_point) {
    json lines = json::array();
    for (std::size_t i = 0; i < report.lines.size(); ++i) {
        json l = color_line_to_json(report.lines[i]);
        if (i < regions.size()) l["region"] = rect_to_json(regions[i]);
        lines.push_back(std::move(l));
    }
    return {{"point", has_point ? json(report.point) : json(nullptr)},
            {"rms_line_distance", has_point ? json(report.rms_line_distance) : json(nullptr)},
            {"lines", lines}};
}

json diagnose_regions(const LinearImage& img, const std::vector<Rect>& regions) {
    if (regions.empty()) throw Error(ErrorCode::kInvalidArgument, "diagnose needs at least one region");
    ConvergenceReport report;
    for (const Rect& r : regions) report.lines.push_back(fit_color_line(img, make_mask_rect(r, img.width(), img.height())));
    if (report.lines.size() < 2) return convergence_to_json(report, regions, false);
    try {
        ConvergenceReport solved = estimate_convergence_point(report.lines);
        return convergence_to_json(solved, regions, true);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::kDegenerateBundle) throw;
        json doc = convergence_to_json(report, regions, false);
        doc["warning"] = e.what();
        return doc;
    }
}

void save_json(const json& doc, const std::filesystem::path& path) {
    const std::string text = doc.dump(2) + "\n";
    write_file_bytes(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

json load_json(const std::filesystem::path& path) {
    const auto bytes = read_file_bytes(path);
    json doc = json::parse(bytes.begin(), bytes.end(), nullptr, false);
    if (doc.is_discarded()) throw Error(ErrorCode::kFormat, path.string() + ": not valid JSON");
    return doc;
}

}  // namespace orgb
