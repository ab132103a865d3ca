#include "orgb/app/cli.hpp"

#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <thread>

#include <pthread.h>

#include <CLI11.hpp>
#include <json.hpp>

#include "orgb/app/service.hpp"
#include "orgb/canny.hpp"
#include "orgb/color_spaces.hpp"
#include "orgb/enhance.hpp"
#include "orgb/error.hpp"
#include "orgb/image_io.hpp"
#include "orgb/offset.hpp"
#include "orgb/offset_io.hpp"
#include "orgb/scene_io.hpp"
#include "orgb/segmentation.hpp"
#include "orgb/spectral.hpp"

namespace orgb::app {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

void emit_json(const json& doc, const std::optional<std::string>& path, std::ostream& out) {
    if (path) {
        save_json(doc, *path);
    } else {
        out << doc.dump(2) << "\n";
    }
}

std::pair<int, int> parse_band(const std::string& text) {
    const auto comma = text.find(',');
    if (comma == std::string::npos) throw Error(ErrorCode::kInvalidArgument, "band must be \"start,end\", got \"" + text + "\"");
    try {
        return {std::stoi(text.substr(0, comma)), std::stoi(text.substr(comma + 1))};
    } catch (const std::exception&) {
        throw Error(ErrorCode::kInvalidArgument, "band must be \"start,end\", got \"" + text + "\"");
    }
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateArgs {
    std::optional<std::string> scene;
    std::string preset = "colorchecker";
    std::optional<std::string> pattern;
    std::optional<std::string> band;
    double ambient = 0.20;
    double direct = 0.75;
    std::optional<double> noise;
    std::optional<std::uint64_t> seed;
    std::optional<int> width;
    std::optional<int> height;
    double theta = 0.0;
    std::string out_dir;
};

sim::OcclusionPattern preset_pattern(const SimulateArgs& a, sim::OcclusionPattern fallback) {
    sim::OcclusionPattern p = fallback;
    if (a.pattern) p.kind = sim::parse_occlusion(*a.pattern);
    if (a.band) std::tie(p.band_start, p.band_end) = parse_band(*a.band);
    return p;
}

json patches_json(const sim::SceneSpec& scene) {
    json patches = json::array();
    for (std::size_t i = 0; i < scene.patches.size(); ++i) {
        const auto& p = scene.patches[i];
        const auto m = sim::material_response(scene, i);
        patches.push_back({{"label", i},
                           {"name", p.name},
                           {"rect", rect_to_json(p.rect)},
                           {"direct_response", m.direct},
                           {"env_response", m.environment}});
    }
    return {{"patches", patches}};
}

int run_simulate(const SimulateArgs& a) {
    const fs::path dir = a.out_dir;
    if (!a.scene && a.preset == "line") {
        sim::LineImageConfig cfg;
        if (a.width) cfg.width = *a.width;
        if (a.height) cfg.height = *a.height;
        if (a.noise) cfg.noise.sigma = *a.noise;
        if (a.seed) cfg.noise.seed = *a.seed;
        if (cfg.width <= 0 || cfg.height <= 0) throw Error(ErrorCode::kInvalidArgument, "line image needs positive dimensions");
        const LinearImage img = sim::make_line_image(cfg);
        fs::create_directories(dir);
        save_image(img, dir / "image.png", 16);
        save_image(img, dir / "image.f64");
        save_json({{"preset", "line"},
                   {"direction", cfg.direction},
                   {"offset", cfg.offset},
                   {"s_min", cfg.s_min},
                   {"s_max", cfg.s_max},
                   {"width", cfg.width},
                   {"height", cfg.height},
                   {"noise", {{"sigma", cfg.noise.sigma}, {"seed", cfg.noise.seed}}}},
                  dir / "line.json");
        return kExitOk;
    }

    sim::SceneSpec scene;
    if (a.scene) {
        scene = sim::load_scene(*a.scene);
        if (a.pattern || a.band) scene = sim::with_occlusion(scene, preset_pattern(a, scene.occlusion));
        if (a.noise) scene.noise.sigma = *a.noise;
        if (a.seed) scene.noise.seed = *a.seed;
    } else {
        sim::LightingConfig cfg = sim::default_lighting(a.direct, a.ambient);
        if (a.noise) cfg.noise.sigma = *a.noise;
        if (a.seed) cfg.noise.seed = *a.seed;
        cfg.theta = a.theta;
        if (a.preset == "colorchecker") {
            sim::GridLayout layout;
            if (a.width) layout.width = *a.width;
            if (a.height) layout.height = *a.height;
            cfg.occlusion = preset_pattern(a, {sim::Occlusion::kHalfGradient, 0, 0});
            scene = sim::make_colorchecker_scene(cfg, layout);
        } else if (a.preset == "two-material") {
            const int w = a.width.value_or(64);
            const int h = a.height.value_or(64);
            cfg.occlusion = preset_pattern(a, {sim::Occlusion::kHalfGradient, w / 4, 3 * w / 4});
            scene = sim::make_two_material_scene(cfg, w, h);
        } else {
            throw Error(ErrorCode::kInvalidArgument, "unknown preset \"" + a.preset + "\"");
        }
    }

    const sim::RenderedScene rendered = sim::render(scene);
    sim::write_rendered(rendered, scene.width, scene.height, dir);
    sim::save_scene(scene, dir / "scene.json");
    save_json(patches_json(scene), dir / "patches.json");
    std::vector<Rect> regions;
    for (const auto& p : scene.patches) regions.push_back(p.rect);
    save_json(regions_to_json(regions), dir / "regions.json");
    return kExitOk;
}

// ---------------------------------------------------------------------------
// convert

struct ConvertArgs {
    std::string image;
    std::string space;
    std::optional<std::string> channel;
    bool histeq = false;
    bool invert = false;
    std::optional<std::string> out;
    std::optional<std::string> out_dir;
};

int run_convert(const ConvertArgs& a) {
    if (a.out.has_value() == a.out_dir.has_value()) {
        throw Error(ErrorCode::kInvalidArgument, "give exactly one of --out (one channel) or --out-dir (all channels)");
    }
    if (a.out && !a.channel) throw Error(ErrorCode::kInvalidArgument, "--out needs --channel");
    const color::ChannelSet set = color::convert(load_image(a.image), color::parse_space(a.space));
    auto present = [&](const std::string& name) {
        ChannelImage ch = color::display_channel(set, name);
        if (a.histeq) ch = histogram_equalize(ch);
        if (a.invert) ch = orgb::invert(ch);
        return ch;
    };
    if (a.out) {
        save_channel_png(present(*a.channel), *a.out);
        return kExitOk;
    }
    fs::create_directories(*a.out_dir);
    for (const auto& [name, ch] : set.channels) {
        if (a.channel && name != *a.channel) continue;
        save_channel_png(present(name), fs::path(*a.out_dir) / (set.space + "_" + name + ".png"));
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// demo

RegionMask index_mask(const std::vector<std::uint8_t>& idx, int w, int h, int cls) {
    RegionMask m(w, h);
    for (std::size_t i = 0; i < idx.size(); ++i) m.set(i, idx[i] == cls);
    return m;
}

json metrics_json(const demo::SegMetrics& m) {
    return {{"g_quality", m.g_quality}, {"dr", m.dr}, {"da", m.da}, {"f", m.f}};
}

// ---------------------------------------------------------------------------
// serve

int run_serve(ServiceOptions options, std::ostream& err) {
    if (const char* env = std::getenv("ORGB_PORT"); env != nullptr && *env != '\0') {
        try {
            options.port = std::stoi(env);
        } catch (const std::exception&) {
            err << "orgb: invalid-argument: ORGB_PORT=\"" << env << "\" is not a port number\n";
            return kExitUsage;
        }
    }
    Service service(options);
    int port = 0;
    try {
        port = service.bind();
    } catch (const Error& e) {
        err << "orgb: " << e.what() << "\n";
        return kExitData;
    }
    err << "orgb: serving on http://" << options.host << ":" << port << "\n" << std::flush;

    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);
    std::thread waiter([&] {
        int sig = 0;
        sigwait(&signals, &sig);
        service.stop();
    });
    service.run();
    pthread_kill(waiter.native_handle(), SIGTERM);
    waiter.join();
    pthread_sigmask(SIG_UNBLOCK, &signals, nullptr);
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Offset correction of RGB images under a two-illuminant model", "orgb"};
    app.require_subcommand(1);
    app.failure_message(CLI::FailureMessage::help);

    // simulate
    SimulateArgs sim_args;
    auto* simulate = app.add_subcommand("simulate", "Render a synthetic scene with known ground truth");
    auto* scene_opt = simulate->add_option("--scene", sim_args.scene, "Scene JSON document")->check(CLI::ExistingFile);
    simulate->add_option("--preset", sim_args.preset, "Built-in scene")
        ->check(CLI::IsMember({"colorchecker", "two-material", "line"}))
        ->excludes(scene_opt);
    simulate->add_option("--pattern", sim_args.pattern, "Occlusion pattern")
        ->check(CLI::IsMember({"none", "full", "half-gradient"}));
    simulate->add_option("--band", sim_args.band, "Penumbra column band \"start,end\"");
    simulate->add_option("--ambient", sim_args.ambient, "Environment light peak response")->excludes(scene_opt);
    simulate->add_option("--direct", sim_args.direct, "Direct light peak response")->excludes(scene_opt);
    simulate->add_option("--noise", sim_args.noise, "Gaussian noise sigma");
    simulate->add_option("--seed", sim_args.seed, "Noise seed");
    simulate->add_option("--width", sim_args.width)->excludes(scene_opt);
    simulate->add_option("--height", sim_args.height)->excludes(scene_opt);
    simulate->add_option("--theta", sim_args.theta, "Incidence angle in radians")->excludes(scene_opt);
    simulate->add_option("--out-dir", sim_args.out_dir, "Output directory")->required();

    // estimate
    std::string est_image;
    std::string est_rect;
    std::string est_method = "ols";
    std::optional<std::string> est_out;
    auto* estimate = app.add_subcommand("estimate", "Estimate the offset from one material region");
    estimate->add_option("--image", est_image, "Input image (.png, .ppm, .f64)")->required();
    estimate->add_option("--rect", est_rect, "Region \"x,y,w,h\"")->required();
    estimate->add_option("--method", est_method)->check(CLI::IsMember({"ols", "theil-sen"}));
    estimate->add_option("--out", est_out, "Epsilon JSON (standard output if omitted)");

    // correct
    std::string cor_image;
    std::string cor_eps;
    std::string cor_out;
    int cor_depth = 16;
    auto* correct_cmd = app.add_subcommand("correct", "Apply (rho - eps) / (1 - eps)");
    correct_cmd->add_option("--image", cor_image)->required();
    correct_cmd->add_option("--eps", cor_eps, "Epsilon JSON from estimate")->required();
    correct_cmd->add_option("--out", cor_out, "Output image (.png, .ppm, .f64)")->required();
    correct_cmd->add_option("--depth", cor_depth, "Bits per sample for PNG/PPM")->check(CLI::IsMember({8, 16}));

    // convert
    ConvertArgs conv;
    auto* convert_cmd = app.add_subcommand("convert", "Write color-space channels as grayscale PNGs");
    convert_cmd->add_option("--image", conv.image)->required();
    convert_cmd->add_option("--space", conv.space)->required()->check(CLI::IsMember({"rg", "hsv", "luv"}));
    convert_cmd->add_option("--channel", conv.channel, "r g | h s v | L u v");
    convert_cmd->add_flag("--histeq", conv.histeq, "Histogram-equalize the channel");
    convert_cmd->add_flag("--invert", conv.invert, "Invert the channel");
    convert_cmd->add_option("--out", conv.out, "Output PNG for one channel");
    convert_cmd->add_option("--out-dir", conv.out_dir, "Directory for <space>_<channel>.png");

    // diagnose
    std::string diag_image;
    std::optional<std::string> diag_regions;
    std::vector<std::string> diag_rects;
    std::optional<std::string> diag_ambient;
    std::optional<std::string> diag_out;
    std::optional<std::string> diag_difference;
    auto* diagnose = app.add_subcommand("diagnose", "Fit color lines per region and their convergence point");
    diagnose->add_option("--image", diag_image)->required();
    diagnose->add_option("--regions", diag_regions, "Regions JSON");
    diagnose->add_option("--rect", diag_rects, "Region \"x,y,w,h\" (repeatable)");
    diagnose->add_option("--ambient", diag_ambient, "Environment-only image to subtract first");
    diagnose->add_option("--difference", diag_difference, "Write the ambient-subtracted image here")->needs("--ambient");
    diagnose->add_option("--out", diag_out, "Report JSON (standard output if omitted)");

    // demo
    auto* demo_cmd = app.add_subcommand("demo", "Downstream shadow-robustness demos");
    demo_cmd->require_subcommand(1);
    std::string seg_image;
    int seg_k = 2;
    std::uint64_t seg_seed = 0;
    std::string seg_out;
    std::optional<std::string> seg_report;
    std::optional<std::string> seg_gt;
    int seg_gt_class = 0;
    auto* segment = demo_cmd->add_subcommand("segment", "k-means on hue-saturation");
    segment->add_option("--image", seg_image)->required();
    segment->add_option("--k", seg_k)->check(CLI::Range(2, 255));
    segment->add_option("--seed", seg_seed);
    segment->add_option("--out", seg_out, "Label PNG (palette)")->required();
    segment->add_option("--report", seg_report, "JSON with cluster sizes and, with --gt, metrics");
    segment->add_option("--gt", seg_gt, "Ground-truth label PNG");
    segment->add_option("--gt-class", seg_gt_class);

    std::string edge_image;
    std::string edge_out;
    demo::CannyOptions canny;
    auto* edges = demo_cmd->add_subcommand("edges", "Canny edges on saturation");
    edges->add_option("--image", edge_image)->required();
    edges->add_option("--sigma", canny.sigma);
    edges->add_option("--lo", canny.lo);
    edges->add_option("--hi", canny.hi);
    edges->add_option("--out", edge_out, "Binary edge PNG")->required();

    std::string met_pred;
    std::string met_gt;
    std::optional<int> met_pred_class;
    int met_gt_class = 0;
    std::optional<std::string> met_out;
    auto* metrics = demo_cmd->add_subcommand("metrics", "Pixel-wise segmentation metrics");
    metrics->add_option("--pred", met_pred, "Predicted label PNG")->required();
    metrics->add_option("--gt", met_gt, "Ground-truth label PNG")->required();
    metrics->add_option("--pred-class", met_pred_class, "Predicted class (best match if omitted)");
    metrics->add_option("--gt-class", met_gt_class);
    metrics->add_option("--out", met_out, "Metrics JSON (standard output if omitted)");

    // serve
    ServiceOptions serve_opts;
    serve_opts.static_root = "web";
    std::string serve_root = "web";
    auto* serve = app.add_subcommand("serve", "HTTP/JSON service and static UI");
    serve->add_option("--host", serve_opts.host);
    serve->add_option("--port", serve_opts.port, "Port (ORGB_PORT overrides)")->check(CLI::Range(0, 65535));
    serve->add_option("--root", serve_root, "Static files directory");
    serve->add_option("--max-images", serve_opts.max_images)->check(CLI::PositiveNumber);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::CallForVersion&) {
        out << "orgb\n";
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "orgb: " << e.what() << "\n" << app.help();
        return kExitUsage;
    }

    try {
        if (simulate->parsed()) return run_simulate(sim_args);
        if (estimate->parsed()) {
            const Epsilon e = estimate_epsilon(load_image(est_image), parse_rect(est_rect), parse_fit_method(est_method));
            emit_json(epsilon_to_json(e), est_out, out);
            return kExitOk;
        }
        if (correct_cmd->parsed()) {
            save_image(correct(load_image(cor_image), load_epsilon(cor_eps)), cor_out, cor_depth);
            return kExitOk;
        }
        if (convert_cmd->parsed()) return run_convert(conv);
        if (diagnose->parsed()) {
            std::vector<Rect> regions;
            if (diag_regions) regions = regions_from_json(load_json(*diag_regions));
            for (const auto& r : diag_rects) regions.push_back(parse_rect(r));
            if (regions.empty()) throw Error(ErrorCode::kInvalidArgument, "give --regions or at least one --rect");
            LinearImage img = load_image(diag_image);
            if (diag_ambient) img = subtract_ambient(img, load_image(*diag_ambient));
            if (diag_difference) save_image(img, *diag_difference);
            emit_json(diagnose_regions(img, regions), diag_out, out);
            return kExitOk;
        }
        if (segment->parsed()) {
            const LinearImage img = load_image(seg_image);
            const demo::LabelImage labels = demo::kmeans_segment(img, seg_k, seg_seed);
            std::vector<std::uint8_t> idx(labels.labels.begin(), labels.labels.end());
            save_index_png(labels.width, labels.height, idx, seg_out);
            if (seg_report) {
                std::vector<std::size_t> sizes(static_cast<std::size_t>(labels.k), 0);
                for (int l : labels.labels) ++sizes[static_cast<std::size_t>(l)];
                json report = {{"k", labels.k}, {"seed", seg_seed}, {"cluster_sizes", sizes}};
                if (seg_gt) {
                    int w = 0;
                    int h = 0;
                    const auto gt_idx = load_index_png(*seg_gt, w, h);
                    if (w != labels.width || h != labels.height) {
                        throw Error(ErrorCode::kDimensionMismatch, "ground truth size differs from the image");
                    }
                    const RegionMask gt = index_mask(gt_idx, w, h, seg_gt_class);
                    const int best = demo::best_matching_cluster(labels, gt);
                    report["gt_class"] = seg_gt_class;
                    report["matched_cluster"] = best;
                    report["metrics"] = metrics_json(demo::segmentation_metrics(demo::label_mask(labels, best), gt));
                }
                save_json(report, *seg_report);
            }
            return kExitOk;
        }
        if (edges->parsed()) {
            const color::ChannelSet hsv = color::to_hsv(load_image(edge_image));
            save_channel_png(demo::canny_edges(hsv.channel("s"), canny), edge_out);
            return kExitOk;
        }
        if (metrics->parsed()) {
            int pw = 0;
            int ph = 0;
            int gw = 0;
            int gh = 0;
            const auto pred_idx = load_index_png(met_pred, pw, ph);
            const auto gt_idx = load_index_png(met_gt, gw, gh);
            if (pw != gw || ph != gh) throw Error(ErrorCode::kDimensionMismatch, "label images differ in size");
            const RegionMask gt = index_mask(gt_idx, gw, gh, met_gt_class);
            int cls = 0;
            if (met_pred_class) {
                cls = *met_pred_class;
            } else {
                demo::LabelImage labels{pw, ph, 0, std::vector<int>(pred_idx.begin(), pred_idx.end())};
                for (int l : labels.labels) labels.k = std::max(labels.k, l + 1);
                cls = demo::best_matching_cluster(labels, gt);
            }
            json doc = metrics_json(demo::segmentation_metrics(index_mask(pred_idx, pw, ph, cls), gt));
            doc["pred_class"] = cls;
            doc["gt_class"] = met_gt_class;
            emit_json(doc, met_out, out);
            return kExitOk;
        }
        if (serve->parsed()) {
            serve_opts.static_root = serve_root;
            return run_serve(serve_opts, err);
        }
    } catch (const Error& e) {
        err << "orgb: " << e.what() << "\n";
        return kExitData;
    } catch (const fs::filesystem_error& e) {
        err << "orgb: io: " << e.what() << "\n";
        return kExitData;
    } catch (const json::exception& e) {
        err << "orgb: format: " << e.what() << "\n";
        return kExitData;
    }
    err << app.help();
    return kExitUsage;
}

}  // namespace orgb::app
