#include "orgb/app/service.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <ctime>
#include <functional>
#include <optional>

#include <httplib.h>
#include <json.hpp>

#include "orgb/color_spaces.hpp"
#include "orgb/enhance.hpp"
#include "orgb/error.hpp"
#include "orgb/image_io.hpp"
#include "orgb/offset.hpp"
#include "orgb/offset_io.hpp"

namespace orgb::app {
namespace {

using nlohmann::json;

constexpr const char* kJson = "application/json";
constexpr const char* kPng = "image/png";

// Request problems that are not library errors.
struct HttpError {
    int status;
    std::string code;
    std::string detail;
};

int status_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::kEmptyRegion:
        case ErrorCode::kFlatRegion:
        case ErrorCode::kInvalidEpsilon:
        case ErrorCode::kDegenerateBundle:
        case ErrorCode::kDegenerateK: return 422;
        case ErrorCode::kFormat: return 415;
        case ErrorCode::kIo: return 500;
        default: return 400;
    }
}

void send_error(httplib::Response& res, int status, std::string_view code, const std::string& detail) {
    res.status = status;
    res.set_content(json{{"error", code}, {"detail", detail}}.dump(), kJson);
}

void send_json(httplib::Response& res, const json& body, int status = 200) {
    res.status = status;
    res.set_content(body.dump(), kJson);
}

template <class F>
void guarded(httplib::Response& res, F&& body) {
    try {
        body();
    } catch (const HttpError& e) {
        send_error(res, e.status, e.code, e.detail);
    } catch (const Error& e) {
        send_error(res, status_for(e.code()), error_code_name(e.code()), e.detail());
    } catch (const json::exception& e) {
        send_error(res, 400, "bad-request", e.what());
    } catch (const std::exception& e) {
        send_error(res, 500, "internal", e.what());
    }
}

json parse_body(const httplib::Request& req) {
    json doc = json::parse(req.body, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) throw HttpError{400, "bad-request", "request body must be a JSON object"};
    return doc;
}

const json& require(const json& doc, const char* key) {
    auto it = doc.find(key);
    if (it == doc.end()) throw HttpError{400, "bad-request", std::string("missing field \"") + key + "\""};
    return *it;
}

std::string require_param(const httplib::Request& req, const char* key) {
    if (!req.has_param(key)) throw HttpError{400, "bad-request", std::string("missing query parameter \"") + key + "\""};
    return req.get_param_value(key);
}

bool flag_param(const httplib::Request& req, const char* key) {
    if (!req.has_param(key)) return false;
    const std::string v = req.get_param_value(key);
    return v.empty() || v == "1" || v == "true" || v == "yes";
}

std::string iso_time(std::chrono::system_clock::time_point t) {
    const std::time_t tt = std::chrono::system_clock::to_time_t(t);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void send_png(httplib::Response& res, const std::vector<std::uint8_t>& bytes) {
    res.status = 200;
    res.set_header("Cache-Control", "public, max-age=31536000, immutable");
    res.set_content(std::string(bytes.begin(), bytes.end()), kPng);
}

}  // namespace

struct Service::Impl {
    ServiceOptions options;
    SessionStore store;
    httplib::Server server;
    std::atomic<bool> bound{false};

    explicit Impl(ServiceOptions opts) : options(std::move(opts)), store(options.max_images) { routes(); }

    StoredImage lookup(const std::string& id) {
        auto hit = store.get(id);
        if (!hit) throw HttpError{404, "not-found", "no image with id " + id};
        return *hit;
    }

    void routes() {
        server.set_payload_max_length(options.max_upload_bytes);
        // The library default adds SO_REUSEPORT, which lets a second server
        // share an occupied port instead of failing to bind.
        server.set_socket_options([](socket_t sock) {
            const int yes = 1;
            setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
        });
        server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
            if (!res.body.empty()) return;
            switch (res.status) {
                case 404: send_error(res, 404, "not-found", "no such resource"); break;
                case 413: send_error(res, 413, "payload-too-large", "request body exceeds the upload limit"); break;
                default: send_error(res, res.status, "http-error", httplib::status_message(res.status)); break;
            }
        });

        server.Post("/api/images", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] { upload(req, res); });
        });
        server.Get(R"(/api/images/([0-9a-f]{64})\.png)", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
                const StoredImage img = lookup(req.matches[1]);
                send_png(res, encode_image(*img.image, ImageFormat::kPng, 8));
            });
        });
        server.Get(R"(/api/images/([0-9a-f]{64}))", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
                const StoredImage img = lookup(req.matches[1]);
                send_json(res, {{"id", img.id},
                                {"width", img.image->width()},
                                {"height", img.image->height()},
                                {"filename", img.filename},
                                {"created", iso_time(img.created)}});
            });
        });
        server.Post("/api/estimate", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
                const json body = parse_body(req);
                const StoredImage img = lookup(require(body, "id").get<std::string>());
                const Rect rect = rect_from_json(require(body, "rect"));
                const FitMethod method =
                    body.contains("method") ? parse_fit_method(body["method"].get<std::string>()) : FitMethod::kOls;
                send_json(res, epsilon_to_json(estimate_epsilon(*img.image, rect, method)));
            });
        });
        server.Post("/api/correct", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] { correct_image(req, res); });
        });
        server.Get("/api/scatter", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] { scatter(req, res); });
        });
        server.Get("/api/convert", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
                const StoredImage img = lookup(require_param(req, "id"));
                const color::Space space = color::parse_space(require_param(req, "space"));
                const color::ChannelSet set = color::convert(*img.image, space);
                const std::string name = req.has_param("channel") ? req.get_param_value("channel") : set.channels.front().first;
                ChannelImage ch = color::display_channel(set, name);
                if (flag_param(req, "histeq")) ch = histogram_equalize(ch);
                if (flag_param(req, "invert")) ch = invert(ch);
                send_png(res, encode_channel_png(ch));
            });
        });
        server.Post("/api/diagnose", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
                const json body = parse_body(req);
                const StoredImage img = lookup(require(body, "id").get<std::string>());
                send_json(res, diagnose_regions(*img.image, regions_from_json(require(body, "regions"))));
            });
        });

        if (!options.static_root.empty() && std::filesystem::is_directory(options.static_root)) {
            server.set_mount_point("/", options.static_root.string());
            server.set_file_extension_and_mimetype_mapping("js", "text/javascript");
            server.set_file_extension_and_mimetype_mapping("mjs", "text/javascript");
        }
    }

    void upload(const httplib::Request& req, httplib::Response& res) {
        std::string filename;
        const std::string* payload = &req.body;
        if (req.is_multipart_form_data()) {
            if (req.files.empty()) throw HttpError{400, "bad-request", "multipart upload has no file part"};
            const auto& part = req.has_file("file") ? req.files.find("file")->second : req.files.begin()->second;
            filename = part.filename;
            payload = &part.content;
        } else if (req.has_param("filename")) {
            filename = req.get_param_value("filename");
        }
        if (payload->empty()) throw HttpError{400, "bad-request", "empty upload"};
        const auto* bytes = reinterpret_cast<const std::uint8_t*>(payload->data());
        const StoredImage img = store.put_bytes(std::span(bytes, payload->size()), filename);
        send_json(res, {{"id", img.id}, {"width", img.image->width()}, {"height", img.image->height()}}, 201);
    }

    void correct_image(const httplib::Request& req, httplib::Response& res) {
        const json body = parse_body(req);
        const StoredImage src = lookup(require(body, "id").get<std::string>());
        const json& eps_doc = require(body, "epsilon");
        const Epsilon eps = epsilon_from_json(eps_doc.is_array() ? json{{"epsilon", eps_doc}} : eps_doc);

        std::string id;
        if (auto cached = store.derived(src.id, eps.eps)) {
            id = *cached;
        } else {
            id = store.put_image(correct(*src.image, eps), src.filename).id;
            store.set_derived(src.id, eps.eps, id);
        }
        send_json(res, {{"id", id},
                        {"source", src.id},
                        {"width", src.image->width()},
                        {"height", src.image->height()},
                        {"epsilon", eps.eps}});
    }

    void scatter(const httplib::Request& req, httplib::Response& res) {
        const StoredImage img = lookup(require_param(req, "id"));
        const LinearImage& image = *img.image;
        const Rect rect = req.has_param("rect") ? parse_rect(req.get_param_value("rect"))
                                                : Rect{0, 0, image.width(), image.height()};
        long long stride = 1;
        if (req.has_param("stride")) {
            try {
                stride = std::stoll(req.get_param_value("stride"));
            } catch (const std::exception&) {
                throw HttpError{400, "bad-request", "stride must be a positive integer"};
            }
            if (stride < 1) throw HttpError{400, "bad-request", "stride must be a positive integer"};
        }
        const RegionMask mask = make_mask_rect(rect, image.width(), image.height());
        const std::vector<std::size_t> idx = mask.indices();
        const std::size_t cap = options.max_scatter_points;
        auto effective = static_cast<std::size_t>(stride);
        if ((idx.size() + effective - 1) / effective > cap) effective = (idx.size() + cap - 1) / cap;

        json points = json::array();
        for (std::size_t i = 0; i < idx.size(); i += effective) points.push_back(image.pixel(idx[i]));
        send_json(res, {{"points", std::move(points)},
                        {"stride", effective},
                        {"total", idx.size()},
                        {"rect", rect_to_json(clip_rect(rect, image.width(), image.height()))}});
    }
};

Service::Service(ServiceOptions options) : impl_(std::make_unique<Impl>(std::move(options))) {}

Service::~Service() { stop(); }

int Service::bind() {
    int port = 0;
    if (impl_->options.port == 0) {
        port = impl_->server.bind_to_any_port(impl_->options.host);
        if (port <= 0) throw Error(ErrorCode::kIo, "cannot bind " + impl_->options.host + " on any port");
    } else {
        if (!impl_->server.bind_to_port(impl_->options.host, impl_->options.port)) {
            throw Error(ErrorCode::kIo,
                        "cannot bind " + impl_->options.host + ":" + std::to_string(impl_->options.port));
        }
        port = impl_->options.port;
    }
    impl_->bound = true;
    return port;
}

void Service::run() {
    if (!impl_->bound) throw Error(ErrorCode::kIo, "service is not bound");
    impl_->server.listen_after_bind();
}

void Service::stop() {
    if (impl_->server.is_running()) impl_->server.stop();
}

bool Service::running() const { return impl_->server.is_running(); }

SessionStore& Service::store() noexcept { return impl_->store; }

}  // namespace orgb::app
