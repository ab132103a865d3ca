#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <string>

#include "orgb/app/session_store.hpp"

namespace orgb::app {

struct ServiceOptions {
    std::string host = "127.0.0.1";
    int port = 8080;                      // 0 picks a free port
    std::filesystem::path static_root;    // served at "/" when it exists
    std::size_t max_images = 64;
    std::size_t max_upload_bytes = 64u << 20;
    std::size_t max_scatter_points = 20000;
};

/// HTTP/JSON front end over a SessionStore.
///
///   POST /api/images             raw or multipart image body -> 201 {id, width, height}
///   GET  /api/images/{id}        {id, width, height, filename, created}
///   GET  /api/images/{id}.png    8-bit sRGB rendering
///   POST /api/estimate           {id, rect, method?} -> epsilon sidecar
///   POST /api/correct            {id, epsilon} -> {id, source, width, height, epsilon}
///   GET  /api/scatter            ?id&rect&stride -> {points, stride, total}
///   GET  /api/convert            ?id&space&channel&histeq&invert -> grayscale PNG
///   POST /api/diagnose           {id, regions} -> convergence report
///
/// Errors are {"error": code, "detail": text}.
class Service {
public:
    explicit Service(ServiceOptions options);
    ~Service();
    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    /// Binds the listening socket and returns the bound port. kIo on failure.
    int bind();
    /// Serves until stop(). Call bind() first.
    void run();
    void stop();
    bool running() const;

    SessionStore& store() noexcept;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace orgb::app
