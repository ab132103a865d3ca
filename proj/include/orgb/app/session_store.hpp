#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>

#include "orgb/image.hpp"

namespace orgb::app {

/// Lowercase hex SHA-256.
std::string sha256_hex(std::span<const std::uint8_t> bytes);

/// Id of an in-memory image: SHA-256 of its PF64 encoding.
std::string image_content_id(const LinearImage& img);

/// Exact digest of an epsilon triple (hex of the IEEE bits).
std::string epsilon_digest(const Rgb& eps);

struct StoredImage {
    std::string id;
    std::shared_ptr<const LinearImage> image;
    std::string filename;
    std::chrono::system_clock::time_point created;
};

/// Content-addressed image cache with least-recently-used eviction.
///
/// Lookups take a shared lock and only bump an atomic use counter, so
/// concurrent readers never block each other. Images are handed out as
/// shared_ptr<const> snapshots and stay valid after eviction.
class SessionStore {
public:
    explicit SessionStore(std::size_t max_images = 64);

    /// Decodes an upload (PNG, PPM or PF64); the id hashes the raw bytes.
    StoredImage put_bytes(std::span<const std::uint8_t> bytes, std::string filename);
    /// Stores a computed image under image_content_id.
    StoredImage put_image(LinearImage img, std::string filename);

    std::optional<StoredImage> get(const std::string& id) const;

    /// Corrected derivative of `id` under `eps`, if still cached.
    std::optional<std::string> derived(const std::string& id, const Rgb& eps) const;
    void set_derived(const std::string& id, const Rgb& eps, const std::string& derived_id);

    std::size_t size() const;
    std::size_t capacity() const noexcept { return max_images_; }

private:
    struct Entry {
        StoredImage stored;
        mutable std::atomic<std::uint64_t> last_used{0};
    };

    StoredImage insert(std::string id, std::shared_ptr<const LinearImage> img, std::string filename);
    void evict_locked();

    std::size_t max_images_;
    mutable std::shared_mutex mutex_;
    mutable std::atomic<std::uint64_t> clock_{0};
    std::unordered_map<std::string, std::unique_ptr<Entry>> entries_;
    std::map<std::pair<std::string, std::string>, std::string> derived_;
};

}  // namespace orgb::app
