#include "orgb/app/session_store.hpp"

#include <cstring>
#include <mutex>
#include <vector>

#include <openssl/evp.h>

#include "orgb/error.hpp"
#include "orgb/image_io.hpp"

namespace orgb::app {
namespace {

std::string to_hex(const unsigned char* data, std::size_t n) {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out(n * 2, '0');
    for (std::size_t i = 0; i < n; ++i) {
        out[2 * i] = kDigits[data[i] >> 4];
        out[2 * i + 1] = kDigits[data[i] & 0xF];
    }
    return out;
}

}  // namespace

std::string sha256_hex(std::span<const std::uint8_t> bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw Error(ErrorCode::kIo, "SHA-256 digest failed");
    }
    return to_hex(digest, len);
}

std::string image_content_id(const LinearImage& img) {
    return sha256_hex(encode_image(img, ImageFormat::kFloat64));
}

std::string epsilon_digest(const Rgb& eps) {
    unsigned char raw[sizeof(double) * 3];
    std::memcpy(raw, eps.data(), sizeof(raw));
    return to_hex(raw, sizeof(raw));
}

SessionStore::SessionStore(std::size_t max_images) : max_images_(max_images) {
    if (max_images_ == 0) throw Error(ErrorCode::kInvalidArgument, "session store needs room for at least one image");
}

StoredImage SessionStore::put_bytes(std::span<const std::uint8_t> bytes, std::string filename) {
    std::string id = sha256_hex(bytes);
    if (auto hit = get(id)) return *hit;
    auto img = std::make_shared<const LinearImage>(decode_image(bytes));
    return insert(std::move(id), std::move(img), std::move(filename));
}

StoredImage SessionStore::put_image(LinearImage img, std::string filename) {
    std::string id = image_content_id(img);
    if (auto hit = get(id)) return *hit;
    return insert(std::move(id), std::make_shared<const LinearImage>(std::move(img)), std::move(filename));
}

StoredImage SessionStore::insert(std::string id, std::shared_ptr<const LinearImage> img, std::string filename) {
    std::unique_lock lock(mutex_);
    auto it = entries_.find(id);
    if (it == entries_.end()) {
        auto entry = std::make_unique<Entry>();
        entry->stored = StoredImage{id, std::move(img), std::move(filename), std::chrono::system_clock::now()};
        it = entries_.emplace(id, std::move(entry)).first;
    }
    it->second->last_used.store(++clock_);
    StoredImage out = it->second->stored;
    evict_locked();
    return out;
}

void SessionStore::evict_locked() {
    while (entries_.size() > max_images_) {
        auto oldest = entries_.begin();
        for (auto it = entries_.begin(); it != entries_.end(); ++it) {
            if (it->second->last_used.load() < oldest->second->last_used.load()) oldest = it;
        }
        const std::string gone = oldest->first;
        entries_.erase(oldest);
        std::erase_if(derived_, [&](const auto& kv) { return kv.first.first == gone || kv.second == gone; });
    }
}

std::optional<StoredImage> SessionStore::get(const std::string& id) const {
    std::shared_lock lock(mutex_);
    auto it = entries_.find(id);
    if (it == entries_.end()) return std::nullopt;
    it->second->last_used.store(++clock_);
    return it->second->stored;
}

std::optional<std::string> SessionStore::derived(const std::string& id, const Rgb& eps) const {
    std::shared_lock lock(mutex_);
    auto it = derived_.find({id, epsilon_digest(eps)});
    if (it == derived_.end() || !entries_.contains(it->second)) return std::nullopt;
    return it->second;
}

void SessionStore::set_derived(const std::string& id, const Rgb& eps, const std::string& derived_id) {
    std::unique_lock lock(mutex_);
    if (!entries_.contains(id) || !entries_.contains(derived_id)) return;
    derived_[{id, epsilon_digest(eps)}] = derived_id;
}

std::size_t SessionStore::size() const {
    std::shared_lock lock(mutex_);
    return entries_.size();
}

}  // namespace orgb::app
