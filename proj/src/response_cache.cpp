#include <chrono>
#include <fstream>
#include <shared_mutex>

#include <json.hpp>

#include "vqad/backend.hpp"
#include "vqad/error.hpp"

namespace vqad {

using nlohmann::json;

ResponseCache::ResponseCache(std::filesystem::path file, bool create) : file_(std::move(file)) {
    namespace fs = std::filesystem;
    if (!fs::exists(file_)) {
        if (!create)
            raise(errc::config, "response cache not found: " + file_.string());
        if (file_.has_parent_path())
            fs::create_directories(file_.parent_path());
        std::ofstream touch(file_, std::ios::app | std::ios::binary);
        if (!touch)
            raise(errc::io, "cannot create response cache: " + file_.string());
        return;
    }

    std::ifstream in(file_, std::ios::binary);
    if (!in)
        raise(errc::io, "cannot open response cache: " + file_.string());
    std::string line;
    std::size_t offset = 0;
    while (std::getline(in, line)) {
        const std::size_t record_offset = offset;
        offset += line.size() + 1;
        if (line.empty())
            continue;
        json rec = json::parse(line, nullptr, false);
        if (rec.is_discarded() || !rec.is_object() || !rec.contains("digest") || !rec.contains("raw_text") ||
            !rec["digest"].is_string() || !rec["raw_text"].is_string())
            raise(errc::cache_corrupt, "corrupt cache record at byte offset " + std::to_string(record_offset) +
                                           " in " + file_.string());
        // First record wins on duplicate digests.
        records_.emplace(rec["digest"].get<std::string>(), rec["raw_text"].get<std::string>());
    }
}

std::optional<QueryResponse> ResponseCache::get(const std::string& digest) const {
    std::shared_lock lock(mutex_);
    const auto it = records_.find(digest);
    if (it == records_.end())
        return std::nullopt;
    QueryResponse resp;
    resp.raw_text = it->second;
    resp.from_cache = true;
    return resp;
}

void ResponseCache::put(const std::string& digest, const std::string& model_id,
                        const std::string& prompt_sha, const std::string& raw_text) {
    std::unique_lock lock(mutex_);
    if (records_.contains(digest))
        return;
    json rec;
    rec["digest"] = digest;
    rec["model_id"] = model_id;
    rec["prompt_sha"] = prompt_sha;
    rec["raw_text"] = raw_text;
    rec["timestamp"] = std::chrono::duration_cast<std::chrono::milliseconds>(
                           std::chrono::system_clock::now().time_since_epoch())
                           .count();
    std::ofstream out(file_, std::ios::app | std::ios::binary);
    if (!out)
        raise(errc::io, "cannot append to response cache: " + file_.string());
    out << rec.dump() << '\n';
    out.flush();
    records_.emplace(digest, raw_text);
}

std::size_t ResponseCache::size() const {
    std::shared_lock lock(mutex_);
    return records_.size();
}

} // namespace vqad
