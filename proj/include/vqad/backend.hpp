#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "vqad/image.hpp"
#include "vqad/region_map.hpp"

namespace vqad {

struct QueryRequest {
    std::string model_id;
    std::string prompt_text;
    std::vector<std::uint8_t> image_png;
    double temperature = 0.0;
};

struct QueryResponse {
    std::string raw_text;
    std::string model_id;
    double latency_ms = 0.0;
    bool from_cache = false;
};

std::string sha256_hex(std::string_view bytes);

// Stable content address over (model_id, prompt_text, image bytes), each
// field length-framed before hashing.
std::string request_digest(const QueryRequest& req);

// Harness-side knowledge handed to deterministic test backends. The live
// client must ignore it.
struct QueryContext {
    const RegionMap* regions = nullptr;
    const Mask* gt_mask = nullptr;
};

class Backend {
public:
    virtual ~Backend() = default;
    virtual QueryResponse query(const QueryRequest& req, const QueryContext& ctx) = 0;
    virtual std::string name() const = 0;
};

// "region i: r" for every region with overlap ratio r = |region ∩ GT| /
// |region| > 0, three decimals, ascending ids, "; "-joined; "none" when no
// region overlaps.
QueryResponse oracle_query(const RegionMap& rm, const Mask& gt_mask);

class OracleBackend : public Backend {
public:
    QueryResponse query(const QueryRequest& req, const QueryContext& ctx) override;
    std::string name() const override { return "oracle"; }
};

// Emits the same fixed score for every region id.
class ConstantBackend : public Backend {
public:
    explicit ConstantBackend(double score) : score_(score) {}
    QueryResponse query(const QueryRequest& req, const QueryContext& ctx) override;
    std::string name() const override { return "constant"; }

private:
    double score_;
};

// Append-only newline-delimited JSON store keyed by request digest.
// Records: {digest, model_id, prompt_sha, raw_text, timestamp}.
class ResponseCache {
public:
    // Loads existing records; creates the file when absent and create is set.
    explicit ResponseCache(std::filesystem::path file, bool create = true);

    std::optional<QueryResponse> get(const std::string& digest) const;
    // First put wins; duplicate digests are ignored.
    void put(const std::string& digest, const std::string& model_id,
             const std::string& prompt_sha, const std::string& raw_text);

    std::size_t size() const;
    const std::filesystem::path& path() const { return file_; }

private:
    std::filesystem::path file_;
    std::map<std::string, std::string> records_; // digest -> raw_text
    mutable std::shared_mutex mutex_;            // concurrent reads, exclusive appends
};

class ReplayBackend : public Backend {
public:
    explicit ReplayBackend(std::shared_ptr<ResponseCache> cache) : cache_(std::move(cache)) {}
    QueryResponse query(const QueryRequest& req, const QueryContext& ctx) override;
    std::string name() const override { return "replay"; }

private:
    std::shared_ptr<ResponseCache> cache_;
};

struct HttpResult {
    int status = 0; // 0 = connection-level failure
    std::string body;
};

using HttpHeader = std::pair<std::string, std::string>;
using HttpTransport = std::function<HttpResult(const std::string& url, const std::string& body,
                                               const std::vector<HttpHeader>& headers)>;
using SleepFn = std::function<void(double seconds)>;

struct LiveConfig {
    std::string base_url = "https://api.openai.com";
    std::string endpoint_path = "/v1/chat/completions";
    std::string api_key_env = "GPT4VAD_API_KEY";
    int max_attempts = 5;
    double backoff_base_s = 1.0;
    double backoff_factor = 2.0;
    double requests_per_minute = 0.0; // 0 = unlimited
    double timeout_s = 120.0;
};

// Spaces request starts at least 60/rpm seconds apart across threads.
class RateLimiter {
public:
    using ClockFn = std::function<double()>; // seconds, monotonic
    RateLimiter(double requests_per_minute, ClockFn clock = {}, SleepFn sleep = {});
    void acquire();

private:
    double min_interval_s_;
    double next_allowed_ = 0.0;
    ClockFn clock_;
    SleepFn sleep_;
    std::mutex mutex_;
};

// OpenAI-style chat-completions client with one embedded image. Transient
// statuses (429/5xx and connection failures) retry with exponential backoff.
class LiveBackend : public Backend {
public:
    explicit LiveBackend(LiveConfig cfg);
    // Test seam: inject the HTTP call and the backoff sleeper.
    LiveBackend(LiveConfig cfg, HttpTransport transport, SleepFn sleep);

    QueryResponse query(const QueryRequest& req, const QueryContext& ctx) override;
    std::string name() const override { return "live"; }

    // Request body as sent on the wire, exposed for payload-integrity tests.
    std::string build_request_body(const QueryRequest& req) const;

private:
    LiveConfig cfg_;
    HttpTransport transport_;
    SleepFn sleep_;
    RateLimiter limiter_;
};

std::string base64_encode(const std::uint8_t* data, std::size_t n);

} // namespace vqad
