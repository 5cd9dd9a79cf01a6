#include <chrono>
#include <cstdlib>
#include <thread>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>
#include <json.hpp>

#include "vqad/backend.hpp"
#include "vqad/error.hpp"

namespace vqad {

using nlohmann::json;

namespace {

double monotonic_seconds() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch()).count();
}

void real_sleep(double seconds) {
    if (seconds > 0)
        std::this_thread::sleep_for(std::chrono::duration<double>(seconds));
}

bool transient_status(int status) {
    return status == 0 || status == 429 || (status >= 500 && status < 600);
}

} // namespace

RateLimiter::RateLimiter(double requests_per_minute, ClockFn clock, SleepFn sleep)
    : min_interval_s_(requests_per_minute > 0 ? 60.0 / requests_per_minute : 0.0),
      clock_(clock ? std::move(clock) : ClockFn(&monotonic_seconds)),
      sleep_(sleep ? std::move(sleep) : SleepFn(&real_sleep)) {}

void RateLimiter::acquire() {
    if (min_interval_s_ <= 0)
        return;
    double wait = 0;
    {
        std::lock_guard lock(mutex_);
        const double now = clock_();
        const double start = std::max(now, next_allowed_);
        wait = start - now;
        next_allowed_ = start + min_interval_s_;
    }
    if (wait > 0)
        sleep_(wait);
}

LiveBackend::LiveBackend(LiveConfig cfg) : LiveBackend(std::move(cfg), nullptr, nullptr) {}

LiveBackend::LiveBackend(LiveConfig cfg, HttpTransport transport, SleepFn sleep)
    : cfg_(std::move(cfg)),
      transport_(std::move(transport)),
      sleep_(sleep ? std::move(sleep) : SleepFn(&real_sleep)),
      limiter_(cfg_.requests_per_minute, {}, sleep_) {
    if (!transport_) {
        transport_ = [this](const std::string& url, const std::string& body,
                            const std::vector<HttpHeader>& headers) -> HttpResult {
            httplib::Client client(cfg_.base_url);
            client.set_connection_timeout(static_cast<time_t>(cfg_.timeout_s));
            client.set_read_timeout(static_cast<time_t>(cfg_.timeout_s), 0);
            httplib::Headers hh;
            for (const auto& [k, v] : headers)
                hh.emplace(k, v);
            auto res = client.Post(url, hh, body, "application/json");
            if (!res)
                return {0, ""};
            return {res->status, res->body};
        };
    }
}

std::string LiveBackend::build_request_body(const QueryRequest& req) const {
    json body;
    body["model"] = req.model_id;
    body["temperature"] = req.temperature;
    json content = json::array();
    content.push_back({{"type", "text"}, {"text", req.prompt_text}});
    content.push_back(
        {{"type", "image_url"},
         {"image_url",
          {{"url", "data:image/png;base64," + base64_encode(req.image_png.data(), req.image_png.size())}}}});
    body["messages"] = json::array({json{{"role", "user"}, {"content", content}}});
    return body.dump();
}

QueryResponse LiveBackend::query(const QueryRequest& req, const QueryContext& ctx) {
    (void)ctx; // the live client must not see harness-side ground truth
    const char* key = std::getenv(cfg_.api_key_env.c_str());
    if (!key || !*key)
        raise(errc::config, "missing API credentials: set " + cfg_.api_key_env);

    const std::string body = build_request_body(req);
    const std::vector<HttpHeader> headers{{"Authorization", std::string("Bearer ") + key}};

    int last_status = 0;
    std::string last_body;
    const auto t0 = std::chrono::steady_clock::now();
    for (int attempt = 1; attempt <= cfg_.max_attempts; ++attempt) {
        limiter_.acquire();
        const HttpResult res = transport_(cfg_.endpoint_path, body, headers);
        last_status = res.status;
        last_body = res.body;
        if (res.status == 200) {
            json parsed = json::parse(res.body, nullptr, false);
            if (parsed.is_discarded() || !parsed.contains("choices") || parsed["choices"].empty())
                raise(errc::transport, "malformed completion response");
            const auto& msg = parsed["choices"][0]["message"];
            QueryResponse out;
            out.raw_text = msg.value("content", "");
            out.model_id = parsed.value("model", req.model_id);
            out.latency_ms =
                std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
            return out;
        }
        if (!transient_status(res.status))
            raise(errc::transport, "backend rejected request with HTTP " + std::to_string(res.status) +
                                       ": " + res.body.substr(0, 200));
        if (attempt < cfg_.max_attempts)
            sleep_(cfg_.backoff_base_s * std::pow(cfg_.backoff_factor, attempt - 1));
    }
    raise(errc::transport, "retries exhausted after " + std::to_string(cfg_.max_attempts) +
                               " attempts; last HTTP status " + std::to_string(last_status));
}

} // namespace vqad
