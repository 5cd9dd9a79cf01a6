#include <algorithm>
#include <cstdio>
#include <vector>

#include "vqad/backend.hpp"
#include "vqad/error.hpp"

namespace vqad {

QueryResponse oracle_query(const RegionMap& rm, const Mask& gt_mask) {
    if (rm.width != gt_mask.width || rm.height != gt_mask.height)
        raise(errc::invalid_input, "oracle_query: region map and GT mask dimensions disagree");

    std::vector<std::int64_t> overlap(rm.regions.size() + 1, 0);
    for (std::size_t i = 0; i < rm.labels.size(); ++i)
        if (gt_mask.data[i])
            ++overlap[rm.labels[i]];

    std::string text;
    char buf[64];
    for (const auto& region : rm.regions) {
        if (overlap[region.id] == 0)
            continue;
        const double ratio = static_cast<double>(overlap[region.id]) / region.area;
        if (!text.empty())
            text += "; ";
        std::snprintf(buf, sizeof(buf), "region %u: %.3f", static_cast<unsigned>(region.id), ratio);
        text += buf;
    }
    if (text.empty())
        text = "none";

    QueryResponse resp;
    resp.raw_text = std::move(text);
    resp.model_id = "oracle";
    return resp;
}

QueryResponse OracleBackend::query(const QueryRequest& req, const QueryContext& ctx) {
    (void)req;
    if (!ctx.regions || !ctx.gt_mask)
        raise(errc::invalid_input, "oracle backend requires region map and GT mask context");
    return oracle_query(*ctx.regions, *ctx.gt_mask);
}

QueryResponse ConstantBackend::query(const QueryRequest& req, const QueryContext& ctx) {
    (void)req;
    if (!ctx.regions)
        raise(errc::invalid_input, "constant backend requires region map context");
    std::string text;
    char buf[64];
    for (const auto& region : ctx.regions->regions) {
        if (!text.empty())
            text += "; ";
        std::snprintf(buf, sizeof(buf), "region %u: %g", static_cast<unsigned>(region.id), score_);
        text += buf;
    }
    QueryResponse resp;
    resp.raw_text = std::move(text);
    resp.model_id = "constant";
    return resp;
}

QueryResponse ReplayBackend::query(const QueryRequest& req, const QueryContext& ctx) {
    (void)ctx;
    const std::string digest = request_digest(req);
    auto hit = cache_->get(digest);
    if (!hit)
        raise(errc::cache_miss, "replay miss: no recorded response for digest " + digest);
    hit->model_id = req.model_id;
    return *hit;
}

std::string base64_encode(const std::uint8_t* data, std::size_t n) {
    static const char* alphabet = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
    std::string out;
    out.reserve((n + 2) / 3 * 4);
    std::size_t i = 0;
    for (; i + 3 <= n; i += 3) {
        const std::uint32_t v = (data[i] << 16) | (data[i + 1] << 8) | data[i + 2];
        out.push_back(alphabet[(v >> 18) & 0x3f]);
        out.push_back(alphabet[(v >> 12) & 0x3f]);
        out.push_back(alphabet[(v >> 6) & 0x3f]);
        out.push_back(alphabet[v & 0x3f]);
    }
    if (i + 1 == n) {
        const std::uint32_t v = data[i] << 16;
        out.push_back(alphabet[(v >> 18) & 0x3f]);
        out.push_back(alphabet[(v >> 12) & 0x3f]);
        out += "==";
    } else if (i + 2 == n) {
        const std::uint32_t v = (data[i] << 16) | (data[i + 1] << 8);
        out.push_back(alphabet[(v >> 18) & 0x3f]);
        out.push_back(alphabet[(v >> 12) & 0x3f]);
        out.push_back(alphabet[(v >> 6) & 0x3f]);
        out += "=";
    }
    return out;
}

} // namespace vqad
