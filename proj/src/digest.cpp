#include <array>
#include <cstring>

#include <openssl/evp.h>

#include "vqad/backend.hpp"
#include "vqad/error.hpp"

namespace vqad {

namespace {

void hash_update(EVP_MD_CTX* ctx, const void* data, std::size_t n) {
    if (EVP_DigestUpdate(ctx, data, n) != 1)
        raise(errc::io, "sha256 update failed");
}

std::string finish_hex(EVP_MD_CTX* ctx) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    if (EVP_DigestFinal_ex(ctx, digest.data(), &len) != 1)
        raise(errc::io, "sha256 final failed");
    static const char* hex = "0123456789abcdef";
    std::string out(2 * len, '0');
    for (unsigned int i = 0; i < len; ++i) {
        out[2 * i] = hex[digest[i] >> 4];
        out[2 * i + 1] = hex[digest[i] & 0xf];
    }
    return out;
}

struct CtxHolder {
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    ~CtxHolder() { EVP_MD_CTX_free(ctx); }
};

} // namespace

std::string sha256_hex(std::string_view bytes) {
    CtxHolder h;
    if (!h.ctx || EVP_DigestInit_ex(h.ctx, EVP_sha256(), nullptr) != 1)
        raise(errc::io, "sha256 init failed");
    hash_update(h.ctx, bytes.data(), bytes.size());
    return finish_hex(h.ctx);
}

std::string request_digest(const QueryRequest& req) {
    CtxHolder h;
    if (!h.ctx || EVP_DigestInit_ex(h.ctx, EVP_sha256(), nullptr) != 1)
        raise(errc::io, "sha256 init failed");
    // Length-framed fields keep the digest unambiguous across field
    // boundaries: u64 little-endian length, then the bytes.
    auto frame = [&](const void* data, std::size_t n) {
        std::uint64_t len = n;
        unsigned char lenb[8];
        for (int i = 0; i < 8; ++i)
            lenb[i] = static_cast<unsigned char>((len >> (8 * i)) & 0xff);
        hash_update(h.ctx, lenb, 8);
        hash_update(h.ctx, data, n);
    };
    frame(req.model_id.data(), req.model_id.size());
    frame(req.prompt_text.data(), req.prompt_text.size());
    frame(req.image_png.data(), req.image_png.size());
    return finish_hex(h.ctx);
}

} // namespace vqad
