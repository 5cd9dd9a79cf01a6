#include "vqad/kernels/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

namespace vqad::kernels {

namespace {

const KernelTable* select_initial() {
    if (const char* env = std::getenv("VQAD_KERNELS")) {
        if (std::strcmp(env, "scalar") == 0)
            return &scalar::table();
        if (std::strcmp(env, "avx2") == 0 && avx2::usable())
            return &avx2::table();
    }
    return avx2::usable() ? &avx2::table() : &scalar::table();
}

std::atomic<const KernelTable*> g_active{nullptr};

} // namespace

const KernelTable& active() {
    const KernelTable* t = g_active.load(std::memory_order_acquire);
    if (!t) {
        t = select_initial();
        g_active.store(t, std::memory_order_release);
    }
    return *t;
}

void force(const KernelTable& table) {
    g_active.store(&table, std::memory_order_release);
}

} // namespace vqad::kernels
