#include "vqad/kernels/kernels.hpp"

// Reference implementations. The AVX2 variants mirror this operation tree
// exactly; any change here must be replicated there to keep the paths
// bit-identical (see tests/test_kernels.cpp).

namespace vqad::kernels::scalar {

void slic_assign_row(const float* L, const float* A, const float* B,
                     int x0, int x1, int y, int row_stride,
                     float cl, float ca, float cb, float cx, float cy,
                     float spatial_w,
                     float* best_dist, std::int32_t* best_label, std::int32_t label) {
    const std::size_t row = static_cast<std::size_t>(y) * row_stride;
    const float dy = static_cast<float>(y) - cy;
    const float dy2 = dy * dy;
    for (int x = x0; x < x1; ++x) {
        const std::size_t i = row + x;
        const float dl = L[i] - cl;
        const float da = A[i] - ca;
        const float db = B[i] - cb;
        const float dx = static_cast<float>(x) - cx;
        const float color = (dl * dl + da * da) + db * db;
        const float spatial = (dx * dx + dy2) * spatial_w;
        const float d = color + spatial;
        if (d < best_dist[i]) {
            best_dist[i] = d;
            best_label[i] = label;
        }
    }
}

void fill_from_lut(const std::uint16_t* labels, std::size_t n, const float* lut, float* out) {
    for (std::size_t i = 0; i < n; ++i)
        out[i] = lut[labels[i]];
}

std::size_t count_gt(const float* values, std::size_t n, float threshold) {
    std::size_t count = 0;
    for (std::size_t i = 0; i < n; ++i)
        count += values[i] > threshold ? 1 : 0;
    return count;
}

const KernelTable& table() {
    static const KernelTable t{&slic_assign_row, &fill_from_lut, &count_gt, "scalar"};
    return t;
}

} // namespace vqad::kernels::scalar
