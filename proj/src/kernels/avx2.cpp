#include "vqad/kernels/kernels.hpp"

#if defined(__AVX2__) && (defined(__x86_64__) || defined(__i386__))
#define VQAD_AVX2_BUILD 1
#include <immintrin.h>
#else
#define VQAD_AVX2_BUILD 0
#endif

namespace vqad::kernels::avx2 {

bool compiled_in() { return VQAD_AVX2_BUILD != 0; }

bool usable() {
#if VQAD_AVX2_BUILD
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

#if VQAD_AVX2_BUILD

namespace {

// Plain mul/add only (no FMA) so each lane reproduces the scalar reference
// bit for bit.
void slic_assign_row_avx2(const float* L, const float* A, const float* B,
                          int x0, int x1, int y, int row_stride,
                          float cl, float ca, float cb, float cx, float cy,
                          float spatial_w,
                          float* best_dist, std::int32_t* best_label, std::int32_t label) {
    const std::size_t row = static_cast<std::size_t>(y) * row_stride;
    const float dyf = static_cast<float>(y) - cy;
    const float dy2f = dyf * dyf;

    const __m256 vcl = _mm256_set1_ps(cl);
    const __m256 vca = _mm256_set1_ps(ca);
    const __m256 vcb = _mm256_set1_ps(cb);
    const __m256 vcx = _mm256_set1_ps(cx);
    const __m256 vdy2 = _mm256_set1_ps(dy2f);
    const __m256 vw = _mm256_set1_ps(spatial_w);
    const __m256i vlabel = _mm256_set1_epi32(label);
    const __m256i lane_offsets = _mm256_setr_epi32(0, 1, 2, 3, 4, 5, 6, 7);

    int x = x0;
    for (; x + 8 <= x1; x += 8) {
        const std::size_t i = row + x;
        const __m256 vl = _mm256_sub_ps(_mm256_loadu_ps(L + i), vcl);
        const __m256 va = _mm256_sub_ps(_mm256_loadu_ps(A + i), vca);
        const __m256 vb = _mm256_sub_ps(_mm256_loadu_ps(B + i), vcb);
        const __m256 vx = _mm256_sub_ps(
            _mm256_cvtepi32_ps(_mm256_add_epi32(_mm256_set1_epi32(x), lane_offsets)), vcx);

        const __m256 color = _mm256_add_ps(
            _mm256_add_ps(_mm256_mul_ps(vl, vl), _mm256_mul_ps(va, va)), _mm256_mul_ps(vb, vb));
        const __m256 spatial = _mm256_mul_ps(_mm256_add_ps(_mm256_mul_ps(vx, vx), vdy2), vw);
        const __m256 d = _mm256_add_ps(color, spatial);

        const __m256 incumbent = _mm256_loadu_ps(best_dist + i);
        const __m256 lt = _mm256_cmp_ps(d, incumbent, _CMP_LT_OQ);
        _mm256_storeu_ps(best_dist + i, _mm256_blendv_ps(incumbent, d, lt));

        const __m256i old_label = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(best_label + i));
        const __m256i new_label = _mm256_blendv_epi8(old_label, vlabel, _mm256_castps_si256(lt));
        _mm256_storeu_si256(reinterpret_cast<__m256i*>(best_label + i), new_label);
    }
    if (x < x1)
        scalar::slic_assign_row(L, A, B, x, x1, y, row_stride, cl, ca, cb, cx, cy, spatial_w,
                                best_dist, best_label, label);
}

void fill_from_lut_avx2(const std::uint16_t* labels, std::size_t n, const float* lut, float* out) {
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m128i lab16 = _mm_loadu_si128(reinterpret_cast<const __m128i*>(labels + i));
        const __m256i idx = _mm256_cvtepu16_epi32(lab16);
        _mm256_storeu_ps(out + i, _mm256_i32gather_ps(lut, idx, 4));
    }
    for (; i < n; ++i)
        out[i] = lut[labels[i]];
}

std::size_t count_gt_avx2(const float* values, std::size_t n, float threshold) {
    const __m256 vt = _mm256_set1_ps(threshold);
    std::size_t count = 0;
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256 v = _mm256_loadu_ps(values + i);
        const int mask = _mm256_movemask_ps(_mm256_cmp_ps(v, vt, _CMP_GT_OQ));
        count += static_cast<std::size_t>(__builtin_popcount(static_cast<unsigned>(mask)));
    }
    for (; i < n; ++i)
        count += values[i] > threshold ? 1 : 0;
    return count;
}

} // namespace

const KernelTable& table() {
    static const KernelTable t{&slic_assign_row_avx2, &fill_from_lut_avx2, &count_gt_avx2, "avx2"};
    return t;
}

#else

const KernelTable& table() { return scalar::table(); }

#endif

} // namespace vqad::kernels::avx2
