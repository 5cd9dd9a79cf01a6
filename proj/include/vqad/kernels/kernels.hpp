#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

// Data-parallel inner loops with a scalar reference implementation and an
// AVX2 variant selected at runtime. Both paths are written to produce
// bit-identical results: the same operation tree per element, no FMA, no
// reassociation. Equivalence is enforced by tests that run both paths on the
// same inputs and compare exactly.

namespace vqad::kernels {

// Relaxes best-distance / best-label over pixels [x0, x1) of row y against
// one cluster center. Distance is
//   d = (L-cl)^2 + (A-ca)^2 + (B-cb)^2 + ((x-cx)^2 + (y-cy)^2) * spatial_w
// evaluated left-to-right; a strict < replaces the incumbent.
using slic_assign_row_fn = void (*)(const float* L, const float* A, const float* B,
                                    int x0, int x1, int y, int row_stride,
                                    float cl, float ca, float cb, float cx, float cy,
                                    float spatial_w,
                                    float* best_dist, std::int32_t* best_label, std::int32_t label);

// out[i] = lut[labels[i]]
using fill_from_lut_fn = void (*)(const std::uint16_t* labels, std::size_t n,
                                  const float* lut, float* out);

// Number of values strictly greater than threshold.
using count_gt_fn = std::size_t (*)(const float* values, std::size_t n, float threshold);

struct KernelTable {
    slic_assign_row_fn slic_assign_row;
    fill_from_lut_fn fill_from_lut;
    count_gt_fn count_gt;
    const char* name;
};

namespace scalar {
void slic_assign_row(const float* L, const float* A, const float* B,
                     int x0, int x1, int y, int row_stride,
                     float cl, float ca, float cb, float cx, float cy,
                     float spatial_w,
                     float* best_dist, std::int32_t* best_label, std::int32_t label);
void fill_from_lut(const std::uint16_t* labels, std::size_t n, const float* lut, float* out);
std::size_t count_gt(const float* values, std::size_t n, float threshold);
const KernelTable& table();
} // namespace scalar

namespace avx2 {
bool compiled_in();  // translation unit built with AVX2 support
bool usable();       // compiled in and the CPU reports AVX2
const KernelTable& table();
} // namespace avx2

// Active table: AVX2 when usable, otherwise scalar. The VQAD_KERNELS
// environment variable ("scalar" or "avx2") forces a choice at first use.
const KernelTable& active();
void force(const KernelTable& table); // tests only

} // namespace vqad::kernels
