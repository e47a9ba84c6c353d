#include "aquafeat/kernels.hpp"

#if defined(__AVX2__) && defined(__FMA__)

#include <immintrin.h>

namespace aquafeat::kernels {
namespace {

inline float hsum256(__m256 v) {
  __m128 lo = _mm256_castps256_ps128(v);
  __m128 hi = _mm256_extractf128_ps(v, 1);
  lo = _mm_add_ps(lo, hi);
  __m128 shuf = _mm_movehdup_ps(lo);
  __m128 sums = _mm_add_ps(lo, shuf);
  shuf = _mm_movehl_ps(shuf, sums);
  sums = _mm_add_ss(sums, shuf);
  return _mm_cvtss_f32(sums);
}

// x0 x1 .. x15 (two registers) -> even elements x0 x2 .. x14.
inline __m256 deinterleave_even(__m256 lo, __m256 hi) {
  __m256 even = _mm256_shuffle_ps(lo, hi, 0x88);
  return _mm256_castpd_ps(_mm256_permute4x64_pd(_mm256_castps_pd(even), 0xD8));
}

void axpy_avx2(std::size_t n, float a, const float* x, float* y) {
  const __m256 va = _mm256_set1_ps(a);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256 vy = _mm256_loadu_ps(y + i);
    vy = _mm256_fmadd_ps(va, _mm256_loadu_ps(x + i), vy);
    _mm256_storeu_ps(y + i, vy);
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void axpy_gather2_avx2(std::size_t n, float a, const float* x, float* y) {
  const __m256 va = _mm256_set1_ps(a);
  std::size_t i = 0;
  // A full block reads x[2i .. 2i+15]; x only has 2n-1 valid elements,
  // so stop one block early and let the scalar tail finish.
  for (; i + 9 <= n; i += 8) {
    __m256 lo = _mm256_loadu_ps(x + 2 * i);
    __m256 hi = _mm256_loadu_ps(x + 2 * i + 8);
    __m256 vy = _mm256_loadu_ps(y + i);
    vy = _mm256_fmadd_ps(va, deinterleave_even(lo, hi), vy);
    _mm256_storeu_ps(y + i, vy);
  }
  for (; i < n; ++i) y[i] += a * x[2 * i];
}

void axpy_scatter2_avx2(std::size_t n, float a, const float* x, float* y) {
  const __m256 va = _mm256_set1_ps(a);
  const __m256i spread_idx = _mm256_setr_epi32(0, 0, 1, 1, 2, 2, 3, 3);
  const __m256 even_mask = _mm256_castsi256_ps(
      _mm256_setr_epi32(-1, 0, -1, 0, -1, 0, -1, 0));
  std::size_t i = 0;
  // A block rewrites y[2i .. 2i+7]; y has 2n-1 valid elements.
  for (; i + 5 <= n; i += 4) {
    __m128 xv = _mm_loadu_ps(x + i);
    __m256 spread = _mm256_permutevar8x32_ps(_mm256_castps128_ps256(xv), spread_idx);
    spread = _mm256_and_ps(spread, even_mask);
    __m256 vy = _mm256_loadu_ps(y + 2 * i);
    vy = _mm256_fmadd_ps(va, spread, vy);
    _mm256_storeu_ps(y + 2 * i, vy);
  }
  for (; i < n; ++i) y[2 * i] += a * x[i];
}

float dot_avx2(std::size_t n, const float* x, const float* y) {
  __m256 acc = _mm256_setzero_ps();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc = _mm256_fmadd_ps(_mm256_loadu_ps(x + i), _mm256_loadu_ps(y + i), acc);
  }
  float total = hsum256(acc);
  for (; i < n; ++i) total += x[i] * y[i];
  return total;
}

float dot_gather2_avx2(std::size_t n, const float* x, const float* y) {
  __m256 acc = _mm256_setzero_ps();
  std::size_t i = 0;
  for (; i + 9 <= n; i += 8) {
    __m256 lo = _mm256_loadu_ps(y + 2 * i);
    __m256 hi = _mm256_loadu_ps(y + 2 * i + 8);
    acc = _mm256_fmadd_ps(_mm256_loadu_ps(x + i), deinterleave_even(lo, hi), acc);
  }
  float total = hsum256(acc);
  for (; i < n; ++i) total += x[i] * y[2 * i];
  return total;
}

float sum_avx2(std::size_t n, const float* x) {
  __m256 acc = _mm256_setzero_ps();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) acc = _mm256_add_ps(acc, _mm256_loadu_ps(x + i));
  float total = hsum256(acc);
  for (; i < n; ++i) total += x[i];
  return total;
}

void add_avx2(std::size_t n, const float* a, const float* b, float* out) {
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    _mm256_storeu_ps(out + i, _mm256_add_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i)));
  }
  for (; i < n; ++i) out[i] = a[i] + b[i];
}

void mul_avx2(std::size_t n, const float* a, const float* b, float* out) {
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    _mm256_storeu_ps(out + i, _mm256_mul_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i)));
  }
  for (; i < n; ++i) out[i] = a[i] * b[i];
}

void scale_avx2(std::size_t n, const float* x, float c, float* out) {
  const __m256 vc = _mm256_set1_ps(c);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    _mm256_storeu_ps(out + i, _mm256_mul_ps(vc, _mm256_loadu_ps(x + i)));
  }
  for (; i < n; ++i) out[i] = c * x[i];
}

void leaky_forward_avx2(std::size_t n, const float* x, float slope, float* y) {
  const __m256 vs = _mm256_set1_ps(slope);
  const __m256 zero = _mm256_setzero_ps();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256 vx = _mm256_loadu_ps(x + i);
    __m256 neg = _mm256_mul_ps(vs, vx);
    __m256 keep = _mm256_cmp_ps(vx, zero, _CMP_GE_OQ);
    _mm256_storeu_ps(y + i, _mm256_blendv_ps(neg, vx, keep));
  }
  for (; i < n; ++i) y[i] = x[i] >= 0.0f ? x[i] : slope * x[i];
}

void leaky_backward_acc_avx2(std::size_t n, const float* x, const float* gy,
                             float slope, float* gx) {
  const __m256 vs = _mm256_set1_ps(slope);
  const __m256 one = _mm256_set1_ps(1.0f);
  const __m256 zero = _mm256_setzero_ps();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256 vx = _mm256_loadu_ps(x + i);
    __m256 keep = _mm256_cmp_ps(vx, zero, _CMP_GE_OQ);
    __m256 factor = _mm256_blendv_ps(vs, one, keep);
    __m256 vgx = _mm256_loadu_ps(gx + i);
    vgx = _mm256_fmadd_ps(_mm256_loadu_ps(gy + i), factor, vgx);
    _mm256_storeu_ps(gx + i, vgx);
  }
  for (; i < n; ++i) gx[i] += gy[i] * (x[i] >= 0.0f ? 1.0f : slope);
}

void adamw_update_avx2(std::size_t n, float* w, const float* g, float* m, float* v,
                       float lr, float beta1, float beta2, float eps,
                       float weight_decay, float inv_bc1, float inv_bc2) {
  const __m256 vb1 = _mm256_set1_ps(beta1);
  const __m256 vb2 = _mm256_set1_ps(beta2);
  const __m256 vc1 = _mm256_set1_ps(1.0f - beta1);
  const __m256 vc2 = _mm256_set1_ps(1.0f - beta2);
  const __m256 vibc1 = _mm256_set1_ps(inv_bc1);
  const __m256 vibc2 = _mm256_set1_ps(inv_bc2);
  const __m256 vlr = _mm256_set1_ps(lr);
  const __m256 veps = _mm256_set1_ps(eps);
  const __m256 vwd = _mm256_set1_ps(lr * weight_decay);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256 vg = _mm256_loadu_ps(g + i);
    __m256 vm = _mm256_fmadd_ps(vc1, vg, _mm256_mul_ps(vb1, _mm256_loadu_ps(m + i)));
    __m256 vv = _mm256_fmadd_ps(vc2, _mm256_mul_ps(vg, vg),
                                _mm256_mul_ps(vb2, _mm256_loadu_ps(v + i)));
    _mm256_storeu_ps(m + i, vm);
    _mm256_storeu_ps(v + i, vv);
    __m256 m_hat = _mm256_mul_ps(vm, vibc1);
    __m256 denom = _mm256_add_ps(_mm256_sqrt_ps(_mm256_mul_ps(vv, vibc2)), veps);
    __m256 vw = _mm256_loadu_ps(w + i);
    __m256 update = _mm256_add_ps(_mm256_mul_ps(vlr, _mm256_div_ps(m_hat, denom)),
                                  _mm256_mul_ps(vwd, vw));
    _mm256_storeu_ps(w + i, _mm256_sub_ps(vw, update));
  }
  for (; i < n; ++i) {
    m[i] = beta1 * m[i] + (1.0f - beta1) * g[i];
    v[i] = beta2 * v[i] + (1.0f - beta2) * g[i] * g[i];
    const float m_hat = m[i] * inv_bc1;
    const float v_hat = v[i] * inv_bc2;
    w[i] -= lr * m_hat / (std::sqrt(v_hat) + eps) + lr * weight_decay * w[i];
  }
}

bool cpu_supported() {
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}

}  // namespace

const KernelTable* avx2_table() {
  if (!cpu_supported()) return nullptr;
  static const KernelTable table = {
      "avx2",
      &axpy_avx2,
      &axpy_gather2_avx2,
      &axpy_scatter2_avx2,
      &dot_avx2,
      &dot_gather2_avx2,
      &sum_avx2,
      &add_avx2,
      &mul_avx2,
      &scale_avx2,
      &leaky_forward_avx2,
      &leaky_backward_acc_avx2,
      &adamw_update_avx2,
  };
  return &table;
}

}  // namespace aquafeat::kernels

#else  // no AVX2/FMA at compile time

namespace aquafeat::kernels {

const KernelTable* avx2_table() { return nullptr; }

}  // namespace aquafeat::kernels

#endif
