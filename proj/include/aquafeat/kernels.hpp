#pragma once

#include <cmath>
#include <cstddef>

namespace aquafeat::kernels {

// Reference kernels. Definition of record for all row-level arithmetic;
// every SIMD variant must agree with these within test tolerance.
namespace ref {

template <typename T>
void axpy(std::size_t n, T a, const T* x, T* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

// y[i] += a * x[2*i]; reads 2n-1 elements of x.
template <typename T>
void axpy_gather2(std::size_t n, T a, const T* x, T* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[2 * i];
}

// y[2*i] += a * x[i]; writes into 2n-1 elements of y.
template <typename T>
void axpy_scatter2(std::size_t n, T a, const T* x, T* y) {
  for (std::size_t i = 0; i < n; ++i) y[2 * i] += a * x[i];
}

template <typename T>
T dot(std::size_t n, const T* x, const T* y) {
  T acc = T(0);
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

// sum of x[i] * y[2*i].
template <typename T>
T dot_gather2(std::size_t n, const T* x, const T* y) {
  T acc = T(0);
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[2 * i];
  return acc;
}

template <typename T>
T sum(std::size_t n, const T* x) {
  T acc = T(0);
  for (std::size_t i = 0; i < n; ++i) acc += x[i];
  return acc;
}

template <typename T>
void add(std::size_t n, const T* a, const T* b, T* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] + b[i];
}

template <typename T>
void mul(std::size_t n, const T* a, const T* b, T* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

template <typename T>
void scale(std::size_t n, const T* x, T c, T* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = c * x[i];
}

template <typename T>
void leaky_forward(std::size_t n, const T* x, T slope, T* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] = x[i] >= T(0) ? x[i] : slope * x[i];
}

// gx[i] += gy[i] * (x[i] >= 0 ? 1 : slope); subgradient at 0 is 1.
template <typename T>
void leaky_backward_acc(std::size_t n, const T* x, const T* gy, T slope, T* gx) {
  for (std::size_t i = 0; i < n; ++i) gx[i] += gy[i] * (x[i] >= T(0) ? T(1) : slope);
}

// Decoupled-weight-decay Adam update on one parameter block.
// inv_bc1 = 1/(1-beta1^t), inv_bc2 = 1/(1-beta2^t).
template <typename T>
void adamw_update(std::size_t n, T* w, const T* g, T* m, T* v, T lr, T beta1,
                  T beta2, T eps, T weight_decay, T inv_bc1, T inv_bc2) {
  for (std::size_t i = 0; i < n; ++i) {
    m[i] = beta1 * m[i] + (T(1) - beta1) * g[i];
    v[i] = beta2 * v[i] + (T(1) - beta2) * g[i] * g[i];
    const T m_hat = m[i] * inv_bc1;
    const T v_hat = v[i] * inv_bc2;
    w[i] -= lr * m_hat / (std::sqrt(v_hat) + eps) + lr * weight_decay * w[i];
  }
}

}  // namespace ref

// Runtime-selected float kernels.
struct KernelTable {
  const char* name = "scalar";
  void (*axpy)(std::size_t, float, const float*, float*) = nullptr;
  void (*axpy_gather2)(std::size_t, float, const float*, float*) = nullptr;
  void (*axpy_scatter2)(std::size_t, float, const float*, float*) = nullptr;
  float (*dot)(std::size_t, const float*, const float*) = nullptr;
  float (*dot_gather2)(std::size_t, const float*, const float*) = nullptr;
  float (*sum)(std::size_t, const float*) = nullptr;
  void (*add)(std::size_t, const float*, const float*, float*) = nullptr;
  void (*mul)(std::size_t, const float*, const float*, float*) = nullptr;
  void (*scale)(std::size_t, const float*, float, float*) = nullptr;
  void (*leaky_forward)(std::size_t, const float*, float, float*) = nullptr;
  void (*leaky_backward_acc)(std::size_t, const float*, const float*, float, float*) = nullptr;
  void (*adamw_update)(std::size_t, float*, const float*, float*, float*, float,
                       float, float, float, float, float, float) = nullptr;
};

const KernelTable& scalar_table();

// Null when the build or the host CPU lacks AVX2+FMA.
const KernelTable* avx2_table();

// Selected once per process: AVX2 when available, else scalar.
// AQUAFEAT_KERNELS=scalar|avx2 overrides (avx2 only if supported).
const KernelTable& active();

// Typed entry points: float routes through the dispatch table, every other
// scalar type runs the reference kernels directly. The double instantiation
// backs the gradient-check mode.
template <typename T>
struct Kern {
  static void axpy(std::size_t n, T a, const T* x, T* y) { ref::axpy(n, a, x, y); }
  static void axpy_gather2(std::size_t n, T a, const T* x, T* y) { ref::axpy_gather2(n, a, x, y); }
  static void axpy_scatter2(std::size_t n, T a, const T* x, T* y) { ref::axpy_scatter2(n, a, x, y); }
  static T dot(std::size_t n, const T* x, const T* y) { return ref::dot(n, x, y); }
  static T dot_gather2(std::size_t n, const T* x, const T* y) { return ref::dot_gather2(n, x, y); }
  static T sum(std::size_t n, const T* x) { return ref::sum(n, x); }
  static void add(std::size_t n, const T* a, const T* b, T* out) { ref::add(n, a, b, out); }
  static void mul(std::size_t n, const T* a, const T* b, T* out) { ref::mul(n, a, b, out); }
  static void scale(std::size_t n, const T* x, T c, T* out) { ref::scale(n, x, c, out); }
  static void leaky_forward(std::size_t n, const T* x, T slope, T* y) { ref::leaky_forward(n, x, slope, y); }
  static void leaky_backward_acc(std::size_t n, const T* x, const T* gy, T slope, T* gx) {
    ref::leaky_backward_acc(n, x, gy, slope, gx);
  }
  static void adamw_update(std::size_t n, T* w, const T* g, T* m, T* v, T lr, T b1,
                           T b2, T eps, T wd, T ibc1, T ibc2) {
    ref::adamw_update(n, w, g, m, v, lr, b1, b2, eps, wd, ibc1, ibc2);
  }
};

template <>
struct Kern<float> {
  static void axpy(std::size_t n, float a, const float* x, float* y) { active().axpy(n, a, x, y); }
  static void axpy_gather2(std::size_t n, float a, const float* x, float* y) {
    active().axpy_gather2(n, a, x, y);
  }
  static void axpy_scatter2(std::size_t n, float a, const float* x, float* y) {
    active().axpy_scatter2(n, a, x, y);
  }
  static float dot(std::size_t n, const float* x, const float* y) { return active().dot(n, x, y); }
  static float dot_gather2(std::size_t n, const float* x, const float* y) {
    return active().dot_gather2(n, x, y);
  }
  static float sum(std::size_t n, const float* x) { return active().sum(n, x); }
  static void add(std::size_t n, const float* a, const float* b, float* out) { active().add(n, a, b, out); }
  static void mul(std::size_t n, const float* a, const float* b, float* out) { active().mul(n, a, b, out); }
  static void scale(std::size_t n, const float* x, float c, float* out) { active().scale(n, x, c, out); }
  static void leaky_forward(std::size_t n, const float* x, float slope, float* y) {
    active().leaky_forward(n, x, slope, y);
  }
  static void leaky_backward_acc(std::size_t n, const float* x, const float* gy, float slope, float* gx) {
    active().leaky_backward_acc(n, x, gy, slope, gx);
  }
  static void adamw_update(std::size_t n, float* w, const float* g, float* m, float* v,
                           float lr, float b1, float b2, float eps, float wd, float ibc1,
                           float ibc2) {
    active().adamw_update(n, w, g, m, v, lr, b1, b2, eps, wd, ibc1, ibc2);
  }
};

}  // namespace aquafeat::kernels
